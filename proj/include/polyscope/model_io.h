#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace polyscope {

/// Raised for any malformed or invariant-violating model file. `line()` is the
/// 1-based line (text) or record (binary, header = 1) where the problem was
/// found, or 0 when it does not apply to a single location.
class ModelFormatError : public std::runtime_error {
 public:
  ModelFormatError(const std::string& what, std::size_t line);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class UnknownTokenError : public std::out_of_range {
 public:
  explicit UnknownTokenError(std::string_view token);
};

/// Vocabulary in frequency-rank order plus a row-major float matrix.
///
/// Immutable after construction. Construction validates every invariant:
/// unique non-empty tokens, finite components, no zero vector. Row norms are
/// precomputed in double precision.
class EmbeddingModel {
 public:
  EmbeddingModel(std::vector<std::string> tokens, std::vector<float> values,
                 std::size_t dim);

  std::size_t vocab_size() const noexcept { return tokens_.size(); }
  std::size_t dim() const noexcept { return dim_; }

  const std::string& token(std::size_t rank) const { return tokens_.at(rank); }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }

  std::span<const float> vector(std::size_t rank) const {
    return {values_.data() + rank * dim_, dim_};
  }
  double norm(std::size_t rank) const { return norms_[rank]; }

  std::optional<std::size_t> find(std::string_view token) const;
  /// Throws UnknownTokenError.
  std::size_t rank_of(std::string_view token) const;

  /// Returns a copy ordered by descending count. Ties and tokens missing from
  /// `counts` (treated as count 0) keep their current relative order.
  EmbeddingModel reranked(
      const std::unordered_map<std::string, std::uint64_t>& counts) const;

  friend bool operator==(const EmbeddingModel&, const EmbeddingModel&) = default;

 private:
  std::vector<std::string> tokens_;
  std::vector<float> values_;
  std::size_t dim_;
  std::vector<double> norms_;
  std::unordered_map<std::string, std::size_t> index_;
};

enum class ModelFormat { kText, kBinary, kAuto };

ModelFormat parse_model_format(std::string_view name);

EmbeddingModel read_text_model(std::istream& in);
EmbeddingModel read_binary_model(std::istream& in);

EmbeddingModel load_text_model(const std::filesystem::path& path);
EmbeddingModel load_binary_model(const std::filesystem::path& path);
/// kAuto sniffs the first entry after the header.
EmbeddingModel load_model(const std::filesystem::path& path,
                          ModelFormat format = ModelFormat::kAuto);
ModelFormat sniff_model_format(const std::filesystem::path& path);

/// Writers refuse tokens the readers could not recover (empty or containing
/// whitespace). Text output uses shortest round-trip float formatting.
void write_text_model(std::ostream& out, const EmbeddingModel& model);
void write_binary_model(std::ostream& out, const EmbeddingModel& model);
void save_text_model(const std::filesystem::path& path, const EmbeddingModel& model);
void save_binary_model(const std::filesystem::path& path, const EmbeddingModel& model);

/// Reads "token<TAB>count" lines. Lines whose key contains a space (bigram
/// dumps) and blank lines are skipped.
std::unordered_map<std::string, std::uint64_t> read_count_file(std::istream& in);
std::unordered_map<std::string, std::uint64_t> load_count_file(
    const std::filesystem::path& path);

/// The first `limit` tokens in rank order. Throws std::invalid_argument when
/// limit is 0 or exceeds the vocabulary.
std::vector<std::string> stable_set(const EmbeddingModel& model, std::size_t limit);

}  // namespace polyscope
