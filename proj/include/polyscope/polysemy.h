#pragma once

#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "polyscope/model_io.h"
#include "polyscope/neighborhood.h"
#include "polyscope/vector_ops.h"

namespace polyscope {

enum class UndefinedSu { kQueryNotStable, kInsufficientNeighbors, kDegenerate };

/// Surrounding uniformity of one word: the uniformity of the word's vector
/// together with its stable neighbors.
struct UniformityRecord {
  std::size_t word = 0;
  /// Exactly n_neighbors entries when the SU is defined, empty otherwise.
  std::vector<Neighbor> neighbors;
  std::variant<UniformityValue, UndefinedSu> su = UndefinedSu::kQueryNotStable;
  /// Stable words seen in the search scope when neighbors were insufficient.
  std::size_t found = 0;

  bool defined() const noexcept { return std::holds_alternative<UniformityValue>(su); }
  /// Throws std::bad_variant_access when undefined.
  double value() const { return std::get<UniformityValue>(su).value(); }
  UndefinedSu reason() const { return std::get<UndefinedSu>(su); }
};

struct TestStatistics {
  std::vector<double> neighbor_sus;
  double mean = 0.0;
  /// Bessel-corrected sample standard deviation.
  double sigma = 0.0;
  double threshold = 0.0;
};

/// Mean, sample standard deviation (n - 1) and mean - sigma_k * sigma.
/// Requires at least two values, each in (0, 1].
TestStatistics outlier_stats(std::span<const double> neighbor_sus, double sigma_k);

enum class UntestableReason { kUndefinedSuSelf, kUndefinedSuNeighbor, kZeroVariance };

class Verdict {
 public:
  enum class Kind { kPolysemic, kNotDetected, kUntestable };

  static Verdict polysemic() { return Verdict(Kind::kPolysemic, std::nullopt); }
  static Verdict not_detected() { return Verdict(Kind::kNotDetected, std::nullopt); }
  static Verdict untestable(UntestableReason why) { return Verdict(Kind::kUntestable, why); }

  Kind kind() const noexcept { return kind_; }
  /// Set only for kUntestable.
  std::optional<UntestableReason> reason() const noexcept { return reason_; }

  friend bool operator==(const Verdict&, const Verdict&) = default;

 private:
  Verdict(Kind kind, std::optional<UntestableReason> reason)
      : kind_(kind), reason_(reason) {}
  Kind kind_;
  std::optional<UntestableReason> reason_;
};

/// Outlier decision for a defined SU: untestable on zero dispersion,
/// polysemic iff su is strictly below the threshold.
Verdict classify(double su, const TestStatistics& stats);

struct PolysemyResult {
  UniformityRecord record;
  /// One record per neighbor of `record`, in neighbor order.
  std::vector<UniformityRecord> neighbor_records;
  std::optional<TestStatistics> stats;
  Verdict verdict = Verdict::untestable(UntestableReason::kUndefinedSuSelf);
};

struct BatchSummary {
  std::size_t poly = 0;
  std::size_t mono = 0;
  std::size_t untestable = 0;
  friend bool operator==(const BatchSummary&, const BatchSummary&) = default;
};

struct BatchReport {
  /// One row per stable word, in rank order.
  std::vector<PolysemyResult> rows;
  BatchSummary summary;
};

/// Runs SU computations and outlier tests against one model and config.
///
/// SU records are memoized per word; each slot is written exactly once, so
/// concurrent callers observe the same values a serial run would.
class PolysemyAnalyzer {
 public:
  PolysemyAnalyzer(const EmbeddingModel& model, SearchConfig cfg, unsigned threads = 1);

  const EmbeddingModel& model() const noexcept { return model_; }
  const SearchConfig& config() const noexcept { return cfg_; }

  const UniformityRecord& surrounding_uniformity(std::size_t word) const;
  PolysemyResult test(std::size_t word) const;
  BatchReport batch() const;

 private:
  const UniformityRecord& memoized(std::size_t word, const NeighborSearcher& searcher) const;
  PolysemyResult test_with(std::size_t word, const NeighborSearcher& searcher) const;

  const EmbeddingModel& model_;
  SearchConfig cfg_;
  unsigned threads_;
  NeighborSearcher searcher_;
  mutable std::vector<std::optional<UniformityRecord>> cache_;
  std::unique_ptr<std::once_flag[]> once_;
};

UniformityRecord surrounding_uniformity(const EmbeddingModel& model, std::string_view word,
                                        const SearchConfig& cfg);
PolysemyResult polysemy_test(const EmbeddingModel& model, std::string_view word,
                             const SearchConfig& cfg, unsigned threads = 1);
BatchReport batch_analyze(const EmbeddingModel& model, const SearchConfig& cfg,
                          unsigned threads = 1);

}  // namespace polyscope
