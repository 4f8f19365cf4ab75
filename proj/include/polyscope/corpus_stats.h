#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>

namespace polyscope {

struct BigramHash {
  std::size_t operator()(const std::pair<std::string, std::string>& p) const noexcept {
    const std::size_t h1 = std::hash<std::string>{}(p.first);
    const std::size_t h2 = std::hash<std::string>{}(p.second);
    return h1 ^ (h2 + 0x9e3779b97f4a7c15ULL + (h1 << 6) + (h1 >> 2));
  }
};

/// Unigram and adjacent-bigram counts over a whitespace-tokenized corpus.
struct FrequencyTable {
  std::unordered_map<std::string, std::uint64_t> unigram;
  std::unordered_map<std::pair<std::string, std::string>, std::uint64_t, BigramHash> bigram;
  std::uint64_t total_tokens = 0;

  std::uint64_t count(std::string_view token) const;
  std::uint64_t count(std::string_view first, std::string_view second) const;

  /// Adds `other`, which must describe the text directly following this one.
  /// The bigram spanning the seam is added from the boundary tokens.
  void append(const FrequencyTable& other);

  friend bool operator==(const FrequencyTable& a, const FrequencyTable& b) {
    return a.unigram == b.unigram && a.bigram == b.bigram &&
           a.total_tokens == b.total_tokens;
  }

  /// First and last token of the counted text (empty when no tokens).
  std::string first_token;
  std::string last_token;
};

/// Streaming counter; reads the stream token by token.
FrequencyTable count_corpus(std::istream& in, bool lowercase);

/// Whole-buffer counter. Splits the buffer into up to `threads` chunks at
/// whitespace and merges the partial tables; the result equals a serial count.
FrequencyTable count_buffer(std::string_view text, bool lowercase, unsigned threads = 1);

struct PairRatio {
  std::uint64_t name_count = 0;
  std::uint64_t pair_count = 0;
  /// pair_count / name_count, or 0 when the name never occurs.
  double ratio = 0.0;
};

PairRatio followed_by_ratio(const FrequencyTable& table, std::string_view name,
                            std::string_view follower);

/// "token<TAB>count" lines, by descending count then token.
void write_unigram_tsv(std::ostream& out, const FrequencyTable& table);
/// "first second<TAB>count" lines, by descending count then tokens.
void write_bigram_tsv(std::ostream& out, const FrequencyTable& table);

}  // namespace polyscope
