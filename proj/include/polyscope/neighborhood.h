#pragma once

#include <cstddef>
#include <string_view>
#include <variant>
#include <vector>

#include "polyscope/model_io.h"

namespace polyscope {

/// Parameters of the stable-neighbor search and the outlier test.
struct SearchConfig {
  std::size_t n_neighbors = 4;
  std::size_t limit = 1000;
  /// Number of overall nearest words inspected when collecting stable ones.
  std::size_t scope = 40;
  double sigma_k = 3.0;

  /// Throws std::invalid_argument on a violated invariant.
  void validate() const;
  /// validate() plus limit <= vocab_size.
  void validate_for(const EmbeddingModel& model) const;
};

struct Neighbor {
  std::size_t rank;
  double cosine;
  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Strict total order: cosine descending, then frequency rank ascending.
/// Ranks are unique within a model, so no further tie-break is needed.
inline bool neighbor_before(const Neighbor& a, const Neighbor& b) {
  if (a.cosine != b.cosine) return a.cosine > b.cosine;
  return a.rank < b.rank;
}

struct NeighborList {
  std::size_t query;
  std::vector<Neighbor> neighbors;
  friend bool operator==(const NeighborList&, const NeighborList&) = default;
};

enum class InsufficientReason { kQueryNotStable, kTooFewStable };

struct Insufficient {
  InsufficientReason reason;
  /// Stable words found in the search scope.
  std::size_t found = 0;
  friend bool operator==(const Insufficient&, const Insufficient&) = default;
};

using StableNeighbors = std::variant<NeighborList, Insufficient>;

/// Exact cosine scan over the whole vocabulary. The scan can be split over
/// worker threads; chunk results are merged under the strict neighbor order,
/// so the output does not depend on the thread count.
class NeighborSearcher {
 public:
  /// threads == 0 means hardware concurrency. The vocabulary is split into at
  /// most `threads` chunks of at least `min_chunk` words each.
  explicit NeighborSearcher(const EmbeddingModel& model, unsigned threads = 1,
                            std::size_t min_chunk = 4096);

  const EmbeddingModel& model() const noexcept { return model_; }
  unsigned threads() const noexcept { return threads_; }

  /// Top-k words by cosine to `query`, excluding it. k is capped at
  /// vocab_size - 1.
  std::vector<Neighbor> all_neighbors(std::size_t query, std::size_t k) const;

  StableNeighbors stable_neighbors(std::size_t query, const SearchConfig& cfg) const;

 private:
  const EmbeddingModel& model_;
  unsigned threads_;
  std::size_t min_chunk_;
};

std::vector<Neighbor> all_neighbors(const EmbeddingModel& model, std::string_view query,
                                    std::size_t k, unsigned threads = 1);

StableNeighbors stable_neighbors(const EmbeddingModel& model, std::string_view query,
                                 const SearchConfig& cfg, unsigned threads = 1);

unsigned resolve_threads(unsigned requested);

}  // namespace polyscope
