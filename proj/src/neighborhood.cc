#include "polyscope/neighborhood.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <thread>

#include "polyscope/vector_ops.h"

namespace polyscope {

namespace {

// Keeps the best k of [begin, end) under neighbor_before.
std::vector<Neighbor> scan_range(const EmbeddingModel& model, std::size_t query,
                                 std::size_t begin, std::size_t end, std::size_t k) {
  const auto q = model.vector(query);
  const double q_norm = model.norm(query);
  std::vector<Neighbor> best;
  best.reserve(k + 1);
  auto worse = [](const Neighbor& a, const Neighbor& b) { return neighbor_before(a, b); };
  for (std::size_t r = begin; r < end; ++r) {
    if (r == query) continue;
    Neighbor cand{r, cosine_from(dot(q, model.vector(r)), q_norm, model.norm(r))};
    if (best.size() < k) {
      best.push_back(cand);
      std::push_heap(best.begin(), best.end(), worse);
    } else if (neighbor_before(cand, best.front())) {
      std::pop_heap(best.begin(), best.end(), worse);
      best.back() = cand;
      std::push_heap(best.begin(), best.end(), worse);
    }
  }
  std::sort(best.begin(), best.end(), neighbor_before);
  return best;
}

}  // namespace

void SearchConfig::validate() const {
  if (n_neighbors < 2) throw std::invalid_argument("number of neighbors must be at least 2");
  if (n_neighbors > scope) {
    throw std::invalid_argument("number of neighbors must not exceed the search scope");
  }
  if (limit < n_neighbors + 1) {
    throw std::invalid_argument("limit must be at least the number of neighbors + 1");
  }
  if (!(sigma_k >= 0.0) || !std::isfinite(sigma_k)) {
    throw std::invalid_argument("sigma multiplier must be finite and non-negative");
  }
}

void SearchConfig::validate_for(const EmbeddingModel& model) const {
  validate();
  if (limit > model.vocab_size()) {
    throw std::invalid_argument("limit " + std::to_string(limit) +
                                " exceeds the vocabulary size " +
                                std::to_string(model.vocab_size()));
  }
}

unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

NeighborSearcher::NeighborSearcher(const EmbeddingModel& model, unsigned threads,
                                   std::size_t min_chunk)
    : model_(model), threads_(resolve_threads(threads)), min_chunk_(std::max<std::size_t>(min_chunk, 1)) {}

std::vector<Neighbor> NeighborSearcher::all_neighbors(std::size_t query,
                                                      std::size_t k) const {
  const std::size_t n = model_.vocab_size();
  if (query >= n) throw std::out_of_range("query rank out of range");
  k = std::min(k, n - 1);
  if (k == 0) return {};

  const std::size_t chunks =
      std::clamp<std::size_t>(n / min_chunk_, 1, static_cast<std::size_t>(threads_));
  if (chunks == 1) return scan_range(model_, query, 0, n, k);

  std::vector<std::vector<Neighbor>> partial(chunks);
  {
    std::vector<std::jthread> workers;
    workers.reserve(chunks);
    for (std::size_t c = 0; c < chunks; ++c) {
      const std::size_t begin = n * c / chunks;
      const std::size_t end = n * (c + 1) / chunks;
      workers.emplace_back([&, c, begin, end] {
        partial[c] = scan_range(model_, query, begin, end, k);
      });
    }
  }
  std::vector<Neighbor> merged;
  for (auto& p : partial) merged.insert(merged.end(), p.begin(), p.end());
  std::partial_sort(merged.begin(), merged.begin() + static_cast<std::ptrdiff_t>(k),
                    merged.end(), neighbor_before);
  merged.resize(k);
  return merged;
}

StableNeighbors NeighborSearcher::stable_neighbors(std::size_t query,
                                                   const SearchConfig& cfg) const {
  cfg.validate_for(model_);
  if (query >= model_.vocab_size()) throw std::out_of_range("query rank out of range");
  // The stable set is the rank prefix [0, limit).
  if (query >= cfg.limit) return Insufficient{InsufficientReason::kQueryNotStable, 0};

  NeighborList list{query, {}};
  for (const Neighbor& nb : all_neighbors(query, cfg.scope)) {
    if (nb.rank < cfg.limit) list.neighbors.push_back(nb);
  }
  if (list.neighbors.size() < cfg.n_neighbors) {
    return Insufficient{InsufficientReason::kTooFewStable, list.neighbors.size()};
  }
  list.neighbors.resize(cfg.n_neighbors);
  return list;
}

std::vector<Neighbor> all_neighbors(const EmbeddingModel& model, std::string_view query,
                                    std::size_t k, unsigned threads) {
  if (k == 0) throw std::invalid_argument("k must be at least 1");
  return NeighborSearcher(model, threads).all_neighbors(model.rank_of(query), k);
}

StableNeighbors stable_neighbors(const EmbeddingModel& model, std::string_view query,
                                 const SearchConfig& cfg, unsigned threads) {
  return NeighborSearcher(model, threads).stable_neighbors(model.rank_of(query), cfg);
}

}  // namespace polyscope
