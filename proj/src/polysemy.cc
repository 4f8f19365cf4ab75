#include "polyscope/polysemy.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace polyscope {

namespace {

UniformityRecord compute_record(const EmbeddingModel& model, std::size_t word,
                                const SearchConfig& cfg, const NeighborSearcher& searcher) {
  UniformityRecord rec;
  rec.word = word;
  auto found = searcher.stable_neighbors(word, cfg);
  if (const auto* miss = std::get_if<Insufficient>(&found)) {
    rec.su = miss->reason == InsufficientReason::kQueryNotStable
                 ? UndefinedSu::kQueryNotStable
                 : UndefinedSu::kInsufficientNeighbors;
    rec.found = miss->found;
    return rec;
  }
  rec.neighbors = std::get<NeighborList>(found).neighbors;

  // Sum in rank order so that words sharing one neighborhood get bit-identical
  // SU values regardless of which member is the query.
  std::vector<std::size_t> members{word};
  for (const auto& nb : rec.neighbors) members.push_back(nb.rank);
  std::sort(members.begin(), members.end());
  std::vector<std::span<const float>> vecs;
  vecs.reserve(members.size());
  for (std::size_t r : members) vecs.push_back(model.vector(r));

  if (auto u = uniformity(std::span<const std::span<const float>>(vecs))) {
    rec.su = *u;
  } else {
    rec.su = UndefinedSu::kDegenerate;
  }
  rec.found = rec.neighbors.size();
  return rec;
}

}  // namespace

TestStatistics outlier_stats(std::span<const double> neighbor_sus, double sigma_k) {
  if (neighbor_sus.size() < 2) {
    throw std::invalid_argument("outlier statistics need at least two values");
  }
  for (double x : neighbor_sus) {
    if (!(x > 0.0 && x <= 1.0)) throw std::invalid_argument("SU values must lie in (0, 1]");
  }
  TestStatistics st;
  st.neighbor_sus.assign(neighbor_sus.begin(), neighbor_sus.end());
  const auto [lo, hi] = std::minmax_element(neighbor_sus.begin(), neighbor_sus.end());
  if (*lo == *hi) {
    // Exact zero dispersion; avoid a rounding residue in the mean.
    st.mean = *lo;
    st.sigma = 0.0;
  } else {
    double sum = 0.0;
    for (double x : neighbor_sus) sum += x;
    st.mean = sum / double(neighbor_sus.size());
    double sq = 0.0;
    for (double x : neighbor_sus) sq += (x - st.mean) * (x - st.mean);
    st.sigma = std::sqrt(sq / double(neighbor_sus.size() - 1));
  }
  st.threshold = st.mean - sigma_k * st.sigma;
  return st;
}

Verdict classify(double su, const TestStatistics& stats) {
  if (stats.sigma == 0.0) return Verdict::untestable(UntestableReason::kZeroVariance);
  return su < stats.threshold ? Verdict::polysemic() : Verdict::not_detected();
}

PolysemyAnalyzer::PolysemyAnalyzer(const EmbeddingModel& model, SearchConfig cfg,
                                   unsigned threads)
    : model_(model),
      cfg_(cfg),
      threads_(resolve_threads(threads)),
      searcher_(model, threads_),
      cache_(model.vocab_size()),
      once_(std::make_unique<std::once_flag[]>(model.vocab_size())) {
  cfg_.validate_for(model_);
}

const UniformityRecord& PolysemyAnalyzer::memoized(std::size_t word,
                                                   const NeighborSearcher& searcher) const {
  if (word >= model_.vocab_size()) throw std::out_of_range("word rank out of range");
  std::call_once(once_[word], [&] { cache_[word] = compute_record(model_, word, cfg_, searcher); });
  return *cache_[word];
}

const UniformityRecord& PolysemyAnalyzer::surrounding_uniformity(std::size_t word) const {
  return memoized(word, searcher_);
}

PolysemyResult PolysemyAnalyzer::test_with(std::size_t word,
                                           const NeighborSearcher& searcher) const {
  PolysemyResult res;
  res.record = memoized(word, searcher);
  if (!res.record.defined()) {
    res.verdict = Verdict::untestable(UntestableReason::kUndefinedSuSelf);
    return res;
  }
  std::vector<double> sus;
  bool all_defined = true;
  for (const auto& nb : res.record.neighbors) {
    const auto& nrec = memoized(nb.rank, searcher);
    res.neighbor_records.push_back(nrec);
    if (nrec.defined()) {
      sus.push_back(nrec.value());
    } else {
      all_defined = false;
    }
  }
  if (!all_defined) {
    res.verdict = Verdict::untestable(UntestableReason::kUndefinedSuNeighbor);
    return res;
  }
  res.stats = outlier_stats(sus, cfg_.sigma_k);
  res.verdict = classify(res.record.value(), *res.stats);
  return res;
}

PolysemyResult PolysemyAnalyzer::test(std::size_t word) const {
  return test_with(word, searcher_);
}

BatchReport PolysemyAnalyzer::batch() const {
  BatchReport report;
  report.rows.resize(cfg_.limit);
  if (threads_ <= 1) {
    for (std::size_t w = 0; w < cfg_.limit; ++w) report.rows[w] = test_with(w, searcher_);
  } else {
    // Parallel over words; each worker scans serially.
    const NeighborSearcher serial(model_, 1);
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> workers;
    for (unsigned t = 0; t < threads_; ++t) {
      workers.emplace_back([&] {
        for (std::size_t w = next++; w < cfg_.limit; w = next++) {
          report.rows[w] = test_with(w, serial);
        }
      });
    }
  }
  for (const auto& row : report.rows) {
    switch (row.verdict.kind()) {
      case Verdict::Kind::kPolysemic: ++report.summary.poly; break;
      case Verdict::Kind::kNotDetected: ++report.summary.mono; break;
      case Verdict::Kind::kUntestable: ++report.summary.untestable; break;
    }
  }
  return report;
}

UniformityRecord surrounding_uniformity(const EmbeddingModel& model, std::string_view word,
                                        const SearchConfig& cfg) {
  const std::size_t rank = model.rank_of(word);
  return PolysemyAnalyzer(model, cfg).surrounding_uniformity(rank);
}

PolysemyResult polysemy_test(const EmbeddingModel& model, std::string_view word,
                             const SearchConfig& cfg, unsigned threads) {
  const std::size_t rank = model.rank_of(word);
  return PolysemyAnalyzer(model, cfg, threads).test(rank);
}

BatchReport batch_analyze(const EmbeddingModel& model, const SearchConfig& cfg,
                          unsigned threads) {
  return PolysemyAnalyzer(model, cfg, threads).batch();
}

}  // namespace polyscope
