// Acceptance suite: one line per criterion, non-zero exit if any fails.

#include <bit>
#include <chrono>
#include <unordered_set>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "polyscope/corpus_stats.h"
#include "polyscope/evaluation.h"
#include "polyscope/model_io.h"
#include "polyscope/neighborhood.h"
#include "polyscope/polysemy.h"
#include "polyscope/report.h"
#include "polyscope/vector_ops.h"
#include "synthetic_fixture.h"
#include "test_util.h"

namespace {

using namespace polyscope;

struct Outcome {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(6);
  s << x;
  return s.str();
}

// 1. Outlier arithmetic against the worked examples.
Outcome test_arithmetic() {
  Outcome o;
  auto may = outlier_stats(std::vector<double>{0.9252, 0.9232, 0.9179, 0.9266}, 3.0);
  o.check(near(may.mean, 0.9232, 5e-4), "may: m = " + fmt(may.mean));
  o.check(near(may.sigma, 0.0038, 5e-4), "may: sigma = " + fmt(may.sigma));
  o.check(near(may.threshold, 0.9118, 1e-3), "may: threshold = " + fmt(may.threshold));
  o.check(classify(0.8917, may) == Verdict::polysemic(), "may: not polysemic");

  auto might = outlier_stats(std::vector<double>{0.9266, 0.9290, 0.9232, 0.9224}, 3.0);
  o.check(near(might.threshold, 0.9157, 1e-3), "might: threshold = " + fmt(might.threshold));
  o.check(classify(0.9179, might) == Verdict::not_detected(), "might: detected");

  auto august = outlier_stats(std::vector<double>{0.9804, 0.9804, 0.9814, 0.9810}, 3.0);
  o.check(near(august.mean, 0.9808, 5e-5), "august: m = " + fmt(august.mean));
  o.check(near(august.sigma, 0.0005, 5e-5), "august: sigma = " + fmt(august.sigma));
  o.check(near(august.threshold, 0.9793, 1e-3), "august: threshold = " + fmt(august.threshold));
  o.check(classify(0.9802, august) == Verdict::not_detected(), "august: detected");
  // The same decision straight from the stated m and sigma.
  TestStatistics stated{{}, 0.9808, 0.0005, 0.9808 - 3 * 0.0005};
  o.check(classify(0.9802, stated) == Verdict::not_detected(), "august (stated): detected");
  if (o.pass) {
    o.detail = "may m=" + fmt(may.mean) + " sigma=" + fmt(may.sigma) + " thr=" +
               fmt(may.threshold) + "; might thr=" + fmt(might.threshold) +
               "; august thr=" + fmt(august.threshold);
  }
  return o;
}

// Applies an even number of random Householder reflections (a rotation).
struct RandomRotation {
  std::vector<std::vector<double>> normals;

  RandomRotation(std::mt19937_64& rng, std::size_t dim) {
    std::normal_distribution<double> g;
    for (int k = 0; k < 4; ++k) {
      std::vector<double> n(dim);
      double len = 0;
      for (auto& x : n) {
        x = g(rng);
        len += x * x;
      }
      len = std::sqrt(len);
      for (auto& x : n) x /= len;
      normals.push_back(std::move(n));
    }
  }

  std::vector<double> apply(std::vector<double> v) const {
    for (const auto& n : normals) {
      double d = 0;
      for (std::size_t i = 0; i < v.size(); ++i) d += n[i] * v[i];
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= 2 * d * n[i];
    }
    return v;
  }
};

// 2. Uniformity property suite.
Outcome test_uniformity_properties() {
  Outcome o;
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> scale(0.01, 50.0);
  std::size_t collinear = 0, generic = 0, degenerate = 0;
  for (int t = 0; t < 10000 && o.pass; ++t) {
    const std::size_t dim = 2 + rng() % 255;
    const std::size_t size = 2 + rng() % 15;
    const int kind = t % 3;  // 0 generic, 1 positive scalings, 2 exact cancellation
    std::vector<std::vector<double>> vs;
    if (kind == 1) {
      std::vector<double> dir(dim);
      for (auto& x : dir) x = g(rng);
      for (std::size_t i = 0; i < size; ++i) {
        const double s = scale(rng);
        std::vector<double> v(dim);
        for (std::size_t k = 0; k < dim; ++k) v[k] = s * dir[k];
        vs.push_back(std::move(v));
      }
    } else {
      for (std::size_t i = 0; i < size; ++i) {
        std::vector<double> v(dim);
        for (auto& x : v) x = g(rng);
        vs.push_back(std::move(v));
      }
      if (kind == 2) {
        // Append the negated sum in two halves of a power-of-two split, so
        // the resultant is exactly zero.
        std::vector<double> sum(dim, 0.0);
        for (const auto& v : vs)
          for (std::size_t k = 0; k < dim; ++k) sum[k] += v[k];
        vs.clear();
        std::vector<double> half(dim), neg(dim);
        for (std::size_t k = 0; k < dim; ++k) {
          half[k] = sum[k] / 2;
          neg[k] = -sum[k];
        }
        vs = {half, half, neg};
      }
    }
    const auto u = uniformity(vs);
    if (kind == 2) {
      o.check(!u.has_value(), "cancelling set not reported degenerate");
      ++degenerate;
      continue;
    }
    o.check(u.has_value(), "unexpected degenerate set");
    if (!u) break;
    const double val = u->value();
    o.check(val > 0.0 && val <= 1.0, "uniformity out of (0,1]: " + fmt(val));
    if (kind == 1) {
      o.check(near(val, 1.0, 1e-12), "positive scalings gave " + fmt(val));
      ++collinear;
    } else {
      o.check(val < 1.0 - 1e-12, "non-collinear set reached 1");
      ++generic;
    }
    RandomRotation rot(rng, dim);
    std::vector<std::vector<double>> rotated;
    for (const auto& v : vs) rotated.push_back(rot.apply(v));
    const auto ur = uniformity(rotated);
    o.check(ur && near(ur->value(), val, 1e-9), "rotation changed uniformity");
  }
  if (o.pass) {
    o.detail = std::to_string(generic) + " generic, " + std::to_string(collinear) +
               " collinear, " + std::to_string(degenerate) + " degenerate sets";
  }
  return o;
}

// 3. Parallel stable-neighbor search against the serial exhaustive oracle.
Outcome test_neighbor_oracle() {
  Outcome o;
  std::mt19937_64 rng(31337);
  std::size_t queries = 0;
  for (int t = 0; t < 1000 && o.pass; ++t) {
    const std::size_t vocab = 6 + rng() % 195;
    auto m = testing::random_model(rng, vocab, 2 + rng() % 12, t % 2 == 0);
    SearchConfig cfg;
    cfg.n_neighbors = 2 + rng() % 4;
    cfg.scope = cfg.n_neighbors + rng() % 30;
    cfg.limit = std::min(vocab, cfg.n_neighbors + 1 + rng() % vocab);
    if (cfg.limit < cfg.n_neighbors + 1) continue;
    NeighborSearcher parallel(m, 2 + rng() % 7, 1 + rng() % 16);
    for (std::size_t q = 0; q < vocab; ++q) {
      ++queries;
      if (!(parallel.stable_neighbors(q, cfg) == testing::exhaustive_stable(m, q, cfg))) {
        o.check(false, "mismatch: model " + std::to_string(t) + " query " + std::to_string(q));
        break;
      }
    }
  }
  if (o.pass) o.detail = std::to_string(queries) + " queries over 1000 models";
  return o;
}

// 4. Two clusters plus one interpolated word.
Outcome test_synthetic_detection() {
  Outcome o;
  auto m = testing::two_cluster_model();
  auto report = batch_analyze(m, testing::two_cluster_config(), 2);
  std::vector<std::string> flagged;
  for (const auto& row : report.rows) {
    if (row.verdict == Verdict::polysemic()) flagged.push_back(m.token(row.record.word));
  }
  o.check(flagged == std::vector<std::string>{"p"}, "flagged set differs");
  const auto& p = report.rows[m.rank_of("p")];
  o.check(p.record.defined() && near(p.record.value(), testing::kSuP, 1e-9),
          "SU(p) differs from reference");
  o.check(p.stats && near(p.stats->threshold, testing::kThresholdP, 1e-9),
          "threshold(p) differs from reference");
  if (o.pass) {
    o.detail = "flagged {p}; SU(p)=" + fmt(p.record.value()) +
               " < threshold " + fmt(p.stats->threshold);
  }
  return o;
}

// 5. Yates chi-square on the agreement table.
Outcome test_chi_square() {
  Outcome o;
  ConfusionMatrix2x2 m;
  m.counts = {{{19, 1}, {1, 3}}};
  auto r = chi_square_yates(m, 0.05);
  o.check(near(r.statistic, 7.26, 0.05), "statistic = " + fmt(r.statistic));
  o.check(r.significant, "not significant at 0.05");
  if (o.pass) o.detail = "statistic=" + fmt(r.statistic) + " > " + fmt(r.critical);
  return o;
}

bool bitwise_equal(const EmbeddingModel& a, const EmbeddingModel& b) {
  if (a.tokens() != b.tokens() || a.dim() != b.dim()) return false;
  for (std::size_t r = 0; r < a.vocab_size(); ++r) {
    auto x = a.vector(r), y = b.vector(r);
    if (std::memcmp(x.data(), y.data(), x.size_bytes()) != 0) return false;
  }
  return true;
}

// 6. Binary <-> text conversion of random models.
Outcome test_round_trip() {
  Outcome o;
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<int> byte(0x21, 0xFF);  // no whitespace
  std::uniform_int_distribution<std::uint32_t> bits;
  for (int t = 0; t < 100 && o.pass; ++t) {
    const std::size_t vocab = 1 + rng() % 60, dim = 1 + rng() % 64;
    std::vector<std::string> tokens;
    std::unordered_set<std::string> seen;
    while (tokens.size() < vocab) {
      std::string tok(1 + rng() % 12, ' ');
      for (auto& c : tok) c = static_cast<char>(byte(rng));
      if (seen.insert(tok).second) tokens.push_back(tok);
    }
    std::vector<float> values;
    for (std::size_t i = 0; i < vocab * dim; ++i) {
      float f;
      do {
        // Arbitrary finite bit patterns, including subnormals.
        f = std::bit_cast<float>(bits(rng));
      } while (!std::isfinite(f));
      values.push_back(f);
    }
    for (std::size_t r = 0; r < vocab; ++r) values[r * dim] = 1.0f + float(r);
    EmbeddingModel src(tokens, values, dim);

    std::stringstream bin(std::ios::in | std::ios::out | std::ios::binary);
    write_binary_model(bin, src);
    auto from_bin = read_binary_model(bin);
    std::stringstream txt;
    write_text_model(txt, from_bin);
    auto from_txt = read_text_model(txt);
    std::stringstream bin2(std::ios::in | std::ios::out | std::ios::binary);
    write_binary_model(bin2, from_txt);
    o.check(bitwise_equal(src, from_bin), "binary round-trip differs, model " + std::to_string(t));
    o.check(bitwise_equal(src, from_txt), "text round-trip differs, model " + std::to_string(t));
    o.check(bin.str() == bin2.str(), "binary bytes differ after text pass");
  }
  if (o.pass) o.detail = "100 models, bitwise equal";
  return o;
}

// 7. Regression against the pinned fixture's golden report.
Outcome test_fixture_regression() {
  Outcome o;
  const std::string data = std::string(POLYSCOPE_SOURCE_DIR) + "/tests/";
  auto m = load_model(data + "data/fixture_model.txt");
  SearchConfig cfg{.n_neighbors = 4, .limit = 56, .scope = 12, .sigma_k = 3.0};
  auto report = batch_analyze(m, cfg, 0);
  std::ostringstream out;
  write_batch(out, m, cfg, report, OutputFormat::kTsv);
  std::ifstream golden(data + "golden/batch.tsv", std::ios::binary);
  std::stringstream expect;
  expect << golden.rdbuf();
  o.check(out.str() == expect.str(), "batch report differs from golden");
  const auto& may = report.rows[m.rank_of("may")];
  o.check(may.verdict == Verdict::polysemic(), "fixture 'may' not polysemic");
  o.check(report.rows[m.rank_of("might")].verdict == Verdict::not_detected(),
          "fixture 'might' detected");
  if (o.pass) {
    o.detail = "golden report reproduced, " + summary_line(report.summary) +
               " (full-corpus reproduction: scripts/reproduce_fil9.sh)";
  }
  return o;
}

// 8. Corpus counting against a naive oracle; FIL9 counts when available.
Outcome test_counting() {
  Outcome o;
  std::mt19937_64 rng(88);
  const std::vector<std::string> vocab{"james", "river", "john", "the", "of", "Name", "x"};
  for (int t = 0; t < 200 && o.pass; ++t) {
    std::vector<std::string> toks(rng() % 2000);
    std::string text;
    for (auto& tok : toks) {
      tok = vocab[rng() % vocab.size()];
      text += tok + ((rng() % 5 == 0) ? "\n" : " ");
    }
    FrequencyTable expect;
    for (std::size_t i = 0; i < toks.size(); ++i) {
      ++expect.unigram[toks[i]];
      if (i + 1 < toks.size()) ++expect.bigram[{toks[i], toks[i + 1]}];
    }
    expect.total_tokens = toks.size();
    std::istringstream in(text);
    o.check(count_corpus(in, false) == expect, "streaming count differs");
    o.check(count_buffer(text, false, 1 + rng() % 8) == expect, "chunked count differs");
  }
  std::string detail = "200 random streams match the naive count";
  if (const char* fil9 = std::getenv("POLYSCOPE_FIL9")) {
    std::ifstream in(fil9, std::ios::binary);
    auto table = count_corpus(in, false);
    o.check(table.count("james") == 27678, "james = " + std::to_string(table.count("james")));
    o.check(table.count("james", "river") == 202,
            "james river = " + std::to_string(table.count("james", "river")));
    o.check(table.count("richard", "river") == 0, "richard river is nonzero");
    detail += "; FIL9 james, james river, richard river checked";
  } else {
    detail += "; FIL9 check skipped (POLYSCOPE_FIL9 unset)";
  }
  if (o.pass) o.detail = detail;
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"AC1 outlier-test arithmetic (may/might/august)", test_arithmetic},
      {"AC2 uniformity properties (10000 sets)", test_uniformity_properties},
      {"AC3 neighbor search vs exhaustive oracle (1000 models)", test_neighbor_oracle},
      {"AC4 synthetic interpolated-word detection", test_synthetic_detection},
      {"AC5 Yates chi-square on agreement table", test_chi_square},
      {"AC6 binary/text round-trip (100 models)", test_round_trip},
      {"AC7 pinned fixture regression", test_fixture_regression},
      {"AC8 corpus counting", test_counting},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - start)
                        .count();
    std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << name << " (" << ms << " ms): " << o.detail
              << '\n';
    failed += !o.pass;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " failed") << '\n';
  return failed == 0 ? 0 : 1;
}
