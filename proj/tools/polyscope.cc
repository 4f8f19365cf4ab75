// polyscope: polysemy detection from word embedding neighborhoods.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "polyscope/corpus_stats.h"
#include "polyscope/evaluation.h"
#include "polyscope/model_io.h"
#include "polyscope/neighborhood.h"
#include "polyscope/polysemy.h"
#include "polyscope/report.h"

namespace {

using namespace polyscope;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitUntestable = 2;

struct RunConfig {
  std::string model_path;
  std::string format = "auto";
  SearchConfig search;
  std::string output = "tsv";
  std::string counts_path;
  unsigned threads = 0;

  void validate() const {
    if (model_path.empty()) throw std::invalid_argument("--model is required");
    parse_model_format(format);
    parse_output_format(output);
    search.validate();
  }

  OutputFormat output_format() const { return parse_output_format(output); }

  EmbeddingModel load() const {
    auto model = load_model(model_path, parse_model_format(format));
    if (!counts_path.empty()) model = model.reranked(load_count_file(counts_path));
    search.validate_for(model);
    return model;
  }
};

void add_run_options(CLI::App* cmd, RunConfig& rc) {
  cmd->add_option("--model", rc.model_path, "word2vec model file");
  cmd->add_option("--format", rc.format, "model format: text, binary or auto")
      ->capture_default_str();
  cmd->add_option("--limit", rc.search.limit, "number of most frequent (stable) words")
      ->capture_default_str();
  cmd->add_option("--neighbors", rc.search.n_neighbors, "neighbors per word (N)")
      ->capture_default_str();
  cmd->add_option("--scope", rc.search.scope, "nearest words inspected for stable neighbors")
      ->capture_default_str();
  cmd->add_option("--sigma-k", rc.search.sigma_k, "outlier threshold multiplier")
      ->capture_default_str();
  cmd->add_option("--output", rc.output, "output format: tsv or json")->capture_default_str();
  cmd->add_option("--counts", rc.counts_path, "token<TAB>count file overriding ranks");
  cmd->add_option("--threads", rc.threads, "worker threads, 0 = auto")->capture_default_str();
}

std::string read_all(const std::string& path) {
  if (path == "-") {
    return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int cmd_neighbors(const RunConfig& rc, const std::string& word) {
  rc.validate();
  const auto model = rc.load();
  NeighborSearcher searcher(model, rc.threads);
  auto found = searcher.stable_neighbors(model.rank_of(word), rc.search);
  if (const auto* miss = std::get_if<Insufficient>(&found)) {
    std::cerr << word << ": " << insufficient_message(*miss, rc.search) << '\n';
    return kExitUntestable;
  }
  write_neighbors(std::cout, model, std::get<NeighborList>(found), rc.output_format());
  return kExitOk;
}

int cmd_su(const RunConfig& rc, const std::string& word) {
  rc.validate();
  const auto model = rc.load();
  PolysemyAnalyzer analyzer(model, rc.search, rc.threads);
  const auto& rec = analyzer.surrounding_uniformity(model.rank_of(word));
  write_su(std::cout, model, rec, rc.output_format());
  return rec.defined() ? kExitOk : kExitUntestable;
}

int cmd_test(const RunConfig& rc, const std::string& word) {
  rc.validate();
  const auto model = rc.load();
  PolysemyAnalyzer analyzer(model, rc.search, rc.threads);
  const auto res = analyzer.test(model.rank_of(word));
  write_test(std::cout, model, res, rc.output_format());
  return res.verdict.kind() == Verdict::Kind::kUntestable ? kExitUntestable : kExitOk;
}

int cmd_batch(const RunConfig& rc) {
  rc.validate();
  const auto model = rc.load();
  const auto report = batch_analyze(model, rc.search, rc.threads);
  write_batch(std::cout, model, rc.search, report, rc.output_format());
  std::cerr << summary_line(report.summary) << '\n';
  return kExitOk;
}

FrequencyTable count_input(const std::string& path, bool lowercase, unsigned threads) {
  if (threads == 1) {
    if (path == "-") return count_corpus(std::cin, lowercase);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    return count_corpus(in, lowercase);
  }
  return count_buffer(read_all(path), lowercase, resolve_threads(threads));
}

int cmd_count(const std::string& corpus, bool lowercase, unsigned threads,
              const std::string& bigram_path) {
  const auto table = count_input(corpus, lowercase, threads);
  write_unigram_tsv(std::cout, table);
  if (!bigram_path.empty()) {
    std::ofstream out(bigram_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + bigram_path);
    write_bigram_tsv(out, table);
  }
  std::cerr << "tokens=" << table.total_tokens << " types=" << table.unigram.size()
            << " bigrams=" << table.bigram.size() << '\n';
  return kExitOk;
}

int cmd_pair(const std::string& corpus, bool lowercase, unsigned threads,
             const std::string& name, const std::string& follower, const std::string& output) {
  const auto fmt = parse_output_format(output);
  const auto table = count_input(corpus, lowercase, threads);
  const auto r = followed_by_ratio(table, name, follower);
  if (fmt == OutputFormat::kJson) {
    std::cout << nlohmann::json{{"name", name},
                                {"follower", follower},
                                {"name_count", r.name_count},
                                {"pair_count", r.pair_count},
                                {"ratio", r.ratio}}
                     .dump()
              << '\n';
  } else {
    char ratio[32];
    std::snprintf(ratio, sizeof ratio, "%.6f", r.ratio);
    std::cout << name << '\t' << r.name_count << '\t' << name << ' ' << follower << '\t'
              << r.pair_count << '\t' << ratio << '\n';
  }
  return kExitOk;
}

int cmd_eval(const std::string& labels_path, double alpha, const std::string& output) {
  const auto fmt = parse_output_format(output);
  chi_square_critical_1df(alpha);
  std::ifstream in(labels_path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + labels_path);
  const auto labels = read_labels(in);
  const auto m = confusion(labels);
  std::optional<ChiSquareResult> chi;
  std::string chi_error;
  try {
    chi = chi_square_yates(m, alpha);
  } catch (const std::domain_error& e) {
    chi_error = e.what();
  }
  if (fmt == OutputFormat::kJson) {
    nlohmann::json j{{"matrix", m.counts}, {"alpha", alpha}};
    if (chi) {
      j["statistic"] = chi->statistic;
      j["critical"] = chi->critical;
      j["significant"] = chi->significant;
    } else {
      j["statistic"] = nullptr;
      j["error"] = chi_error;
    }
    std::cout << j.dump() << '\n';
  } else {
    std::cout << "human\\computer\tmono\tpoly\ttotal\n";
    for (Label h : {Label::kMono, Label::kPoly}) {
      std::cout << label_name(h) << '\t' << m.at(h, Label::kMono) << '\t'
                << m.at(h, Label::kPoly) << '\t' << m.row_total(h) << '\n';
    }
    std::cout << "total\t" << m.column_total(Label::kMono) << '\t'
              << m.column_total(Label::kPoly) << '\t' << m.total() << '\n';
    if (chi) {
      std::cout << "chi2_yates\t" << fixed4(chi->statistic) << '\n'
                << "critical\t" << fixed4(chi->critical) << '\n'
                << "significant\t" << (chi->significant ? "yes" : "no") << '\n';
    } else {
      std::cout << "chi2_yates\tundefined: " << chi_error << '\n';
    }
  }
  return kExitOk;
}

int cmd_convert(const std::string& in_path, const std::string& in_format,
                const std::string& out_path, const std::string& to) {
  const auto target = parse_model_format(to);
  if (target == ModelFormat::kAuto) throw std::invalid_argument("--to must be text or binary");
  const auto model = load_model(in_path, parse_model_format(in_format));
  if (target == ModelFormat::kText) {
    save_text_model(out_path, model);
  } else {
    save_binary_model(out_path, model);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Detect polysemic words from word2vec embedding neighborhoods"};
  app.require_subcommand(1);

  RunConfig rc;
  std::string word;
  std::string batch_model;

  auto* neighbors = app.add_subcommand("neighbors", "stable neighbors of a word");
  add_run_options(neighbors, rc);
  neighbors->add_option("word", word)->required();

  auto* su = app.add_subcommand("su", "surrounding uniformity of a word");
  add_run_options(su, rc);
  su->add_option("word", word)->required();

  auto* test = app.add_subcommand("test", "polysemy test for one word");
  add_run_options(test, rc);
  test->add_option("word", word)->required();

  auto* batch = app.add_subcommand("batch", "test every stable word");
  add_run_options(batch, rc);
  batch->add_option("model_file", batch_model, "model file (alternative to --model)");

  std::string corpus;
  bool lowercase = false;
  unsigned count_threads = 1;
  std::string bigram_path;
  auto* count = app.add_subcommand("count", "unigram counts of a token stream");
  count->add_option("corpus", corpus, "whitespace-tokenized text, - for stdin")->required();
  count->add_flag("--lowercase", lowercase, "fold ASCII upper case before counting");
  count->add_option("--threads", count_threads, "worker threads, 0 = auto")
      ->capture_default_str();
  count->add_option("--bigrams", bigram_path, "also write bigram counts to this file");

  std::string name, follower, pair_output = "tsv";
  auto* pair = app.add_subcommand("pair", "how often a name is followed by a word");
  pair->add_option("corpus", corpus)->required();
  pair->add_option("name", name)->required();
  pair->add_option("follower", follower)->required();
  pair->add_flag("--lowercase", lowercase);
  pair->add_option("--threads", count_threads)->capture_default_str();
  pair->add_option("--output", pair_output)->capture_default_str();

  std::string labels_path, eval_output = "tsv";
  double alpha = 0.05;
  auto* eval = app.add_subcommand("eval", "confusion matrix and Yates chi-square");
  eval->add_option("labels", labels_path, "word<TAB>human<TAB>computer")->required();
  eval->add_option("--alpha", alpha, "0.05 or 0.01")->capture_default_str();
  eval->add_option("--output", eval_output)->capture_default_str();

  std::string in_path, out_path, in_format = "auto", to;
  auto* convert = app.add_subcommand("convert", "convert between text and binary models");
  convert->add_option("input", in_path)->required();
  convert->add_option("output", out_path)->required();
  convert->add_option("--format", in_format)->capture_default_str();
  convert->add_option("--to", to, "text or binary")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (*neighbors) return cmd_neighbors(rc, word);
    if (*su) return cmd_su(rc, word);
    if (*test) return cmd_test(rc, word);
    if (*batch) {
      if (!batch_model.empty()) {
        if (!rc.model_path.empty() && rc.model_path != batch_model) {
          throw std::invalid_argument("model given both positionally and with --model");
        }
        rc.model_path = batch_model;
      }
      return cmd_batch(rc);
    }
    if (*count) return cmd_count(corpus, lowercase, count_threads, bigram_path);
    if (*pair) return cmd_pair(corpus, lowercase, count_threads, name, follower, pair_output);
    if (*eval) return cmd_eval(labels_path, alpha, eval_output);
    if (*convert) return cmd_convert(in_path, in_format, out_path, to);
  } catch (const std::exception& e) {
    std::cerr << "polyscope: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
