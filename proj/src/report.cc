#include "polyscope/report.h"

#include <cstdio>
#include <stdexcept>

#include "json.hpp"

namespace polyscope {

namespace {

using nlohmann::json;

json neighbors_json(const EmbeddingModel& model, const std::vector<Neighbor>& nbs) {
  json arr = json::array();
  for (const auto& nb : nbs) {
    arr.push_back({{"token", model.token(nb.rank)}, {"rank", nb.rank}, {"cosine", nb.cosine}});
  }
  return arr;
}

json record_json(const EmbeddingModel& model, const UniformityRecord& rec) {
  json j{{"word", model.token(rec.word)},
         {"rank", rec.word},
         {"neighbors", neighbors_json(model, rec.neighbors)}};
  if (rec.defined()) {
    j["su"] = rec.value();
  } else {
    j["su"] = nullptr;
    j["undefined"] = reason_name(rec.reason());
    j["stable_found"] = rec.found;
  }
  return j;
}

json result_json(const EmbeddingModel& model, const PolysemyResult& res) {
  json j = record_json(model, res.record);
  json nsus = json::array();
  for (const auto& n : res.neighbor_records) {
    nsus.push_back(n.defined() ? json(n.value()) : json(nullptr));
  }
  j["neighbor_sus"] = nsus;
  if (res.stats) {
    j["mean"] = res.stats->mean;
    j["sigma"] = res.stats->sigma;
    j["threshold"] = res.stats->threshold;
  } else {
    j["mean"] = j["sigma"] = j["threshold"] = nullptr;
  }
  j["verdict"] = batch_label(res.verdict);
  j["reason"] = res.verdict.reason() ? json(reason_name(*res.verdict.reason())) : json(nullptr);
  return j;
}

std::string su_or_dash(const UniformityRecord& rec) {
  return rec.defined() ? fixed4(rec.value()) : "-";
}

}  // namespace

OutputFormat parse_output_format(std::string_view name) {
  if (name == "tsv") return OutputFormat::kTsv;
  if (name == "json") return OutputFormat::kJson;
  throw std::invalid_argument("unknown output format \"" + std::string(name) + "\"");
}

std::string fixed4(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", x);
  return buf;
}

std::string_view reason_name(UndefinedSu r) {
  switch (r) {
    case UndefinedSu::kQueryNotStable: return "query-not-stable";
    case UndefinedSu::kInsufficientNeighbors: return "insufficient-neighbors";
    case UndefinedSu::kDegenerate: return "degenerate";
  }
  return "?";
}

std::string_view reason_name(UntestableReason r) {
  switch (r) {
    case UntestableReason::kUndefinedSuSelf: return "undefined-su-self";
    case UntestableReason::kUndefinedSuNeighbor: return "undefined-su-neighbor";
    case UntestableReason::kZeroVariance: return "zero-variance";
  }
  return "?";
}

std::string insufficient_message(const Insufficient& miss, const SearchConfig& cfg) {
  if (miss.reason == InsufficientReason::kQueryNotStable) {
    return "insufficient: query-not-stable (not among the " + std::to_string(cfg.limit) +
           " most frequent words)";
  }
  return "insufficient: found " + std::to_string(miss.found) + " of " +
         std::to_string(cfg.n_neighbors) + " stable neighbors within scope " +
         std::to_string(cfg.scope);
}

std::string_view batch_label(const Verdict& v) {
  switch (v.kind()) {
    case Verdict::Kind::kPolysemic: return "poly";
    case Verdict::Kind::kNotDetected: return "mono";
    case Verdict::Kind::kUntestable: return "untestable";
  }
  return "?";
}

std::string test_label(const Verdict& v) {
  switch (v.kind()) {
    case Verdict::Kind::kPolysemic: return "polysemic";
    case Verdict::Kind::kNotDetected: return "not-detected";
    case Verdict::Kind::kUntestable:
      return "untestable: " + std::string(reason_name(*v.reason()));
  }
  return "?";
}

void write_neighbors(std::ostream& out, const EmbeddingModel& model, const NeighborList& list,
                     OutputFormat fmt) {
  if (fmt == OutputFormat::kJson) {
    out << json{{"word", model.token(list.query)},
                {"neighbors", neighbors_json(model, list.neighbors)}}
               .dump()
        << '\n';
    return;
  }
  for (const auto& nb : list.neighbors) {
    out << model.token(nb.rank) << '\t' << fixed4(nb.cosine) << '\n';
  }
}

void write_su(std::ostream& out, const EmbeddingModel& model, const UniformityRecord& rec,
              OutputFormat fmt) {
  if (fmt == OutputFormat::kJson) {
    out << record_json(model, rec).dump() << '\n';
    return;
  }
  out << "word\t" << model.token(rec.word) << '\n';
  out << "neighbors\t";
  for (std::size_t i = 0; i < rec.neighbors.size(); ++i) {
    out << (i ? " " : "") << model.token(rec.neighbors[i].rank);
  }
  out << '\n';
  if (rec.defined()) {
    out << "su\t" << fixed4(rec.value()) << '\n';
  } else {
    out << "su\tundefined: " << reason_name(rec.reason()) << '\n';
  }
}

void write_test(std::ostream& out, const EmbeddingModel& model, const PolysemyResult& res,
                OutputFormat fmt) {
  if (fmt == OutputFormat::kJson) {
    json j = result_json(model, res);
    j["verdict"] = test_label(res.verdict);
    out << j.dump() << '\n';
    return;
  }
  write_su(out, model, res.record, fmt);
  if (!res.neighbor_records.empty()) {
    out << "neighbor_su\t";
    for (std::size_t i = 0; i < res.neighbor_records.size(); ++i) {
      out << (i ? " " : "") << su_or_dash(res.neighbor_records[i]);
    }
    out << '\n';
  }
  if (res.stats) {
    out << "m\t" << fixed4(res.stats->mean) << '\n';
    out << "sigma\t" << fixed4(res.stats->sigma) << '\n';
    out << "threshold\t" << fixed4(res.stats->threshold) << '\n';
  }
  out << "verdict\t" << test_label(res.verdict) << '\n';
}

void write_batch(std::ostream& out, const EmbeddingModel& model, const SearchConfig& cfg,
                 const BatchReport& report, OutputFormat fmt) {
  if (fmt == OutputFormat::kJson) {
    for (const auto& row : report.rows) out << result_json(model, row).dump() << '\n';
    return;
  }
  out << "word";
  for (std::size_t i = 1; i <= cfg.n_neighbors; ++i) out << "\tneighbor_" << i << "\tsu_" << i;
  out << "\tsu\tm\tsigma\tthreshold\tverdict\treason\n";
  for (const auto& row : report.rows) {
    out << model.token(row.record.word);
    for (std::size_t i = 0; i < cfg.n_neighbors; ++i) {
      if (i < row.record.neighbors.size()) {
        out << '\t' << model.token(row.record.neighbors[i].rank) << '\t'
            << (i < row.neighbor_records.size() ? su_or_dash(row.neighbor_records[i]) : "-");
      } else {
        out << "\t-\t-";
      }
    }
    out << '\t' << su_or_dash(row.record);
    if (row.stats) {
      out << '\t' << fixed4(row.stats->mean) << '\t' << fixed4(row.stats->sigma) << '\t'
          << fixed4(row.stats->threshold);
    } else {
      out << "\t-\t-\t-";
    }
    out << '\t' << batch_label(row.verdict) << '\t';
    if (row.verdict.reason()) {
      out << reason_name(*row.verdict.reason());
      if (*row.verdict.reason() == UntestableReason::kUndefinedSuSelf) {
        out << ':' << reason_name(row.record.reason());
      }
    } else {
      out << '-';
    }
    out << '\n';
  }
}

std::string summary_line(const BatchSummary& s) {
  return "poly=" + std::to_string(s.poly) + " mono=" + std::to_string(s.mono) +
         " untestable=" + std::to_string(s.untestable);
}

}  // namespace polyscope
