#include "polyscope/evaluation.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace polyscope {

Label parse_label(std::string_view s) {
  if (s == "mono") return Label::kMono;
  if (s == "poly") return Label::kPoly;
  throw std::invalid_argument("label must be mono or poly, got \"" + std::string(s) + "\"");
}

std::string_view label_name(Label l) { return l == Label::kMono ? "mono" : "poly"; }

std::uint64_t ConfusionMatrix2x2::row_total(Label human) const {
  const auto& row = counts[static_cast<int>(human)];
  return row[0] + row[1];
}

std::uint64_t ConfusionMatrix2x2::column_total(Label computer) const {
  const int c = static_cast<int>(computer);
  return counts[0][c] + counts[1][c];
}

std::uint64_t ConfusionMatrix2x2::total() const {
  return row_total(Label::kMono) + row_total(Label::kPoly);
}

ConfusionMatrix2x2 confusion(std::span<const LabeledWord> labels) {
  ConfusionMatrix2x2 m;
  for (const auto& l : labels) ++m.counts[static_cast<int>(l.human)][static_cast<int>(l.computer)];
  return m;
}

double chi_square_critical_1df(double alpha) {
  if (alpha == 0.05) return 3.841458820694124;
  if (alpha == 0.01) return 6.634896601021214;
  throw std::invalid_argument("supported significance levels are 0.05 and 0.01");
}

ChiSquareResult chi_square_yates(const ConfusionMatrix2x2& m, double alpha) {
  ChiSquareResult res;
  res.critical = chi_square_critical_1df(alpha);
  const double n = double(m.total());
  for (Label l : {Label::kMono, Label::kPoly}) {
    if (m.row_total(l) == 0 || m.column_total(l) == 0) {
      throw std::domain_error("chi-square undefined: a marginal total is zero");
    }
  }
  for (Label h : {Label::kMono, Label::kPoly}) {
    for (Label c : {Label::kMono, Label::kPoly}) {
      const double expected = double(m.row_total(h)) * double(m.column_total(c)) / n;
      const double dev = std::max(std::abs(double(m.at(h, c)) - expected) - 0.5, 0.0);
      res.statistic += dev * dev / expected;
    }
  }
  res.significant = res.statistic > res.critical;
  return res;
}

std::vector<LabeledWord> read_labels(std::istream& in) {
  std::vector<LabeledWord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, '\t');) fields.push_back(f);
    if (fields.size() != 3 || fields[0].empty()) {
      throw std::invalid_argument("labels line " + std::to_string(line_no) +
                                  ": expected word<TAB>human<TAB>computer");
    }
    try {
      out.push_back({fields[0], parse_label(fields[1]), parse_label(fields[2])});
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("labels line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace polyscope
