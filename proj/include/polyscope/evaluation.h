#pragma once

#include <array>
#include <cstdint>
#include <istream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace polyscope {

enum class Label { kMono = 0, kPoly = 1 };

Label parse_label(std::string_view s);
std::string_view label_name(Label l);

struct LabeledWord {
  std::string word;
  Label human;
  Label computer;
};

/// Rows are human judgments, columns computer verdicts (mono, poly).
struct ConfusionMatrix2x2 {
  std::array<std::array<std::uint64_t, 2>, 2> counts{};

  std::uint64_t at(Label human, Label computer) const {
    return counts[static_cast<int>(human)][static_cast<int>(computer)];
  }
  std::uint64_t row_total(Label human) const;
  std::uint64_t column_total(Label computer) const;
  std::uint64_t total() const;

  friend bool operator==(const ConfusionMatrix2x2&, const ConfusionMatrix2x2&) = default;
};

ConfusionMatrix2x2 confusion(std::span<const LabeledWord> labels);

struct ChiSquareResult {
  double statistic = 0.0;
  double critical = 0.0;
  bool significant = false;
};

/// Pearson chi-square with Yates' continuity correction on a 2x2 table,
/// 1 degree of freedom. Each cell contributes (max(|O - E| - 0.5, 0))^2 / E.
/// alpha must be 0.05 or 0.01. Throws std::domain_error on a zero marginal.
ChiSquareResult chi_square_yates(const ConfusionMatrix2x2& m, double alpha = 0.05);

/// Critical value of chi-square with 1 df at the given upper-tail alpha.
double chi_square_critical_1df(double alpha);

/// TSV "word<TAB>human<TAB>computer", labels mono|poly. Blank lines and lines
/// starting with '#' are ignored.
std::vector<LabeledWord> read_labels(std::istream& in);

}  // namespace polyscope
