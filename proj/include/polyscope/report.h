#pragma once

// Text renderings used by the command-line tool. TSV output prints reals with
// four decimals; JSON carries full double precision.

#include <ostream>
#include <string>
#include <string_view>

#include "polyscope/model_io.h"
#include "polyscope/neighborhood.h"
#include "polyscope/polysemy.h"

namespace polyscope {

enum class OutputFormat { kTsv, kJson };
OutputFormat parse_output_format(std::string_view name);

std::string fixed4(double x);

std::string_view reason_name(UndefinedSu r);
std::string_view reason_name(UntestableReason r);
std::string insufficient_message(const Insufficient& miss, const SearchConfig& cfg);

/// "poly", "mono" or "untestable" (batch vocabulary).
std::string_view batch_label(const Verdict& v);
/// "polysemic", "not-detected" or "untestable: <reason>".
std::string test_label(const Verdict& v);

void write_neighbors(std::ostream& out, const EmbeddingModel& model, const NeighborList& list,
                     OutputFormat fmt);
void write_su(std::ostream& out, const EmbeddingModel& model, const UniformityRecord& rec,
              OutputFormat fmt);
void write_test(std::ostream& out, const EmbeddingModel& model, const PolysemyResult& res,
                OutputFormat fmt);
/// TSV: header plus one row per word. JSON: one object per line per word.
void write_batch(std::ostream& out, const EmbeddingModel& model, const SearchConfig& cfg,
                 const BatchReport& report, OutputFormat fmt);
std::string summary_line(const BatchSummary& s);

}  // namespace polyscope
