#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "treelab/ba_sim.hpp"
#include "treelab/ce_sim.hpp"
#include "treelab/stats.hpp"

namespace treelab {

// Output schema, versioned: downstream plotting relies on these exact bytes.
inline constexpr const char* kPhaseCsvHeader = "lambda,d,depth,trials,estimate,ci_lo,ci_hi,seed";

enum class OutputFormat { csv, jsonl };
OutputFormat parse_output_format(const std::string& text);

// Shortest round-trippable decimal representation.
std::string format_double(double v);

std::string phase_csv_row(const PhasePoint& p);
std::string phase_json_row(const PhasePoint& p);

void write_phase_table(std::ostream& out, const std::vector<PhasePoint>& rows, OutputFormat fmt);

std::string trial_json_row(const TrialOutcome& o, std::uint64_t trial_index);
std::string ba_trial_json_row(const BaOutcome& o, std::uint64_t trial_index);

// One-integer-per-line sample file (tail estimator input).
std::vector<std::uint64_t> read_sample_file(std::istream& in);

}  // namespace treelab
