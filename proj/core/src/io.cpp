#include "treelab/io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace treelab {

OutputFormat parse_output_format(const std::string& text) {
  if (text == "csv") return OutputFormat::csv;
  if (text == "jsonl") return OutputFormat::jsonl;
  throw std::invalid_argument("format must be csv or jsonl, got '" + text + "'");
}

std::string format_double(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string phase_csv_row(const PhasePoint& p) {
  std::string row;
  row += format_double(p.lambda);
  row += ',';
  row += format_double(p.d);  // empty for the BA process
  row += ',';
  row += std::to_string(p.depth);
  row += ',';
  row += std::to_string(p.trials);
  row += ',';
  row += format_double(p.estimate);
  row += ',';
  row += format_double(p.ci_lo);
  row += ',';
  row += format_double(p.ci_hi);
  row += ',';
  row += std::to_string(p.seed);
  return row;
}

std::string phase_json_row(const PhasePoint& p) {
  std::string row = "{\"process\":\"" + p.process + "\"";
  row += ",\"lambda\":" + format_double(p.lambda);
  if (!std::isnan(p.d)) row += ",\"d\":" + format_double(p.d);
  row += ",\"depth\":" + std::to_string(p.depth);
  row += ",\"trials\":" + std::to_string(p.trials);
  row += ",\"estimate\":" + format_double(p.estimate);
  row += ",\"ci_lo\":" + format_double(p.ci_lo);
  row += ",\"ci_hi\":" + format_double(p.ci_hi);
  row += ",\"seed\":" + std::to_string(p.seed);
  row += "}";
  return row;
}

void write_phase_table(std::ostream& out, const std::vector<PhasePoint>& rows,
                       OutputFormat fmt) {
  if (fmt == OutputFormat::csv) {
    out << kPhaseCsvHeader << '\n';
    for (const auto& p : rows) out << phase_csv_row(p) << '\n';
  } else {
    for (const auto& p : rows) out << phase_json_row(p) << '\n';
  }
}

std::string trial_json_row(const TrialOutcome& o, std::uint64_t trial_index) {
  std::string row = "{\"trial\":" + std::to_string(trial_index);
  row += ",\"progeny\":" + std::to_string(o.progeny);
  row += ",\"capped\":";
  row += o.capped ? "true" : "false";
  row += ",\"max_depth\":" + std::to_string(o.max_depth);
  row += ",\"extinct_within_limits\":";
  row += o.extinct_within_limits ? "true" : "false";
  row += "}";
  return row;
}

std::string ba_trial_json_row(const BaOutcome& o, std::uint64_t trial_index) {
  std::string row = "{\"process\":\"ba\",\"trial\":" + std::to_string(trial_index);
  row += ",\"extinct\":";
  row += o.extinct ? "true" : "false";
  row += ",\"total_born\":" + std::to_string(o.total_born);
  row += ",\"capped\":";
  row += o.capped ? "true" : "false";
  if (o.extinction_time) row += ",\"extinction_time\":" + format_double(*o.extinction_time);
  row += "}";
  return row;
}

std::vector<std::uint64_t> read_sample_file(std::istream& in) {
  std::vector<std::uint64_t> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::uint64_t v = 0;
    const auto res = std::from_chars(line.data(), line.data() + line.size(), v);
    if (res.ec != std::errc{})
      throw std::invalid_argument("sample file line is not an integer: '" + line + "'");
    out.push_back(v);
  }
  return out;
}

}  // namespace treelab
