#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "reuse/trace.hpp"

namespace reuse {

// Line-delimited JSON trace, one record per iteration. Serialization is
// byte-stable for identical inputs; non-finite numbers are encoded as null
// and read back as -inf.

std::string trace_record_to_json(const TraceRecord& rec);
TraceRecord trace_record_from_json(const std::string& line);

void write_trace(const std::filesystem::path& path,
                 std::span<const TraceRecord> trace);

// Throws input_error naming the 1-based line number of the first bad record.
std::vector<TraceRecord> read_trace(const std::filesystem::path& path);

std::string panel_to_json(const Panel& panel);
void write_panel(const std::filesystem::path& path, const Panel& panel);

// Summary row for one finished run. Dual-hit thresholds are reported in the
// header so the file is self-describing.
std::string metrics_csv(const RunResult& result, double threshold_a,
                        double threshold_b);
void write_metrics(const std::filesystem::path& path, const RunResult& result,
                   double threshold_a, double threshold_b);

// Fixed-format numeric string for CSV output ("%.12g"; non-finite values
// print as inf/-inf/nan).
std::string format_csv_number(double v);

}  // namespace reuse
