#pragma once

#include <filesystem>
#include <string>

#include "reuse/types.hpp"

namespace reuse {

struct OutputSpec {
  std::string directory = "out";
};

// On-disk run configuration: sections [search], [task], [funnel], [output].
// Absent keys fall back to defaults; unknown keys are rejected by name. The
// task's chemistry axes are derived from the run seed, not stored.
struct RunConfigDocument {
  SearchConfig search;
  TaskContext task;  // chem axes left empty until finalized
  OutputSpec output;
};

RunConfigDocument default_run_config();

// Throws config_error with the offending key or value on any problem.
RunConfigDocument parse_run_config(const std::string& text);
RunConfigDocument load_run_config(const std::filesystem::path& path);

std::string serialize_run_config(const RunConfigDocument& doc);

// Applies a seed override and derives the seed-dependent task fields.
// Validates the search config.
void finalize_run_config(RunConfigDocument& doc, std::uint64_t seed);

}  // namespace reuse
