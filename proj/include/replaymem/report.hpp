#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "replaymem/trainer.hpp"

namespace replaymem {

/// Rebuilds records from a record CSV. Task ids are stream positions;
/// composition shares are taken verbatim. Throws DataError naming the line on
/// malformed input.
std::vector<ExperimentRecord> read_records_csv(std::istream& in, const std::string& source);
std::vector<ExperimentRecord> read_records_csv(const std::filesystem::path& path);

/// run_id -> total seconds, from a timing CSV.
std::map<std::string, double> read_timing_csv(const std::filesystem::path& path);

/// Reads records.csv (and timing.csv when present) under `in_dir` and writes
/// the summary tables and charts under `out_dir`. Returns the file names
/// written, in writing order.
std::vector<std::string> write_report(const std::filesystem::path& in_dir,
                                      const std::filesystem::path& out_dir);

/// Same, from records already in memory; `timing` may be empty.
std::vector<std::string> write_report(const std::vector<ExperimentRecord>& records,
                                      const std::map<std::string, double>& timing,
                                      const std::filesystem::path& out_dir);

}  // namespace replaymem
