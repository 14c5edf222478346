#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "replaymem/trainer.hpp"

namespace replaymem {

struct ForgettingRecord {
  std::size_t position = 0;  // stream position of the task
  std::string task;
  double forgetting_final = 0.0;  // acc right after the task - acc at stream end
  /// (checkpoint, acc at previous checkpoint - acc at this checkpoint) for
  /// every checkpoint after the task was trained.
  std::vector<std::pair<std::size_t, double>> forgetting_step;
};

struct ForgettingReport {
  std::vector<ForgettingRecord> tasks;
  std::vector<std::string> warnings;  // tasks excluded for lack of evaluations
};

ForgettingReport forgetting(const ExperimentRecord& record);

/// Mean of the final-checkpoint accuracies (undefined tasks skipped).
std::optional<double> final_average_accuracy(const ExperimentRecord& record);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // sample (n-1) standard deviation; 0 for n = 1
  std::size_t n = 0;
};

/// Order-independent: the values are sorted before accumulation.
MeanStd mean_std(std::vector<double> values);

struct SummaryRow {
  std::string order;  // "avg." for the across-orders row
  std::string policy;
  double mean = 0.0;
  double std = 0.0;
  std::size_t runs = 0;
};

/// Table-1 style grid: one row per (order, policy) with mean/std of the final
/// average accuracy across seeds, then one "avg." row per policy holding the
/// mean over orders of the per-order means and of the per-order stds.
std::vector<SummaryRow> summarize(std::span<const ExperimentRecord> records);

struct UsageForgetting {
  std::string task;
  double usage = 0.0;  // raw memory fraction at the final checkpoint
  double forgetting = 0.0;
};

struct UsageReport {
  std::vector<UsageForgetting> pairs;
  std::optional<double> spearman;  // omitted for < 3 tasks or tied-out ranks
  std::string omitted_reason;
};

UsageReport usage_vs_forgetting(const ExperimentRecord& record);

/// Spearman rank correlation with average ranks for ties; nullopt when either
/// series has zero rank variance or the lengths differ / are < 2.
std::optional<double> spearman(std::span<const double> a, std::span<const double> b);

/// Fixed-precision decimal rendering shared by every CSV writer.
std::string format_number(double v);

/// Record CSV: one row per (run, task, checkpoint), header included.
void write_record_header(std::ostream& out);
void write_record_rows(std::ostream& out, const ExperimentRecord& record);

void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows);

/// Wall-clock per phase, kept out of the record CSV so it stays deterministic.
void write_timing_header(std::ostream& out);
void write_timing_row(std::ostream& out, const ExperimentRecord& record);

}  // namespace replaymem
