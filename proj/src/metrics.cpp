#include "replaymem/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <ostream>

namespace replaymem {

ForgettingReport forgetting(const ExperimentRecord& record) {
  ForgettingReport report;
  const std::size_t n = record.task_names.size();
  if (record.checkpoints.empty()) {
    report.warnings.push_back("record has no checkpoints");
    return report;
  }
  const Checkpoint& last = record.checkpoints.back();
  for (std::size_t t = 0; t < n; ++t) {
    if (t >= record.checkpoints.size()) {
      report.warnings.push_back("task '" + record.task_names[t] + "' was never trained");
      continue;
    }
    const auto initial = record.checkpoints[t].accuracy.at(t);
    const auto final_acc = last.accuracy.at(t);
    if (!initial || !final_acc) {
      report.warnings.push_back("task '" + record.task_names[t] + "' has no accuracy; excluded");
      continue;
    }
    ForgettingRecord f;
    f.position = t;
    f.task = record.task_names[t];
    f.forgetting_final = *initial - *final_acc;
    for (std::size_t k = t + 1; k < record.checkpoints.size(); ++k) {
      const auto prev = record.checkpoints[k - 1].accuracy.at(t);
      const auto curr = record.checkpoints[k].accuracy.at(t);
      if (prev && curr) f.forgetting_step.emplace_back(k, *prev - *curr);
    }
    report.tasks.push_back(std::move(f));
  }
  return report;
}

std::optional<double> final_average_accuracy(const ExperimentRecord& record) {
  if (record.checkpoints.empty()) return std::nullopt;
  std::vector<double> acc;
  for (const auto& a : record.checkpoints.back().accuracy)
    if (a) acc.push_back(*a);
  if (acc.empty()) return std::nullopt;
  return mean_std(std::move(acc)).mean;
}

MeanStd mean_std(std::vector<double> values) {
  MeanStd r;
  r.n = values.size();
  if (values.empty()) return r;
  std::sort(values.begin(), values.end());
  r.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(r.n);
  if (r.n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - r.mean) * (v - r.mean);
    r.std = std::sqrt(ss / static_cast<double>(r.n - 1));
  }
  return r;
}

std::vector<SummaryRow> summarize(std::span<const ExperimentRecord> records) {
  // order -> policy -> final accuracies; std::map keeps the output stable.
  std::map<std::string, std::map<std::string, std::vector<double>>> cells;
  for (const auto& r : records) {
    const auto acc = final_average_accuracy(r);
    if (!acc) continue;
    cells[r.key.order][std::string(to_string(r.key.policy))].push_back(*acc);
  }
  std::vector<SummaryRow> rows;
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> per_policy;
  for (auto& [order, by_policy] : cells) {
    for (auto& [policy, values] : by_policy) {
      const MeanStd ms = mean_std(values);
      rows.push_back({order, policy, ms.mean, ms.std, ms.n});
      per_policy[policy].first.push_back(ms.mean);
      per_policy[policy].second.push_back(ms.std);
    }
  }
  for (auto& [policy, series] : per_policy) {
    const std::size_t runs = series.first.size();
    rows.push_back({"avg.", policy, mean_std(series.first).mean, mean_std(series.second).mean, runs});
  }
  return rows;
}

UsageReport usage_vs_forgetting(const ExperimentRecord& record) {
  UsageReport report;
  if (record.checkpoints.empty()) {
    report.omitted_reason = "no checkpoints";
    return report;
  }
  const auto& comp = record.checkpoints.back().composition;
  for (const auto& f : forgetting(record).tasks) {
    double usage = 0.0;
    if (auto it = comp.tasks.find(record.task_ids[f.position]); it != comp.tasks.end())
      usage = it->second.raw_fraction;
    report.pairs.push_back({f.task, usage, f.forgetting_final});
  }
  if (report.pairs.size() < 3) {
    report.omitted_reason = "fewer than 3 tasks";
    return report;
  }
  std::vector<double> u, g;
  for (const auto& p : report.pairs) {
    u.push_back(p.usage);
    g.push_back(p.forgetting);
  }
  report.spearman = spearman(u, g);
  if (!report.spearman) report.omitted_reason = "constant ranks";
  return report;
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> rank(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j < idx.size() && v[idx[j]] == v[idx[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j - 1) + 1.0;
    for (std::size_t k = i; k < j; ++k) rank[idx[k]] = r;
    i = j;
  }
  return rank;
}

}  // namespace

std::optional<double> spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) return std::nullopt;
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return std::nullopt;
  return sab / std::sqrt(saa * sbb);
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  std::string s(buf);
  if (s == "-0.000000") s = "0.000000";  // tiny negatives round to zero
  return s;
}

namespace {

std::string opt_number(const std::optional<double>& v) { return v ? format_number(*v) : ""; }

}  // namespace

void write_record_header(std::ostream& out) {
  out << "run_id,seed,order,policy,capacity_fraction,task,checkpoint,accuracy,forgetting_final,"
         "forgetting_step,mem_count,mem_fraction_raw,mem_fraction_normalized\n";
}

void write_record_rows(std::ostream& out, const ExperimentRecord& record) {
  const ForgettingReport fr = forgetting(record);
  std::map<std::size_t, const ForgettingRecord*> by_pos;
  for (const auto& f : fr.tasks) by_pos[f.position] = &f;

  const std::string prefix = record.key.run_id() + "," + std::to_string(record.key.seed) + "," +
                             record.key.order + "," + std::string(to_string(record.key.policy)) +
                             "," + format_number(record.key.capacity_fraction) + ",";

  auto emit = [&](std::size_t t, const std::string& checkpoint, const std::optional<double>& acc,
                  const std::optional<double>& step, const CompositionReport& comp) {
    std::optional<double> ff;
    if (auto it = by_pos.find(t); it != by_pos.end()) ff = it->second->forgetting_final;
    TaskShare share;
    if (auto it = comp.tasks.find(record.task_ids[t]); it != comp.tasks.end()) share = it->second;
    out << prefix << record.task_names[t] << ',' << checkpoint << ',' << opt_number(acc) << ','
        << opt_number(ff) << ',' << opt_number(step) << ',' << share.count << ','
        << format_number(share.raw_fraction) << ',' << format_number(share.normalized_share)
        << '\n';
  };

  for (const auto& cp : record.checkpoints) {
    for (std::size_t t = 0; t < record.task_names.size(); ++t) {
      std::optional<double> step;
      if (auto it = by_pos.find(t); it != by_pos.end()) {
        for (const auto& [k, v] : it->second->forgetting_step)
          if (k == cp.after_task) step = v;
      }
      emit(t, std::to_string(cp.after_task), cp.accuracy[t], step, cp.composition);
    }
  }
  if (record.adapted_accuracy && !record.checkpoints.empty()) {
    for (std::size_t t = 0; t < record.task_names.size(); ++t) {
      emit(t, "adapted", (*record.adapted_accuracy)[t], std::nullopt,
           record.checkpoints.back().composition);
    }
  }
}

void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows) {
  out << "order,policy,mean,std\n";
  for (const auto& r : rows)
    out << r.order << ',' << r.policy << ',' << format_number(r.mean) << ',' << format_number(r.std)
        << '\n';
}

void write_timing_header(std::ostream& out) {
  out << "run_id,feedback_s,policy_s,train_s,replay_s,evaluation_s,adaptation_s,total_s\n";
}

void write_timing_row(std::ostream& out, const ExperimentRecord& record) {
  const auto& s = record.seconds;
  out << record.key.run_id() << ',' << format_number(s.feedback) << ',' << format_number(s.policy)
      << ',' << format_number(s.train) << ',' << format_number(s.replay) << ','
      << format_number(s.evaluation) << ',' << format_number(s.adaptation) << ','
      << format_number(s.total()) << '\n';
}

}  // namespace replaymem
