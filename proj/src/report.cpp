#include "replaymem/report.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>

#include "replaymem/metrics.hpp"

namespace replaymem {

namespace {

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

struct LineError {
  const std::string& where;
  std::size_t line;
  [[noreturn]] void operator()(const std::string& what) const {
    throw DataError(where + ":" + std::to_string(line) + ": " + what);
  }
};

double to_double(const std::string& s, const LineError& fail, const char* field) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
    fail(std::string("bad ") + field + " '" + s + "'");
  return v;
}

std::optional<double> to_opt_double(const std::string& s, const LineError& fail, const char* field) {
  if (s.empty()) return std::nullopt;
  return to_double(s, fail, field);
}

std::uint64_t to_uint(const std::string& s, const LineError& fail, const char* field) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
    fail(std::string("bad ") + field + " '" + s + "'");
  return v;
}

std::string shortest(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// ---- SVG ------------------------------------------------------------------

const char* kPalette[] = {"#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
                          "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac"};

const char* colour(std::size_t i) { return kPalette[i % std::size(kPalette)]; }

std::string esc(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

struct Frame {
  double width = 720, height = 400;
  double left = 60, right = 150, top = 40, bottom = 60;
  double plot_w() const { return width - left - right; }
  double plot_h() const { return height - top - bottom; }
};

void svg_open(std::ostream& out, const Frame& f, const std::string& title) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f.width << "\" height=\""
      << f.height << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << f.width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
      << esc(title) << "</text>\n";
}

// Y axis with ticks over [0, ymax].
void svg_y_axis(std::ostream& out, const Frame& f, double ymax, const std::string& label) {
  const double x0 = f.left, y0 = f.top + f.plot_h();
  out << "<line x1=\"" << x0 << "\" y1=\"" << f.top << "\" x2=\"" << x0 << "\" y2=\"" << y0
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x0 + f.plot_w() << "\" y2=\""
      << y0 << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double v = ymax * k / 4.0;
    const double y = y0 - f.plot_h() * k / 4.0;
    out << "<line x1=\"" << x0 - 4 << "\" y1=\"" << y << "\" x2=\"" << x0 << "\" y2=\"" << y
        << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << x0 - 6 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">" << fmt(v)
        << "</text>\n";
  }
  out << "<text x=\"14\" y=\"" << f.top + f.plot_h() / 2 << "\" transform=\"rotate(-90 14 "
      << f.top + f.plot_h() / 2 << ")\" text-anchor=\"middle\">" << esc(label) << "</text>\n";
}

void svg_legend(std::ostream& out, const Frame& f, const std::vector<std::string>& names) {
  const double x = f.width - f.right + 15;
  for (std::size_t i = 0; i < names.size(); ++i) {
    const double y = f.top + 16.0 * i;
    out << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"10\" height=\"10\" fill=\""
        << colour(i) << "\"/>\n"
        << "<text x=\"" << x + 14 << "\" y=\"" << y + 9 << "\">" << esc(names[i]) << "</text>\n";
  }
}

/// values[g][s]: group g along x, one bar per series s.
void svg_bars(std::ostream& out, const std::string& title, const std::string& ylabel,
              const std::vector<std::string>& groups, const std::vector<std::string>& series,
              const std::vector<std::vector<double>>& values) {
  Frame f;
  f.width = std::max(720.0, 90.0 * static_cast<double>(groups.size()) + f.left + f.right);
  double ymax = 0.0;
  for (const auto& row : values)
    for (double v : row) ymax = std::max(ymax, v);
  ymax = ymax > 0.0 ? ymax * 1.1 : 1.0;
  svg_open(out, f, title);
  svg_y_axis(out, f, ymax, ylabel);
  const double gw = f.plot_w() / std::max<std::size_t>(1, groups.size());
  const double bw = gw * 0.8 / std::max<std::size_t>(1, series.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const double gx = f.left + gw * g + gw * 0.1;
    for (std::size_t s = 0; s < series.size(); ++s) {
      const double v = values[g][s];
      const double h = f.plot_h() * v / ymax;
      out << "<rect x=\"" << gx + bw * s << "\" y=\"" << f.top + f.plot_h() - h << "\" width=\""
          << bw << "\" height=\"" << h << "\" fill=\"" << colour(s) << "\"><title>"
          << esc(groups[g] + " / " + series[s]) << ": " << fmt(v) << "</title></rect>\n";
    }
    out << "<text x=\"" << f.left + gw * (g + 0.5) << "\" y=\"" << f.top + f.plot_h() + 16
        << "\" text-anchor=\"middle\">" << esc(groups[g]) << "</text>\n";
  }
  svg_legend(out, f, series);
  out << "</svg>\n";
}

/// One polyline per series over shared x positions.
void svg_lines(std::ostream& out, const std::string& title, const std::string& xlabel,
               const std::string& ylabel, const std::vector<double>& xs,
               const std::vector<std::string>& series, const std::vector<std::vector<double>>& ys) {
  Frame f;
  double ymax = 0.0;
  for (const auto& row : ys)
    for (double v : row) ymax = std::max(ymax, v);
  ymax = ymax > 0.0 ? std::min(1.0, ymax * 1.1) : 1.0;
  const double xmin = xs.front(), xmax = xs.back();
  auto px = [&](double x) {
    return xmax > xmin ? f.left + f.plot_w() * (x - xmin) / (xmax - xmin) : f.left + f.plot_w() / 2;
  };
  auto py = [&](double y) { return f.top + f.plot_h() * (1.0 - y / ymax); };
  svg_open(out, f, title);
  svg_y_axis(out, f, ymax, ylabel);
  for (double x : xs) {
    out << "<text x=\"" << px(x) << "\" y=\"" << f.top + f.plot_h() + 16
        << "\" text-anchor=\"middle\">" << shortest(x) << "</text>\n";
  }
  out << "<text x=\"" << f.left + f.plot_w() / 2 << "\" y=\"" << f.height - 15
      << "\" text-anchor=\"middle\">" << esc(xlabel) << "</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    out << "<polyline fill=\"none\" stroke=\"" << colour(s) << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < xs.size(); ++i) out << px(xs[i]) << ',' << py(ys[s][i]) << ' ';
    out << "\"/>\n";
    for (std::size_t i = 0; i < xs.size(); ++i)
      out << "<circle cx=\"" << px(xs[i]) << "\" cy=\"" << py(ys[s][i]) << "\" r=\"3\" fill=\""
          << colour(s) << "\"/>\n";
  }
  svg_legend(out, f, series);
  out << "</svg>\n";
}

/// Scatter of (x, y) points coloured by series; both axes on [0, 1].
void svg_scatter(std::ostream& out, const std::string& title, const std::string& xlabel,
                 const std::string& ylabel, const std::vector<std::string>& series,
                 const std::vector<std::vector<std::pair<double, double>>>& points) {
  Frame f;
  double ymax = 0.0, xmax = 0.0;
  for (const auto& s : points)
    for (const auto& [x, y] : s) {
      xmax = std::max(xmax, x);
      ymax = std::max(ymax, y);
    }
  xmax = xmax > 0.0 ? xmax * 1.1 : 1.0;
  ymax = ymax > 0.0 ? ymax * 1.1 : 1.0;
  svg_open(out, f, title);
  svg_y_axis(out, f, ymax, ylabel);
  for (int k = 0; k <= 4; ++k) {
    out << "<text x=\"" << f.left + f.plot_w() * k / 4.0 << "\" y=\"" << f.top + f.plot_h() + 16
        << "\" text-anchor=\"middle\">" << fmt(xmax * k / 4.0) << "</text>\n";
  }
  out << "<text x=\"" << f.left + f.plot_w() / 2 << "\" y=\"" << f.height - 15
      << "\" text-anchor=\"middle\">" << esc(xlabel) << "</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    for (const auto& [x, y] : points[s]) {
      out << "<circle cx=\"" << f.left + f.plot_w() * x / xmax << "\" cy=\""
          << f.top + f.plot_h() * (1.0 - std::max(0.0, y) / ymax) << "\" r=\"3\" fill=\""
          << colour(s) << "\" fill-opacity=\"0.7\"/>\n";
    }
  }
  svg_legend(out, f, series);
  out << "</svg>\n";
}

// ---- aggregation ----------------------------------------------------------

using Cell = std::pair<std::string, double>;  // (policy, capacity)

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  return out;
}

}  // namespace

std::vector<ExperimentRecord> read_records_csv(std::istream& in, const std::string& source) {
  static const std::string kHeader =
      "run_id,seed,order,policy,capacity_fraction,task,checkpoint,accuracy,forgetting_final,"
      "forgetting_step,mem_count,mem_fraction_raw,mem_fraction_normalized";
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line) || strip_cr(line) != kHeader)
    throw DataError(source + ":1: missing or unexpected record CSV header");

  std::vector<ExperimentRecord> records;
  std::map<std::string, std::size_t> by_id;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const LineError fail{source, line_no};
    const auto f = split_row(line);
    if (f.size() != 13) fail("expected 13 fields, found " + std::to_string(f.size()));

    auto [it, fresh] = by_id.try_emplace(f[0], records.size());
    if (fresh) {
      ExperimentRecord r;
      r.key.seed = to_uint(f[1], fail, "seed");
      r.key.order = f[2];
      try {
        r.key.policy = parse_policy_kind(f[3]);
      } catch (const ConfigError& e) {
        fail(e.what());
      }
      r.key.capacity_fraction = to_double(f[4], fail, "capacity_fraction");
      records.push_back(std::move(r));
    }
    ExperimentRecord& r = records[it->second];

    auto pos_it = std::find(r.task_names.begin(), r.task_names.end(), f[5]);
    std::size_t pos = static_cast<std::size_t>(pos_it - r.task_names.begin());
    if (pos_it == r.task_names.end()) {
      if (r.checkpoints.size() > 1)
        fail("task '" + f[5] + "' first appears after checkpoint 0");
      r.task_names.push_back(f[5]);
      r.task_ids.push_back(static_cast<std::uint32_t>(pos));
      r.task_classes.push_back(1);
    }

    const auto acc = to_opt_double(f[7], fail, "accuracy");
    TaskShare share;
    share.count = to_uint(f[10], fail, "mem_count");
    share.raw_fraction = to_double(f[11], fail, "mem_fraction_raw");
    share.normalized_share = to_double(f[12], fail, "mem_fraction_normalized");

    if (f[6] == "adapted") {
      if (!r.adapted_accuracy) r.adapted_accuracy.emplace();
      r.adapted_accuracy->resize(std::max(r.adapted_accuracy->size(), pos + 1));
      (*r.adapted_accuracy)[pos] = acc;
      continue;
    }
    const std::size_t k = to_uint(f[6], fail, "checkpoint");
    if (k > r.checkpoints.size()) fail("checkpoint " + f[6] + " skips a predecessor");
    if (k == r.checkpoints.size()) {
      Checkpoint cp;
      cp.after_task = k;
      r.checkpoints.push_back(std::move(cp));
    }
    Checkpoint& cp = r.checkpoints[k];
    cp.accuracy.resize(std::max(cp.accuracy.size(), pos + 1));
    cp.accuracy[pos] = acc;
    cp.composition.tasks[static_cast<std::uint32_t>(pos)] = share;
    cp.composition.total += share.count;
  }

  for (auto& r : records) {
    const std::size_t n = r.task_names.size();
    const std::string id = r.key.run_id();
    if (r.checkpoints.size() != n)
      throw DataError(source + ": run " + id + " has " + std::to_string(r.checkpoints.size()) +
                      " checkpoints for " + std::to_string(n) + " tasks");
    for (const auto& cp : r.checkpoints) {
      if (cp.accuracy.size() != n || cp.composition.tasks.size() != n)
        throw DataError(source + ": run " + id + " checkpoint " + std::to_string(cp.after_task) +
                        " does not cover every task");
    }
    if (r.adapted_accuracy && r.adapted_accuracy->size() != n)
      throw DataError(source + ": run " + id + " has incomplete adapted rows");
  }
  return records;
}

std::vector<ExperimentRecord> read_records_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return read_records_csv(in, path.string());
}

std::map<std::string, double> read_timing_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  const std::string source = path.string();
  std::string line;
  if (!std::getline(in, line) || split_row(strip_cr(line)).size() != 8)
    throw DataError(source + ":1: missing or unexpected timing CSV header");
  std::map<std::string, double> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const LineError fail{source, line_no};
    const auto f = split_row(line);
    if (f.size() != 8) fail("expected 8 fields");
    out[f[0]] = to_double(f[7], fail, "total_s");
  }
  return out;
}

std::vector<std::string> write_report(const std::filesystem::path& in_dir,
                                      const std::filesystem::path& out_dir) {
  const auto records = read_records_csv(in_dir / "records.csv");
  std::map<std::string, double> timing;
  if (std::filesystem::exists(in_dir / "timing.csv")) timing = read_timing_csv(in_dir / "timing.csv");
  return write_report(records, timing, out_dir);
}

std::vector<std::string> write_report(const std::vector<ExperimentRecord>& records,
                                      const std::map<std::string, double>& timing,
                                      const std::filesystem::path& out_dir) {
  if (records.empty()) throw DataError("no records to report");
  std::filesystem::create_directories(out_dir);
  std::vector<std::string> written;

  std::set<double> caps;
  std::vector<std::string> policies;  // canonical order
  for (PolicyKind k : all_policy_kinds()) {
    const std::string name(to_string(k));
    if (std::any_of(records.begin(), records.end(),
                    [&](const ExperimentRecord& r) { return r.key.policy == k; }))
      policies.push_back(name);
  }
  std::set<std::string> task_set;
  for (const auto& r : records) {
    caps.insert(r.key.capacity_fraction);
    task_set.insert(r.task_names.begin(), r.task_names.end());
  }
  const std::vector<std::string> tasks(task_set.begin(), task_set.end());

  // Table-1 grids, one per capacity.
  for (double cap : caps) {
    std::vector<ExperimentRecord> subset;
    for (const auto& r : records)
      if (r.key.capacity_fraction == cap) subset.push_back(r);
    const std::string name = caps.size() == 1 ? "summary.csv" : "summary_c" + shortest(cap) + ".csv";
    auto out = open_out(out_dir / name);
    const auto rows = summarize(subset);
    write_summary_csv(out, rows);
    written.push_back(name);
  }

  // Final accuracy against memory size.
  std::map<Cell, std::vector<double>> acc_by_cell;
  for (const auto& r : records)
    if (auto a = final_average_accuracy(r))
      acc_by_cell[{std::string(to_string(r.key.policy)), r.key.capacity_fraction}].push_back(*a);
  {
    auto out = open_out(out_dir / "size_sweep.csv");
    out << "policy,capacity_fraction,mean,std,runs\n";
    for (const auto& p : policies) {
      for (double cap : caps) {
        auto it = acc_by_cell.find({p, cap});
        if (it == acc_by_cell.end()) continue;
        const MeanStd ms = mean_std(it->second);
        out << p << ',' << format_number(cap) << ',' << format_number(ms.mean) << ','
            << format_number(ms.std) << ',' << ms.n << '\n';
      }
    }
    written.push_back("size_sweep.csv");
  }

  // Final memory composition and forgetting per task.
  struct TaskAgg {
    std::vector<double> raw, normalized, usage, forgetting, step;
  };
  std::map<Cell, std::map<std::string, TaskAgg>> agg;
  std::map<Cell, std::size_t> runs_per_cell;
  for (const auto& r : records) {
    const Cell cell{std::string(to_string(r.key.policy)), r.key.capacity_fraction};
    ++runs_per_cell[cell];
    const auto& comp = r.checkpoints.back().composition;
    for (std::size_t t = 0; t < r.task_names.size(); ++t) {
      TaskAgg& a = agg[cell][r.task_names[t]];
      TaskShare share;
      if (auto it = comp.tasks.find(r.task_ids[t]); it != comp.tasks.end()) share = it->second;
      a.raw.push_back(share.raw_fraction);
      a.normalized.push_back(share.normalized_share);
    }
    for (const auto& f : forgetting(r).tasks) {
      TaskAgg& a = agg[cell][f.task];
      a.usage.push_back(a.raw.back());
      a.forgetting.push_back(f.forgetting_final);
      for (const auto& [k, v] : f.forgetting_step) a.step.push_back(v);
    }
  }
  {
    auto comp_out = open_out(out_dir / "composition.csv");
    comp_out << "capacity_fraction,policy,task,mem_fraction_raw,mem_fraction_normalized,runs\n";
    auto forg_out = open_out(out_dir / "forgetting.csv");
    forg_out << "capacity_fraction,policy,task,usage,forgetting_final,forgetting_step_mean,runs\n";
    for (double cap : caps) {
      for (const auto& p : policies) {
        auto it = agg.find({p, cap});
        if (it == agg.end()) continue;
        for (const auto& [task, a] : it->second) {
          comp_out << format_number(cap) << ',' << p << ',' << task << ','
                   << format_number(mean_std(a.raw).mean) << ','
                   << format_number(mean_std(a.normalized).mean) << ',' << a.raw.size() << '\n';
          if (a.forgetting.empty()) continue;
          forg_out << format_number(cap) << ',' << p << ',' << task << ','
                   << format_number(mean_std(a.usage).mean) << ','
                   << format_number(mean_std(a.forgetting).mean) << ','
                   << (a.step.empty() ? std::string() : format_number(mean_std(a.step).mean)) << ','
                   << a.forgetting.size() << '\n';
        }
      }
    }
    written.push_back("composition.csv");
    written.push_back("forgetting.csv");
  }

  {
    auto out = open_out(out_dir / "correlation.csv");
    out << "run_id,policy,capacity_fraction,order,seed,spearman,note\n";
    for (const auto& r : records) {
      const UsageReport u = usage_vs_forgetting(r);
      out << r.key.run_id() << ',' << to_string(r.key.policy) << ','
          << format_number(r.key.capacity_fraction) << ',' << r.key.order << ',' << r.key.seed << ','
          << (u.spearman ? format_number(*u.spearman) : std::string()) << ',' << u.omitted_reason
          << '\n';
    }
    written.push_back("correlation.csv");
  }

  if (std::any_of(records.begin(), records.end(),
                  [](const ExperimentRecord& r) { return r.adapted_accuracy.has_value(); })) {
    std::map<Cell, std::pair<std::vector<double>, std::vector<double>>> cells;
    for (const auto& r : records) {
      if (!r.adapted_accuracy) continue;
      std::vector<double> adapted;
      for (const auto& a : *r.adapted_accuracy)
        if (a) adapted.push_back(*a);
      const auto base = final_average_accuracy(r);
      if (!base || adapted.empty()) continue;
      auto& c = cells[{std::string(to_string(r.key.policy)), r.key.capacity_fraction}];
      c.first.push_back(*base);
      c.second.push_back(mean_std(adapted).mean);
    }
    auto out = open_out(out_dir / "adaptation.csv");
    out << "policy,capacity_fraction,base_mean,adapted_mean,runs\n";
    for (const auto& p : policies) {
      for (double cap : caps) {
        auto it = cells.find({p, cap});
        if (it == cells.end()) continue;
        out << p << ',' << format_number(cap) << ',' << format_number(mean_std(it->second.first).mean)
            << ',' << format_number(mean_std(it->second.second).mean) << ','
            << it->second.first.size() << '\n';
      }
    }
    written.push_back("adaptation.csv");
  }

  if (!timing.empty()) {
    std::map<Cell, std::vector<double>> secs;
    for (const auto& r : records)
      if (auto it = timing.find(r.key.run_id()); it != timing.end())
        secs[{std::string(to_string(r.key.policy)), r.key.capacity_fraction}].push_back(it->second);
    auto out = open_out(out_dir / "runtime.csv");
    out << "policy,capacity_fraction,mean_seconds,runs\n";
    for (const auto& p : policies) {
      for (double cap : caps) {
        auto it = secs.find({p, cap});
        if (it == secs.end()) continue;
        out << p << ',' << format_number(cap) << ',' << format_number(mean_std(it->second).mean)
            << ',' << it->second.size() << '\n';
      }
    }
    written.push_back("runtime.csv");
  }

  // Charts at the smallest capacity, plus the size sweep when there is one.
  const double cap0 = *caps.begin();
  const std::string cap_label = shortest(cap0 * 100.0) + "% memory";
  {
    std::vector<std::string> groups;
    std::vector<std::vector<double>> values;
    for (const auto& p : policies) {
      auto it = agg.find({p, cap0});
      if (it == agg.end()) continue;
      groups.push_back(p);
      std::vector<double> row;
      for (const auto& t : tasks) {
        auto jt = it->second.find(t);
        row.push_back(jt == it->second.end() ? 0.0 : mean_std(jt->second.raw).mean);
      }
      values.push_back(std::move(row));
    }
    auto out = open_out(out_dir / "composition.svg");
    svg_bars(out, "Memory composition by task (" + cap_label + ")", "fraction of memory", groups,
             tasks, values);
    written.push_back("composition.svg");
  }
  {
    std::vector<std::string> series;
    std::vector<std::vector<std::pair<double, double>>> points;
    for (const auto& p : policies) {
      auto it = agg.find({p, cap0});
      if (it == agg.end()) continue;
      series.push_back(p);
      std::vector<std::pair<double, double>> pts;
      for (const auto& [task, a] : it->second)
        for (std::size_t i = 0; i < a.usage.size(); ++i) pts.emplace_back(a.usage[i], a.forgetting[i]);
      points.push_back(std::move(pts));
    }
    auto out = open_out(out_dir / "forgetting.svg");
    svg_scatter(out, "Forgetting vs memory usage per task (" + cap_label + ")", "memory usage",
                "forgetting", series, points);
    written.push_back("forgetting.svg");
  }
  if (caps.size() > 1) {
    const std::vector<double> xs(caps.begin(), caps.end());
    std::vector<std::string> series;
    std::vector<std::vector<double>> ys;
    for (const auto& p : policies) {
      std::vector<double> row;
      bool complete = true;
      for (double cap : xs) {
        auto it = acc_by_cell.find({p, cap});
        if (it == acc_by_cell.end()) {
          complete = false;
          break;
        }
        row.push_back(mean_std(it->second).mean);
      }
      if (!complete) continue;
      series.push_back(p);
      ys.push_back(std::move(row));
    }
    if (!series.empty()) {
      auto out = open_out(out_dir / "size_sweep.svg");
      svg_lines(out, "Final accuracy vs memory size", "capacity fraction", "accuracy", xs, series, ys);
      written.push_back("size_sweep.svg");
    }
  }
  return written;
}

}  // namespace replaymem
