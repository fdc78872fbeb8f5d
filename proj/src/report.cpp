#include "idb/report.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <nlohmann/json.hpp>

#include "idb/config.hpp"
#include "idb/errors.hpp"

namespace idb {

using nlohmann::json;

OutputFormat parse_format(std::string_view s) {
  if (s == "text") return OutputFormat::text;
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  throw UsageError(fmt::format("unknown output format '{}'", s));
}

double round_half_up(double x, int decimals) {
  const double scale = std::pow(10.0, decimals);
  const double scaled = x * scale;
  const double floor = std::floor(scaled);
  const double frac = scaled - floor;
  const double tol = 1e-9 * std::max(1.0, std::abs(scaled));
  double rounded = frac + tol >= 0.5 ? floor + 1.0 : floor;
  return rounded / scale;
}

std::string format_fixed(double x, int decimals) {
  return fmt::format("{:.{}f}", round_half_up(x, decimals), decimals);
}

std::string format_exact(double x) { return fmt::format("{}", x); }

namespace {

constexpr Outcome kOutcomes[] = {Outcome::hospitalization, Outcome::icu, Outcome::death};

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string render_rates(const RegionSeries& series, OutputFormat format) {
  std::vector<Outcome> outcomes;
  for (auto o : kOutcomes) {
    if (series.has_outcome(o)) outcomes.push_back(o);
  }
  std::string out;
  if (format == OutputFormat::json) {
    json rows = json::array();
    for (auto d : series.dates()) {
      auto r = empirical_rates(series, d);
      json row{{"date", d.iso()}, {"p_tested", r.p_tested}, {"p_pos_given_tested", r.p_pos_given_tested}};
      for (auto o : outcomes) row[fmt::format("p_{}", outcome_name(o))] = r.severe.at(o);
      rows.push_back(row);
    }
    return dump(json{{"region_id", series.region_id()}, {"population", series.population()}, {"rates", rows}});
  }
  if (format == OutputFormat::csv) {
    out += "date,p_tested,p_pos_given_tested";
    for (auto o : outcomes) out += fmt::format(",p_{}", outcome_name(o));
    out += '\n';
    for (auto d : series.dates()) {
      auto r = empirical_rates(series, d);
      out += fmt::format("{},{},{}", d.iso(), format_exact(r.p_tested), format_exact(r.p_pos_given_tested));
      for (auto o : outcomes) out += "," + format_exact(r.severe.at(o));
      out += '\n';
    }
    return out;
  }
  out += fmt::format("{} (population {})\n", series.region_id(), series.population());
  out += fmt::format("{:<12}{:>8}{:>12}", "date", "P(T=1)", "P(R=1|T=1)");
  for (auto o : outcomes) out += fmt::format("{:>10}", fmt::format("P({}=1)", outcome_code(o)));
  out += '\n';
  for (auto d : series.dates()) {
    auto r = empirical_rates(series, d);
    out += fmt::format("{:<12}{:>8}{:>12}", d.iso(), format_fixed(r.p_tested, 3),
                       format_fixed(r.p_pos_given_tested, 3));
    for (auto o : outcomes) out += fmt::format("{:>10}", format_fixed(r.severe.at(o), 5));
    out += '\n';
  }
  return out;
}

std::string render_bounds(const BoundSeries& s, OutputFormat format) {
  if (format == OutputFormat::json) return dump(json(s));
  std::string out;
  if (format == OutputFormat::csv) {
    out += "date,method,lo,hi,clamped\n";
    for (std::size_t i = 0; i < s.dates.size(); ++i) {
      const auto& b = s.intervals[i];
      out += fmt::format("{},{},{},{},{}\n", s.dates[i].iso(), method_name(b.method),
                         format_exact(b.lo), format_exact(b.hi), b.clamped ? 1 : 0);
    }
    return out;
  }
  const auto method = s.intervals.empty() ? std::string_view{"-"} : method_name(s.intervals.front().method);
  out += fmt::format("{}: bounds on P(C=1), method {}\n", s.region_id, method);
  out += fmt::format("{:<12}{:>8}{:>8}\n", "date", "LB", "UB");
  for (std::size_t i = 0; i < s.dates.size(); ++i) {
    const auto& b = s.intervals[i];
    out += fmt::format("{:<12}{:>8}{:>8}{}\n", s.dates[i].iso(), format_fixed(b.lo, 3),
                       format_fixed(b.hi, 3), b.clamped ? "  (clamped)" : "");
  }
  return out;
}

std::string render_severe(const std::map<Outcome, BoundSeries>& by_outcome, OutputFormat format) {
  if (by_outcome.empty()) throw UsageError("no severe outcomes to report");
  const auto& first = by_outcome.begin()->second;
  if (format == OutputFormat::json) {
    json j{{"region_id", first.region_id}};
    for (const auto& [o, s] : by_outcome) j[std::string(outcome_name(o))] = json(s)["bounds"];
    return dump(j);
  }
  std::string out;
  if (format == OutputFormat::csv) {
    out += "date,outcome,lo,hi,clamped\n";
    for (std::size_t i = 0; i < first.dates.size(); ++i) {
      for (const auto& [o, s] : by_outcome) {
        const auto& b = s.intervals[i];
        out += fmt::format("{},{},{},{},{}\n", s.dates[i].iso(), outcome_name(o), format_exact(b.lo),
                           format_exact(b.hi), b.clamped ? 1 : 0);
      }
    }
    return out;
  }
  out += fmt::format("{}: bounds on P(V=1|C=1)\n", first.region_id);
  out += fmt::format("{:<12}", "date");
  for (const auto& [o, s] : by_outcome) {
    out += fmt::format("{:>16}", fmt::format("{} LB/UB", outcome_code(o)));
  }
  out += '\n';
  for (std::size_t i = 0; i < first.dates.size(); ++i) {
    out += fmt::format("{:<12}", first.dates[i].iso());
    for (const auto& [o, s] : by_outcome) {
      const auto& b = s.intervals[i];
      out += fmt::format("{:>8}{:>8}", format_fixed(b.lo, 3), format_fixed(b.hi, 3));
    }
    out += '\n';
  }
  return out;
}

std::string render_sweep(const SweepResult& sweep, OutputFormat format) {
  auto alpha = [](const SweepRow& r) { return r.alpha_lo ? format_exact(*r.alpha_lo) : std::string{}; };
  if (format == OutputFormat::json) {
    json rows = json::array();
    for (const auto& r : sweep.rows) {
      json row{{"miss_lo", r.miss_lo}, {"miss_hi", r.miss_hi}, {"method", std::string(method_name(r.method))},
               {"lo", r.bound.lo}, {"hi", r.bound.hi}};
      row["alpha_lo"] = r.alpha_lo ? json(*r.alpha_lo) : json(nullptr);
      rows.push_back(row);
    }
    return dump(json{{"skipped", sweep.skipped}, {"rows", rows}});
  }
  std::string out;
  if (sweep.skipped > 0) out += fmt::format("# skipped {} invalid grid points (miss_lo > miss_hi)\n", sweep.skipped);
  if (format == OutputFormat::csv) {
    out += "miss_lo,miss_hi,alpha_lo,method,lo,hi\n";
    for (const auto& r : sweep.rows) {
      out += fmt::format("{},{},{},{},{},{}\n", format_exact(r.miss_lo), format_exact(r.miss_hi), alpha(r),
                         method_name(r.method), format_exact(r.bound.lo), format_exact(r.bound.hi));
    }
    return out;
  }
  out += fmt::format("{:>8}{:>8}{:>9}  {:<18}{:>8}{:>8}\n", "miss_lo", "miss_hi", "alpha_lo", "method", "LB", "UB");
  for (const auto& r : sweep.rows) {
    out += fmt::format("{:>8}{:>8}{:>9}  {:<18}{:>8}{:>8}\n", format_exact(r.miss_lo), format_exact(r.miss_hi),
                       r.alpha_lo ? format_exact(*r.alpha_lo) : "-", method_name(r.method),
                       format_fixed(r.bound.lo, 3), format_fixed(r.bound.hi, 3));
  }
  return out;
}

std::string render_coverage(const CoverageSummary& s, const std::vector<Method>& methods,
                            OutputFormat format) {
  if (format == OutputFormat::json) {
    json cov = json::object();
    for (auto m : methods) cov[std::string(method_name(m))] = s.coverage(m);
    return dump(json{{"worlds", s.worlds},
                     {"day_pairs", s.day_pairs},
                     {"coverage", cov},
                     {"audit_flags", s.audit_flags},
                     {"worlds_with_audit_flags", s.worlds_with_audit_flags},
                     {"realized_miss_rate_violations", s.realized_miss_violations},
                     {"engine_defects", s.engine_defects},
                     {"valid_world_failures", s.valid_world_failures},
                     {"worst_relative_slack", s.worst_relative_slack},
                     {"failed", s.failed()}});
  }
  std::string out;
  if (format == OutputFormat::csv) {
    out += "method,worlds,day_pairs,covered_pairs,coverage,audit_flags,engine_defects,valid_world_failures\n";
    for (auto m : methods) {
      auto it = s.covered_pairs.find(m);
      out += fmt::format("{},{},{},{},{},{},{},{}\n", method_name(m), s.worlds, s.day_pairs,
                         it == s.covered_pairs.end() ? 0 : it->second, format_exact(s.coverage(m)),
                         s.audit_flags, s.engine_defects, s.valid_world_failures);
    }
    return out;
  }
  out += fmt::format("worlds: {}  (seed, day) pairs: {}\n", s.worlds, s.day_pairs);
  for (auto m : methods) {
    out += fmt::format("  coverage {:<18} {:.2f}%\n", method_name(m), 100.0 * s.coverage(m));
  }
  out += fmt::format("audit flags: {} (in {} worlds)\n", s.audit_flags, s.worlds_with_audit_flags);
  out += fmt::format("realized miss-rate days outside interval: {}\n", s.realized_miss_violations);
  out += fmt::format("engine defects: {}\n", s.engine_defects);
  out += fmt::format("coverage failures under declared-valid assumptions: {}\n", s.valid_world_failures);
  out += fmt::format("worst relative slack: {}\n", format_fixed(s.worst_relative_slack, 4));
  out += fmt::format("result: {}\n", s.failed() ? "FAIL" : "PASS");
  return out;
}

std::vector<BoundRow> parse_bound_csv(std::string_view text) {
  std::vector<BoundRow> rows;
  std::size_t start = 0, line_no = 0;
  bool header_seen = false;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    auto line = text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
    start = end == std::string_view::npos ? text.size() : end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> f;
    std::size_t p = 0;
    while (true) {
      auto q = line.find(',', p);
      f.emplace_back(line.substr(p, q == std::string_view::npos ? std::string_view::npos : q - p));
      if (q == std::string_view::npos) break;
      p = q + 1;
    }
    if (!header_seen) {
      if (f != std::vector<std::string>{"date", "method", "lo", "hi", "clamped"}) {
        throw DataError(fmt::format("line {}: expected header date,method,lo,hi,clamped", line_no));
      }
      header_seen = true;
      continue;
    }
    if (f.size() != 5) throw DataError(fmt::format("line {}: malformed row: {} fields, expected 5", line_no, f.size()));
    BoundRow r;
    try {
      r.date = Date::parse(f[0]);
    } catch (const DataError& e) {
      throw DataError(fmt::format("line {}: {}", line_no, e.what()));
    }
    r.method = f[1];
    auto num = [&](const std::string& s) {
      double v = 0;
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw DataError(fmt::format("line {}: malformed number '{}'", line_no, s));
      }
      return v;
    };
    r.lo = num(f[2]);
    r.hi = num(f[3]);
    r.lo_text = f[2];
    r.hi_text = f[3];
    if (f[4] != "0" && f[4] != "1") throw DataError(fmt::format("line {}: clamped must be 0 or 1", line_no));
    r.clamped = f[4] == "1";
    if (!(r.lo <= r.hi) || r.lo < 0.0 || r.hi > 1.0) {
      throw DataError(fmt::format("line {} ({}): invariant 0 <= lo <= hi <= 1 violated", line_no, f[0]));
    }
    if (!rows.empty() && !(rows.back().date < r.date)) {
      throw DataError(fmt::format("line {} ({}): invariant dates_strictly_increasing violated", line_no, f[0]));
    }
    rows.push_back(std::move(r));
  }
  if (!header_seen) throw DataError("bound series: missing header");
  if (rows.empty()) throw DataError("bound series: no rows");
  return rows;
}

std::string render_band_svg(const std::vector<BoundRow>& rows, const std::string& title) {
  if (rows.empty()) throw DataError("bound series: no rows to plot");
  constexpr double width = 720, height = 400, left = 60, right = 20, top = 40, bottom = 50;
  const double plot_w = width - left - right, plot_h = height - top - bottom;
  const auto first = rows.front().date.days(), last = rows.back().date.days();
  const double span_days = static_cast<double>((last - first).count());
  auto x_of = [&](Date d) {
    if (span_days == 0) return left + plot_w / 2;
    return left + plot_w * static_cast<double>((d.days() - first).count()) / span_days;
  };
  auto y_of = [&](double v) { return top + plot_h * (1.0 - v); };

  std::string svg;
  svg += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n", width,
      height, width, height);
  svg += fmt::format("<title>{}</title>\n", title);
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += fmt::format("<text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">{}</text>\n", left, title);
  // Axes and y ticks.
  svg += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>\n", left, top, top + plot_h);
  svg += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"black\"/>\n", left, top + plot_h,
                     left + plot_w);
  for (int k = 0; k <= 5; ++k) {
    double v = k / 5.0;
    svg += fmt::format(
        "<text x=\"{}\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">{:.1f}</text>\n",
        left - 6, y_of(v) + 3, v);
  }
  svg += fmt::format(
      "<text x=\"{:.2f}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">{}</text>\n",
      x_of(rows.front().date), top + plot_h + 16, rows.front().date.iso());
  if (rows.size() > 1) {
    svg += fmt::format(
        "<text x=\"{:.2f}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">{}</text>\n",
        x_of(rows.back().date), top + plot_h + 16, rows.back().date.iso());
  }

  std::string band, upper, lower;
  for (const auto& r : rows) band += fmt::format("{:.2f},{:.2f} ", x_of(r.date), y_of(r.hi));
  for (auto it = rows.rbegin(); it != rows.rend(); ++it) {
    band += fmt::format("{:.2f},{:.2f} ", x_of(it->date), y_of(it->lo));
  }
  for (const auto& r : rows) {
    upper += fmt::format("{:.2f},{:.2f} ", x_of(r.date), y_of(r.hi));
    lower += fmt::format("{:.2f},{:.2f} ", x_of(r.date), y_of(r.lo));
  }
  band.pop_back();
  upper.pop_back();
  lower.pop_back();
  svg += fmt::format("<polygon class=\"band\" points=\"{}\" fill=\"#9ecae1\" fill-opacity=\"0.6\" stroke=\"none\"/>\n", band);
  svg += fmt::format("<polyline class=\"upper\" points=\"{}\" fill=\"none\" stroke=\"#08519c\"/>\n", upper);
  svg += fmt::format("<polyline class=\"lower\" points=\"{}\" fill=\"none\" stroke=\"#08519c\"/>\n", lower);
  for (const auto& r : rows) {
    svg += fmt::format(
        "<g class=\"band-point\" data-date=\"{}\" data-method=\"{}\" data-lo=\"{}\" data-hi=\"{}\">"
        "<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"#08519c\" stroke-width=\"2\"/></g>\n",
        r.date.iso(), r.method, r.lo_text, r.hi_text, x_of(r.date), y_of(r.hi), x_of(r.date), y_of(r.lo));
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace idb
