// idbounds: interval bounds on infection and severe-illness rates from
// surveillance counts.

#include <CLI11.hpp>
#include <fmt/format.h>

#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include "idb/config.hpp"
#include "idb/errors.hpp"
#include "idb/report.hpp"

namespace {

using namespace idb;

struct Options {
  std::string input;
  std::string config;
  std::string method;
  std::string miss_rate;
  std::string refine;
  std::string format = "text";
  std::string output;
  std::string repair = "reject";
  std::vector<std::string> outcomes;
  std::size_t seeds = 0;
  std::string export_prefix;
};

void emit(const Options& opt, const std::string& text) {
  if (opt.output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(opt.output, std::ios::binary);
  if (!out) throw UsageError(fmt::format("{}: cannot open output file", opt.output));
  out << text;
}

RegionSeries load_series(const Options& opt, const RunConfig& cfg) {
  if (opt.input.empty()) throw UsageError("--input is required");
  RepairMode mode = RepairMode::reject;
  if (opt.repair == "clamp") {
    mode = RepairMode::clamp;
  } else if (opt.repair != "reject") {
    throw UsageError(fmt::format("--repair must be reject or clamp, got '{}'", opt.repair));
  }
  auto parsed = read_region_series(opt.input, cfg.columns, cfg.region_id, mode);
  for (const auto& line : parsed.repairs) std::cerr << opt.input << ": repair: " << line << '\n';
  try {
    return apply_window(parsed.series, cfg.window);
  } catch (const DataError& e) {
    throw DataError(fmt::format("{}: {}", opt.input, e.what()));
  }
}

ProbInterval interval_flag(const std::string& flag, const std::string& text) {
  try {
    return parse_interval(text);
  } catch (const UsageError& e) {
    throw UsageError(fmt::format("{}: {}", flag, e.what()));
  }
}

RunConfig load_config(const Options& opt) {
  if (opt.config.empty()) throw UsageError("--config is required");
  auto cfg = RunConfig::load(opt.config);
  if (!opt.miss_rate.empty()) {
    auto m = interval_flag("--miss-rate", opt.miss_rate);
    cfg.assumptions.accuracy = AccuracySpec{AccuracyKind::direct_miss_rate, m.lo, m.hi};
    cfg.assumptions.miss_rate_by_date.clear();
  }
  if (!opt.refine.empty()) cfg.assumptions.alpha = interval_flag("--refine-asymptomatic", opt.refine);
  return cfg;
}

void print_warnings(const Options& opt, const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << opt.input << ": warning: " << w << '\n';
}

int cmd_rates(const Options& opt) {
  auto cfg = load_config(opt);
  auto series = load_series(opt, cfg);
  emit(opt, render_rates(series, parse_format(opt.format)));
  return 0;
}

int cmd_bounds(const Options& opt) {
  auto cfg = load_config(opt);
  auto series = load_series(opt, cfg);
  Method method = Method::temporal_envelope;
  if (!opt.method.empty()) {
    method = parse_method(opt.method);
  } else if (!opt.refine.empty()) {
    method = Method::asym_refined;
  }
  std::vector<std::string> warnings;
  BoundSeries bounds;
  try {
    bounds = compute_bounds(series, cfg.assumptions, method, &warnings);
  } catch (const InconsistencyError& e) {
    throw InconsistencyError(fmt::format("{}: {}", opt.input, e.what()));
  }
  print_warnings(opt, warnings);
  emit(opt, render_bounds(bounds, parse_format(opt.format)));
  return 0;
}

int cmd_severe(const Options& opt) {
  auto cfg = load_config(opt);
  auto series = load_series(opt, cfg);
  std::vector<Outcome> outcomes;
  if (opt.outcomes.empty()) {
    outcomes = {Outcome::hospitalization, Outcome::icu, Outcome::death};
  } else {
    for (const auto& o : opt.outcomes) outcomes.push_back(parse_outcome(o));
  }
  std::vector<std::string> warnings;
  std::map<Outcome, BoundSeries> by_outcome;
  for (auto o : outcomes) {
    try {
      by_outcome.emplace(o, compute_severe(series, cfg.assumptions, o, &warnings));
    } catch (const DataError& e) {
      throw DataError(fmt::format("{}: {}", opt.input, e.what()));
    } catch (const InconsistencyError& e) {
      throw InconsistencyError(fmt::format("{}: {}", opt.input, e.what()));
    }
  }
  print_warnings(opt, warnings);
  emit(opt, render_severe(by_outcome, parse_format(opt.format)));
  return 0;
}

int cmd_sweep(const Options& opt) {
  auto cfg = load_config(opt);
  if (!cfg.sweep) throw UsageError(fmt::format("{}: config has no 'sweep' section", opt.config));
  auto series = load_series(opt, cfg);
  auto result = run_sweep(series, cfg.sweep->grid, cfg.sweep->date, cfg.assumptions);
  emit(opt, render_sweep(result, parse_format(opt.format)));
  return 0;
}

int cmd_simulate(const Options& opt) {
  auto cfg = load_config(opt);
  if (!cfg.simulation) throw UsageError(fmt::format("{}: config has no 'simulation' section", opt.config));
  const auto& sim = *cfg.simulation;
  auto assumptions = constant_assumptions(cfg.assumptions);
  std::size_t n = opt.seeds > 0 ? opt.seeds : sim.seeds;
  std::vector<std::uint64_t> seeds(n);
  std::iota(seeds.begin(), seeds.end(), sim.params.seed);
  if (!opt.export_prefix.empty()) {
    auto world = simulate(sim.params);
    std::ofstream surv(opt.export_prefix + "_surveillance.csv", std::ios::binary);
    std::ofstream truth(opt.export_prefix + "_truth.csv", std::ios::binary);
    if (!surv || !truth) throw UsageError(fmt::format("{}: cannot write export files", opt.export_prefix));
    write_canonical_csv(world.surveillance(), surv);
    world.write_truth_csv(truth);
  }
  auto summary = run_coverage(sim.params, seeds, assumptions, sim.methods);
  emit(opt, render_coverage(summary, sim.methods, parse_format(opt.format)));
  return summary.failed() ? static_cast<int>(ErrorKind::coverage) : 0;
}

int cmd_plot(const Options& opt) {
  if (opt.input.empty()) throw UsageError("--input is required");
  std::ifstream in(opt.input, std::ios::binary);
  if (!in) throw UsageError(fmt::format("{}: cannot open input file", opt.input));
  std::stringstream buf;
  buf << in.rdbuf();
  std::vector<BoundRow> rows;
  try {
    rows = parse_bound_csv(buf.str());
  } catch (const DataError& e) {
    throw DataError(fmt::format("{}: {}", opt.input, e.what()));
  }
  emit(opt, render_band_svg(rows, fmt::format("{}: bounds ({})", opt.input, rows.front().method)));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interval bounds on infection and severe-illness rates from surveillance counts"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    sub->add_option("--input,-i", opt.input, "surveillance CSV (plot: bound-series CSV)");
    if (needs_config) sub->add_option("--config,-c", opt.config, "JSON run config")->required();
    sub->add_option("--format,-f", opt.format, "text | csv | json")
        ->check(CLI::IsMember({"text", "csv", "json"}));
    sub->add_option("--output,-o", opt.output, "write here instead of stdout");
  };
  auto add_assumptions = [&](CLI::App* sub) {
    sub->add_option("--miss-rate", opt.miss_rate, "override miss-rate interval LO:HI");
    sub->add_option("--repair", opt.repair, "reject | clamp decreasing cumulative counts")
        ->check(CLI::IsMember({"reject", "clamp"}));
  };

  auto* rates = app.add_subcommand("rates", "observable testing and severe-outcome rates per date");
  add_common(rates, true);
  rates->add_option("--repair", opt.repair, "reject | clamp decreasing cumulative counts")
      ->check(CLI::IsMember({"reject", "clamp"}));

  auto* bounds = app.add_subcommand("bounds", "bounds on the infection rate per date");
  add_common(bounds, true);
  add_assumptions(bounds);
  bounds->add_option("--method,-m", opt.method,
                     "worst_case | testing_monotone | envelope | asym_refined (default envelope)")
      ->check(CLI::IsMember({"worst_case", "testing_monotone", "envelope", "temporal_envelope", "asym_refined"}));
  bounds->add_option("--refine-asymptomatic", opt.refine, "asymptomatic share interval LO:HI");

  auto* severe = app.add_subcommand("severe", "bounds on severe-illness rates conditional on infection");
  add_common(severe, true);
  add_assumptions(severe);
  severe->add_option("--outcome", opt.outcomes, "H | U | D (repeatable; default all)");

  auto* sweep = app.add_subcommand("sweep", "bounds over a grid of assumptions");
  add_common(sweep, true);
  add_assumptions(sweep);

  auto* sim = app.add_subcommand("simulate", "coverage check on simulated populations");
  add_common(sim, true);
  sim->add_option("--seeds", opt.seeds, "number of worlds (overrides config)");
  sim->add_option("--export", opt.export_prefix,
                  "write PREFIX_surveillance.csv and PREFIX_truth.csv for the first seed");

  auto* plot = app.add_subcommand("plot", "SVG band chart of a bound-series CSV");
  add_common(plot, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ErrorKind::usage);
  }

  try {
    if (*rates) return cmd_rates(opt);
    if (*bounds) return cmd_bounds(opt);
    if (*severe) return cmd_severe(opt);
    if (*sweep) return cmd_sweep(opt);
    if (*sim) return cmd_simulate(opt);
    if (*plot) return cmd_plot(opt);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(ErrorKind::usage);
  }
  return static_cast<int>(ErrorKind::usage);
}
