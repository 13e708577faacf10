#pragma once

#include <charconv>
#include <cstdlib>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "collapse/chsh.hpp"
#include "collapse/config.hpp"
#include "collapse/csv.hpp"
#include "collapse/dynamics.hpp"
#include "collapse/ensemble.hpp"
#include "collapse/interference.hpp"
#include "collapse/malus.hpp"
#include "collapse/model.hpp"
#include "collapse/svg.hpp"
#include "collapse/tau_estimate.hpp"

namespace collapse::cli {

namespace detail {

inline void emit(const CsvTable& table, const std::string& out_path) {
  if (out_path.empty())
    write_csv(table, std::cout);
  else
    write_csv_file(table, out_path);
}

inline BranchSigns parse_signs(const std::string& text) {
  if (text.size() != 2 || (text[0] != '+' && text[0] != '-') ||
      (text[1] != '+' && text[1] != '-'))
    throw std::invalid_argument(
        "--signs must be two characters from {+,-}, e.g. +-");
  BranchSigns signs;
  signs.alpha[0] = text[0] == '+' ? +1 : -1;
  signs.alpha[1] = text[1] == '+' ? +1 : -1;
  return signs;
}

inline std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> values;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const std::string item =
        text.substr(pos, comma == std::string::npos ? comma : comma - pos);
    double v = 0.0;
    const auto res = std::from_chars(item.data(), item.data() + item.size(), v);
    if (res.ec != std::errc{} || res.ptr != item.data() + item.size())
      throw std::invalid_argument("invalid number '" + item + "' in list");
    values.push_back(v);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (values.empty()) throw std::invalid_argument("empty number list");
  return values;
}

/// Worker-count override; 0 (or unset) means pick automatically.
inline unsigned threads_from_env() {
  const char* env = std::getenv("COLLAPSE_LAB_THREADS");
  if (env == nullptr || *env == '\0') return 0;
  unsigned v = 0;
  const std::string text(env);
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
    throw ConfigError({"COLLAPSE_LAB_THREADS must be an unsigned integer"});
  return v;
}

inline std::vector<double> linspace(double lo, double hi, std::size_t points) {
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i)
    grid[i] = lo + (hi - lo) * static_cast<double>(i) /
                       static_cast<double>(points - 1);
  return grid;
}

}  // namespace detail

struct CollapseArgs {
  std::string config_path;
  std::string signs = "+-";
  double t_end = -1.0;  // tau_r units; negative = take from config
  double step = -1.0;
  std::string out, svg;
  bool seconds = false;
};

inline void run_collapse(const CollapseArgs& args) {
  const RunConfig rc = parse_config(args.config_path);
  require_keys(rc, {"x0_1", "x0_2", "tau_r"});
  const TwoStateConfig cfg = rc.two_state();
  cfg.validate();
  const BranchSigns signs = detail::parse_signs(args.signs);

  IntegratorSettings st = rc.integrator();
  if (args.t_end >= 0.0) st.t_end = args.t_end;
  if (args.step > 0.0) st.step = args.step;
  st.step *= cfg.tau_r;  // config and flags use tau_r units
  st.t_end *= cfg.tau_r;

  PhaseModel pm = rc.phase_model();
  pm.step_period *= cfg.tau_r;

  const Trajectory traj = integrate(cfg, signs, pm, st);

  CsvTable table;
  table.header = {"t", "x1", "x2", "q"};
  for (std::size_t i = 0; i < traj.samples.size(); ++i) {
    const SystemState& s = traj.samples[i];
    const double t_col = args.seconds ? s.t : s.t / cfg.tau_r;
    table.rows.push_back({t_col, s.x[0], s.x[1], traj.q_series[i]});
  }
  detail::emit(table, args.out);

  if (!args.svg.empty()) {
    std::vector<PlotSeries> series(3);
    series[0].label = "x1";
    series[1].label = "x2";
    series[2].label = "q";
    for (std::size_t i = 0; i < traj.samples.size(); ++i) {
      const double t_col =
          args.seconds ? traj.samples[i].t : traj.samples[i].t / cfg.tau_r;
      series[0].x.push_back(t_col);
      series[0].y.push_back(traj.samples[i].x[0]);
      series[1].x.push_back(t_col);
      series[1].y.push_back(traj.samples[i].x[1]);
      series[2].x.push_back(t_col);
      series[2].y.push_back(traj.q_series[i]);
    }
    write_svg_file(args.svg, "two-state collapse",
                   args.seconds ? "t [s]" : "t / tau_r", "weight / q", series);
  }
}

struct EnsembleArgs {
  std::string config_path;
  std::string mode;           // empty = take from config
  std::int64_t n = -1;        // negative = take from config
  std::int64_t seed = -1;
  double t_end = -1.0;
  double delta = -1.0;
  std::string out;
};

inline void run_ensemble_cmd(const EnsembleArgs& args) {
  const RunConfig rc = parse_config(args.config_path);
  require_keys(rc, {"x0_1", "x0_2", "tau_r"});
  const TwoStateConfig cfg = rc.two_state();
  cfg.validate();

  SamplingSpec sampling = rc.sampling();
  if (!args.mode.empty()) {
    if (args.mode != "independent" && args.mode != "common_chaotic")
      throw std::invalid_argument(
          "--mode must be independent or common_chaotic");
    sampling.mode = args.mode == "independent" ? SamplingMode::Independent
                                               : SamplingMode::CommonChaotic;
  }
  if (args.n >= 0) sampling.n_trajectories = static_cast<std::uint64_t>(args.n);
  if (args.seed >= 0) sampling.master_seed = static_cast<std::uint64_t>(args.seed);
  sampling.validate();

  IntegratorSettings st = rc.integrator();
  if (args.t_end >= 0.0) st.t_end = args.t_end;
  st.step *= cfg.tau_r;
  st.t_end *= cfg.tau_r;

  const double delta = args.delta > 0.0 ? args.delta : rc.delta();
  const OutcomeStats stats =
      run_ensemble(cfg, sampling, st, delta, detail::threads_from_env());

  CsvTable table;
  table.header = {"outcome", "count",       "frequency",
                  "std_error", "master_seed", "mode",
                  "n_total"};
  for (OutcomeClass c : kAllOutcomeClasses) {
    table.rows.push_back({std::string(to_string(c)), stats.count(c),
                          stats.frequency(c), stats.standard_error(c),
                          stats.master_seed, std::string(to_string(stats.mode)),
                          stats.n_trajectories});
  }
  detail::emit(table, args.out);
}

struct MalusArgs {
  std::string angles = "20,30,45";  // degrees
  double t_max = 10.0;              // tau_r units
  std::size_t steps = 200;          // grid points
  std::string out, svg;
};

inline void run_malus(const MalusArgs& args) {
  const std::vector<double> degrees = detail::parse_number_list(args.angles);
  if (args.steps < 2)
    throw std::invalid_argument("--steps must be at least 2");
  if (!(args.t_max > 0.0))
    throw std::invalid_argument("--t-max must be positive");

  MalusSpec spec;
  spec.tau_r = 1.0;  // work directly in tau_r units
  for (double deg : degrees)
    spec.epsilon.push_back(deg * std::numbers::pi / 180.0);
  spec.t_grid = detail::linspace(0.0, args.t_max, args.steps);
  const auto rows = malus_deviation_curve(spec);

  CsvTable table;
  table.header = {"eps_deg", "t_over_tau", "expectation", "ratio_to_malus"};
  for (std::size_t a = 0; a < degrees.size(); ++a)
    for (std::size_t i = 0; i < spec.t_grid.size(); ++i) {
      const MalusRow& r = rows[a * spec.t_grid.size() + i];
      table.rows.push_back({degrees[a], r.t, r.expectation, r.ratio_to_malus});
    }
  detail::emit(table, args.out);

  if (!args.svg.empty()) {
    std::vector<PlotSeries> series(degrees.size());
    for (std::size_t a = 0; a < degrees.size(); ++a) {
      series[a].label = "eps=" + format_double(degrees[a]) + " deg";
      for (std::size_t i = 0; i < spec.t_grid.size(); ++i) {
        const MalusRow& r = rows[a * spec.t_grid.size() + i];
        series[a].x.push_back(r.t);
        series[a].y.push_back(r.ratio_to_malus);
      }
    }
    write_svg_file(args.svg, "transmission relative to Malus's law",
                   "t / tau_r", "<x> / sin^2(eps)", series);
  }
}

struct ChshArgs {
  bool paper_setting = false;
  bool references = false;
  std::int64_t lhv_samples = -1;  // >= 0 enables the LHV mode
  std::uint64_t seed = 1;
  std::string out;
};

inline void run_chsh(const ChshArgs& args) {
  const int modes = (args.paper_setting ? 1 : 0) + (args.references ? 1 : 0) +
                    (args.lhv_samples >= 0 ? 1 : 0);
  if (modes > 1)
    throw std::invalid_argument(
        "choose one of --paper-setting, --lhv-max, --references");

  CsvTable table;
  if (args.references) {
    table.header = {"setting", "F", "uncertainty"};
    for (const auto& ref : kChshReferences)
      table.rows.push_back({std::string(ref.label), ref.value, ref.uncertainty});
  } else if (args.lhv_samples >= 0) {
    table.header = {"setting", "F"};
    table.rows.push_back(
        {std::string("lhv_exhaustive"), chsh_lhv_max(0, args.seed, true)});
    if (args.lhv_samples > 0)
      table.rows.push_back(
          {std::string("lhv_sampled"),
           chsh_lhv_max(static_cast<std::uint64_t>(args.lhv_samples),
                        args.seed, false)});
  } else {
    table.header = {"setting", "F"};
    table.rows.push_back(
        {std::string("paper"), chsh_value(ChshSetting::rotated_45())});
  }
  detail::emit(table, args.out);
}

struct InterfereArgs {
  double lambda = 500e-9;
  double separation = 10e-6;
  double distance = 0.1;
  double half_width = 0.01;
  std::size_t points = 501;
  double theta1 = 0.0;
  double theta2 = 0.0;
  std::string out, svg;
};

inline void run_interfere(const InterfereArgs& args) {
  if (!(args.lambda > 0.0) || !(args.separation > 0.0) ||
      !(args.distance > 0.0) || !(args.half_width > 0.0) || args.points < 2)
    throw std::invalid_argument(
        "interfere: lambda, separation, distance, half-width must be positive "
        "and points >= 2");

  InterferenceSpec spec;
  spec.sources = {{-0.5 * args.separation, args.theta1},
                  {+0.5 * args.separation, args.theta2}};
  spec.distance = args.distance;
  spec.wavenumber = kTwoPi / args.lambda;
  spec.screen = screen_grid(args.half_width, args.points);
  spec.validate();
  if (!spec.far_field_ok())
    std::cerr << "warning: screen distance is less than 100x the source "
                 "extent; far-field approximation may be poor\n";

  const auto intensity = interference_pattern(spec);
  CsvTable table;
  table.header = {"y_prime", "intensity"};
  for (std::size_t i = 0; i < spec.screen.size(); ++i)
    table.rows.push_back({spec.screen[i], intensity[i]});
  detail::emit(table, args.out);

  if (!args.svg.empty()) {
    PlotSeries series;
    series.label = "|A|^2";
    series.x = spec.screen;
    series.y = intensity;
    write_svg_file(args.svg, "two-source interference", "y' [m]", "intensity",
                   {series});
  }
}

struct EstimateTauArgs {
  double lambda_nm = 400.0;
  std::string out;
};

inline void run_estimate_tau(const EstimateTauArgs& args) {
  if (!(args.lambda_nm > 0.0))
    throw std::invalid_argument("--lambda-nm must be positive");
  const TauEstimate est = estimate_tau(args.lambda_nm * 1e-9);
  CsvTable table;
  table.header = {"lambda_nm", "tau_s", "reported_upper_bound_s"};
  table.rows.push_back({args.lambda_nm, est.tau_s, est.reported_upper_bound_s});
  detail::emit(table, args.out);
}

/// Build the CLI and run one invocation. Exit codes: 0 success, 1 validation
/// problem (bad flags, bad config), 2 runtime failure.
inline int run_cli(int argc, const char* const* argv) {
  CLI::App app{"two-state collapse model: trajectories, Born-rule ensembles "
               "and experiment predictions"};
  app.require_subcommand(1);

  CollapseArgs collapse_args;
  auto* collapse_cmd =
      app.add_subcommand("collapse", "integrate one collapse trajectory");
  collapse_cmd->add_option("--config", collapse_args.config_path,
                           "key = value config file")->required();
  collapse_cmd->add_option("--signs", collapse_args.signs,
                           "branch signs, e.g. +- or ++");
  collapse_cmd->add_option("--t-end", collapse_args.t_end,
                           "end time in units of tau_r");
  collapse_cmd->add_option("--step", collapse_args.step,
                           "integrator step in units of tau_r");
  collapse_cmd->add_option("--out", collapse_args.out, "CSV output path");
  collapse_cmd->add_option("--svg", collapse_args.svg, "SVG plot path");
  collapse_cmd->add_flag("--seconds", collapse_args.seconds,
                         "report time in seconds instead of tau_r units");

  EnsembleArgs ensemble_args;
  auto* ensemble_cmd = app.add_subcommand(
      "ensemble", "sample collapse outcomes over many trajectories");
  ensemble_cmd->add_option("--config", ensemble_args.config_path,
                           "key = value config file")->required();
  ensemble_cmd->add_option("--mode", ensemble_args.mode,
                           "independent or common_chaotic");
  ensemble_cmd->add_option("--n", ensemble_args.n, "number of trajectories");
  ensemble_cmd->add_option("--seed", ensemble_args.seed, "master seed");
  ensemble_cmd->add_option("--t-end", ensemble_args.t_end,
                           "end time in units of tau_r");
  ensemble_cmd->add_option("--delta", ensemble_args.delta,
                           "outcome threshold in (0, 0.5)");
  ensemble_cmd->add_option("--out", ensemble_args.out, "CSV output path");

  MalusArgs malus_args;
  auto* malus_cmd = app.add_subcommand(
      "malus", "transmission deviation from Malus's law");
  malus_cmd->add_option("--angles", malus_args.angles,
                        "comma-separated polarizer angles in degrees");
  malus_cmd->add_option("--t-max", malus_args.t_max,
                        "largest time in units of tau_r");
  malus_cmd->add_option("--steps", malus_args.steps, "number of grid points");
  malus_cmd->add_option("--out", malus_args.out, "CSV output path");
  malus_cmd->add_option("--svg", malus_args.svg, "SVG plot path");

  ChshArgs chsh_args;
  auto* chsh_cmd =
      app.add_subcommand("chsh", "CHSH functional values and bounds");
  chsh_cmd->add_flag("--paper-setting", chsh_args.paper_setting,
                     "45-degree rotated singlet setting (default)");
  chsh_cmd->add_option("--lhv-max", chsh_args.lhv_samples,
                       "local deterministic strategies to sample "
                       "(0 = exhaustive sweep only)");
  chsh_cmd->add_flag("--references", chsh_args.references,
                     "reported experimental values");
  chsh_cmd->add_option("--seed", chsh_args.seed, "seed for sampled strategies");
  chsh_cmd->add_option("--out", chsh_args.out, "CSV output path");

  InterfereArgs interfere_args;
  auto* interfere_cmd = app.add_subcommand(
      "interfere", "two-source far-field interference pattern");
  interfere_cmd->add_option("--lambda", interfere_args.lambda,
                            "wavelength in meters");
  interfere_cmd->add_option("--separation", interfere_args.separation,
                            "source separation in meters");
  interfere_cmd->add_option("--distance", interfere_args.distance,
                            "screen distance in meters");
  interfere_cmd->add_option("--half-width", interfere_args.half_width,
                            "half extent of the screen in meters");
  interfere_cmd->add_option("--points", interfere_args.points,
                            "screen sample count");
  interfere_cmd->add_option("--theta1", interfere_args.theta1,
                            "phase of source 1 in radians");
  interfere_cmd->add_option("--theta2", interfere_args.theta2,
                            "phase of source 2 in radians");
  interfere_cmd->add_option("--out", interfere_args.out, "CSV output path");
  interfere_cmd->add_option("--svg", interfere_args.svg, "SVG plot path");

  EstimateTauArgs tau_args;
  auto* tau_cmd = app.add_subcommand(
      "estimate-tau", "reduction-time scale for a photon wavelength");
  tau_cmd->add_option("--lambda-nm", tau_args.lambda_nm,
                      "photon wavelength in nanometers");
  tau_cmd->add_option("--out", tau_args.out, "CSV output path");

  try {
    app.parse(argc, argv);
    if (collapse_cmd->parsed()) run_collapse(collapse_args);
    if (ensemble_cmd->parsed()) run_ensemble_cmd(ensemble_args);
    if (malus_cmd->parsed()) run_malus(malus_args);
    if (chsh_cmd->parsed()) run_chsh(chsh_args);
    if (interfere_cmd->parsed()) run_interfere(interfere_args);
    if (tau_cmd->parsed()) run_estimate_tau(tau_args);
    return 0;
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  } catch (const ConfigError& e) {
    std::cerr << e.what() << '\n';
    return 1;
  } catch (const FileNotFound& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const EndpointAngle& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const Error& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return 2;
  }
}

/// Convenience overload for in-process tests: args exclude the program name.
inline int run_cli(const std::vector<std::string>& args) {
  std::vector<std::string> storage;
  storage.reserve(args.size() + 1);
  storage.push_back("collapse-lab");
  for (const auto& a : args) storage.push_back(a);
  std::vector<const char*> argv;
  argv.reserve(storage.size());
  for (const auto& s : storage) argv.push_back(s.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace collapse::cli
