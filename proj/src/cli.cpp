// Copyright 2026 The qsl-toolkit authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qsl/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <set>
#include <thread>

#include <json.hpp>

#include "qsl/dynamics.hpp"
#include "qsl/markovianity.hpp"

namespace qsl {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr double kInvSqrt2 = 0.70710678118654752;

using nlohmann::ordered_json;

std::string format_g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct AnalysisOutput {
  TimeSeries delta_qfi;
  TimeSeries delta_wy;
  TimeSeries delta_diff;
  QslReport report;
  MarkovianityVerdict verdict;
  double revival_period = kNan;  ///< mean revival peak spacing [s]
};

/// Shared running-endpoint delta machinery for model and data paths.
AnalysisOutput build_deltas(const RunConfig& config,
                            const std::vector<double>& times,
                            const std::vector<double>& sx_values,
                            const std::vector<double>& cum_qfi,
                            const std::vector<double>& cum_wy,
                            double quadrature_error) {
  AnalysisOutput out;
  const std::size_t n = times.size();
  const double x0 = sx_values.front();
  const double z0 = config.z0;

  out.delta_qfi.t = times;
  out.delta_qfi.label = "delta_qfi";
  out.delta_qfi.value.assign(n, kNan);
  out.delta_wy.t = times;
  out.delta_wy.label = "delta_wy";
  out.delta_wy.value.assign(n, kNan);
  out.delta_diff.t = times;
  out.delta_diff.label = "delta_qfi_minus_wy";
  out.delta_diff.value.assign(n, kNan);

  double final_l_qfi = kNan, final_l_wy = kNan;
  for (std::size_t k = 1; k < n; ++k) {
    const double xt = sx_values[k];
    const double l_qfi = geodesic_length(x0, xt, z0, MetricKind::kQfi);
    const double l_wy = geodesic_length(x0, xt, z0, MetricKind::kWy);
    final_l_qfi = l_qfi;
    final_l_wy = l_wy;
    if (l_qfi > 1e-9 && l_wy > 1e-9) {
      out.delta_qfi.value[k] = relative_deviation(cum_qfi[k], l_qfi);
      out.delta_wy.value[k] = relative_deviation(cum_wy[k], l_wy);
      out.delta_diff.value[k] =
          out.delta_qfi.value[k] - out.delta_wy.value[k];
    }
  }

  if (!(cum_qfi.back() > 0.0))
    throw DataError(
        "analyze: input has zero path length (constant <sx>); relative "
        "deviation is undefined");

  out.report.qfi = {cum_qfi.back(), final_l_qfi,
                    relative_deviation(cum_qfi.back(), final_l_qfi)};
  out.report.wy = {cum_wy.back(), final_l_wy,
                   relative_deviation(cum_wy.back(), final_l_wy)};
  const CrossoverResult crossings = crossover_times(
      out.delta_qfi, out.delta_wy, config.crossover_noise_floor);
  out.report.crossover_times = crossings.times;
  out.report.tighter_timeline = crossings.timeline;
  out.report.validate(10.0 * std::max(quadrature_error, config.quad_abs_tol));

  TimeSeries sx;
  sx.t = times;
  sx.value = sx_values;
  sx.label = "sx";
  out.verdict = revival_intervals(coherence_series(sx), config.revival_threshold);
  if (out.verdict.revival_intervals.size() >= 2) {
    const auto& iv = out.verdict.revival_intervals;
    out.revival_period =
        (iv.back().second - iv.front().second) / double(iv.size() - 1);
  }
  return out;
}

AnalysisOutput analyze_model(const RunConfig& config) {
  config.validate();
  const BlochVector b0{config.x0, 0.0, config.z0};
  std::vector<double> times(config.n_points + 1);
  for (int k = 0; k <= config.n_points; ++k)
    times[k] = config.t_max * static_cast<double>(k) / config.n_points;

  std::vector<double> sx(times.size());
  for (std::size_t k = 0; k < times.size(); ++k)
    sx[k] = xi(times[k], config.params) * config.x0;

  const QuadratureOptions quad = config.quadrature();
  const std::vector<double> cum_qfi =
      cumulative_path_length(config.params, b0, MetricKind::kQfi, times, quad);
  const std::vector<double> cum_wy =
      cumulative_path_length(config.params, b0, MetricKind::kWy, times, quad);
  const double err_scale = config.quad_rel_tol * cum_qfi.back();
  return build_deltas(config, times, sx, cum_qfi, cum_wy, err_scale);
}

AnalysisOutput analyze_data(const RunConfig& config, const TimeSeries& raw) {
  config.validate();
  validate_series(raw, 2);
  TimeSeries prepared = raw;
  if (static_cast<std::size_t>(config.smooth_window) <= raw.size())
    prepared = smooth(raw, config.smooth_window, config.smooth_degree);
  if (prepared.value.front() == 0.0)
    throw DataError("analyze: first sample is zero; cannot rescale to x0");
  // Rescale so the series starts at the configured <sx>_0.
  prepared = normalize(prepared, prepared.value.front() / config.x0);

  const std::vector<double> cum_qfi =
      cumulative_path_length(prepared, config.z0, MetricKind::kQfi);
  const std::vector<double> cum_wy =
      cumulative_path_length(prepared, config.z0, MetricKind::kWy);
  return build_deltas(config, prepared.t, prepared.value, cum_qfi, cum_wy,
                      config.quad_rel_tol * std::max(cum_qfi.back(), 1.0));
}

ordered_json report_to_json(const AnalysisOutput& out, const RunConfig& config) {
  ordered_json j;
  for (const auto& [key, metric] :
       {std::pair{"qfi", &out.report.qfi}, std::pair{"wy", &out.report.wy}}) {
    j[key] = {{"path_length", metric->path_length},
              {"geodesic_length", metric->geodesic_length},
              {"delta", metric->delta}};
  }
  j["crossover_times"] = out.report.crossover_times;
  ordered_json timeline = ordered_json::array();
  for (const auto& seg : out.report.tighter_timeline)
    timeline.push_back({{"t_begin", seg.t_begin},
                        {"t_end", seg.t_end},
                        {"tighter", metric_name(seg.tighter)}});
  j["tighter_metric_timeline"] = timeline;
  ordered_json revivals = ordered_json::array();
  for (const auto& [start, end] : out.verdict.revival_intervals)
    revivals.push_back({start, end});
  j["markovianity"] = {{"is_non_markovian", out.verdict.is_non_markovian},
                       {"measure", out.verdict.measure},
                       {"revival_count", out.verdict.revival_intervals.size()},
                       {"revival_period_s", out.revival_period},
                       {"revival_intervals", revivals}};
  j["config"] = {{"t1h_s", config.params.t1h}, {"t2c_s", config.params.t2c},
                 {"j_hz", config.params.j},    {"x0", config.x0},
                 {"z0", config.z0},            {"t_max_s", config.t_max},
                 {"n_points", config.n_points}};
  return j;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << text << "\n";
}

std::filesystem::path ensure_output_dir(const RunConfig& config) {
  std::filesystem::path dir(config.output_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw DataError("cannot create output directory '" + dir.string() + "'");
  return dir;
}

}  // namespace

const std::vector<Preset>& presets() {
  static const std::vector<Preset> kPresets = {
      {"20mM-sim", 20.0, {7.1e-3, 38.55e-3, 209.1}, kInvSqrt2, kInvSqrt2},
      {"120mM-sim", 120.0, {1.15e-3, 12.8e-3, 209.1}, kInvSqrt2, kInvSqrt2},
      {"300mM-sim", 300.0, {0.425e-3, 5.49e-3, 209.1}, kInvSqrt2, kInvSqrt2},
      {"20mM-meas", 20.0, {12e-3, 480e-3, 209.1}, kInvSqrt2, kInvSqrt2},
      {"120mM-meas", 120.0, {1.7e-3, 87e-3, 209.1}, kInvSqrt2, kInvSqrt2},
      {"300mM-meas", 300.0, {0.63e-3, 29e-3, 209.1}, kInvSqrt2, kInvSqrt2},
  };
  return kPresets;
}

const Preset& find_preset(const std::string& name) {
  for (const Preset& p : presets())
    if (p.name == name) return p;
  throw DomainError("unknown preset '" + name + "'");
}

void RunConfig::validate() const {
  params.validate();
  if (!(t_max > 0.0)) throw DomainError("config: t_max must be > 0");
  if (n_points < 16) throw DomainError("config: n_points must be >= 16");
  if (!(quad_rel_tol > 0.0) || !(quad_abs_tol > 0.0))
    throw DomainError("config: quadrature tolerances must be > 0");
  if (!(trotter_dt > 0.0)) throw DomainError("config: trotter_dt must be > 0");
  if (!(crossover_noise_floor >= 0.0))
    throw DomainError("config: crossover_noise_floor must be >= 0");
  if (!(revival_threshold >= 0.0))
    throw DomainError("config: revival_threshold must be >= 0");
  const BlochVector b0{x0, 0.0, z0};
  if (!b0.is_physical())
    throw DomainError("config: initial state outside the Bloch ball");
}

QuadratureOptions RunConfig::quadrature() const {
  QuadratureOptions opts;
  opts.rel_tol = quad_rel_tol;
  opts.abs_tol = quad_abs_tol;
  return opts;
}

void RunConfig::apply_preset(const Preset& preset) {
  params = preset.params;
  x0 = preset.x0;
  z0 = preset.z0;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config '" + path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DomainError("config '" + path.string() + "': " + e.what());
  }
  try {
    if (j.contains("params")) {
      const auto& p = j["params"];
      if (p.contains("t1h")) base.params.t1h = p["t1h"].get<double>();
      if (p.contains("t2c")) base.params.t2c = p["t2c"].get<double>();
      if (p.contains("j")) base.params.j = p["j"].get<double>();
    }
    if (j.contains("initial_state")) {
      const auto& s = j["initial_state"];
      if (s.contains("x0")) base.x0 = s["x0"].get<double>();
      if (s.contains("z0")) base.z0 = s["z0"].get<double>();
    }
    if (j.contains("grid")) {
      const auto& g = j["grid"];
      if (g.contains("t_max")) base.t_max = g["t_max"].get<double>();
      if (g.contains("n_points")) base.n_points = g["n_points"].get<int>();
    }
    if (j.contains("quadrature")) {
      const auto& q = j["quadrature"];
      if (q.contains("rel_tol")) base.quad_rel_tol = q["rel_tol"].get<double>();
      if (q.contains("abs_tol")) base.quad_abs_tol = q["abs_tol"].get<double>();
    }
    if (j.contains("smoothing")) {
      const auto& s = j["smoothing"];
      if (s.contains("window")) base.smooth_window = s["window"].get<int>();
      if (s.contains("degree")) base.smooth_degree = s["degree"].get<int>();
    }
    if (j.contains("crossover_noise_floor"))
      base.crossover_noise_floor = j["crossover_noise_floor"].get<double>();
    if (j.contains("revival_threshold"))
      base.revival_threshold = j["revival_threshold"].get<double>();
    if (j.contains("output_dir"))
      base.output_dir = j["output_dir"].get<std::string>();
    if (j.contains("trotter_dt"))
      base.trotter_dt = j["trotter_dt"].get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw DomainError("config '" + path.string() + "': " + e.what());
  }
  return base;
}

int run_simulate(const RunConfig& config) {
  config.validate();
  const auto dir = ensure_output_dir(config);
  const BlochVector b0{config.x0, 0.0, config.z0};

  TimeSeries sx;
  sx.label = "sx";
  sx.t.resize(config.n_points + 1);
  sx.value.resize(config.n_points + 1);
  for (int k = 0; k <= config.n_points; ++k) {
    sx.t[k] = config.t_max * static_cast<double>(k) / config.n_points;
    sx.value[k] = xi(sx.t[k], config.params) * config.x0;
  }
  write_series(sx, dir / "sx.csv");
  write_series(coherence_series(sx), dir / "coherence.csv");

  const int n_steps =
      std::max(1, static_cast<int>(std::lround(config.t_max / config.trotter_dt)));
  const TrotterResult trotter =
      trotter_simulate(config.t_max, n_steps, b0, config.params);
  if (trotter.coarse_step_warning)
    std::cerr << "warning: trotter step exceeds 0.01/J; result may be coarse\n";
  write_series(trotter.sx, dir / "sx_trotter.csv");
  return 0;
}

int run_analyze(const RunConfig& config,
                const std::optional<std::filesystem::path>& input) {
  const AnalysisOutput out =
      input ? analyze_data(config, load_series(*input)) : analyze_model(config);
  const auto dir = ensure_output_dir(config);
  write_series(out.delta_qfi, dir / "delta_qfi.csv");
  write_series(out.delta_wy, dir / "delta_wy.csv");
  write_series(out.delta_diff, dir / "delta_diff.csv");
  write_text(dir / "report.json", report_to_json(out, config).dump(2));
  return 0;
}

int run_fit(const RunConfig& config, const std::filesystem::path& input,
            const FitRequest& request) {
  config.validate();
  const TimeSeries series = load_series(input);
  const auto dir = ensure_output_dir(config);

  const double span = series.t.back() - series.t.front();
  FitResult result;
  try {
    if (request.model == "expcos") {
      ExpCosGuess guess;
      guess.m0 = request.m0.value_or(series.value.front());
      guess.t2c = request.t2c.value_or(span / 3.0);
      guess.omega = request.omega.value_or(0.0);
      result = fit_exp_cos(series, guess);
    } else if (request.model == "xi") {
      XiModelGuess guess;
      guess.amplitude = request.amplitude.value_or(series.value.front());
      guess.params.t1h = request.t1h.value_or(5e-3);
      guess.params.t2c = request.t2c.value_or(std::max(span / 3.0, 1e-3));
      if (request.fix_j) {
        guess.fix_j = true;
        guess.params.j = *request.fix_j;
      } else {
        guess.params.j = request.j.value_or(209.1);
      }
      result = fit_xi_model(series, guess);
    } else {
      throw DomainError("unknown fit model '" + request.model +
                        "' (expected 'xi' or 'expcos')");
    }
  } catch (const FitError& e) {
    // Dump best-so-far so a failed fit is still inspectable.
    write_text(dir / "fit.json", e.best_so_far.to_json());
    std::cout << e.best_so_far.to_json() << std::endl;
    throw;
  }
  const std::string json = result.to_json();
  write_text(dir / "fit.json", json);
  std::cout << json << std::endl;
  return 0;
}

int run_sweep(const RunConfig& base, const std::vector<std::string>& names,
              int jobs) {
  if (names.empty()) throw DomainError("sweep: need at least one preset");
  {
    std::set<std::string> unique(names.begin(), names.end());
    if (unique.size() != names.size())
      throw DomainError("sweep: duplicate preset names");
  }
  std::vector<const Preset*> selected;
  for (const auto& name : names) selected.push_back(&find_preset(name));
  base.validate();

  struct Row {
    const Preset* preset = nullptr;
    bool ok = false;
    std::string message;
    AnalysisOutput out;
  };
  std::vector<Row> rows(selected.size());
  for (std::size_t i = 0; i < selected.size(); ++i) rows[i].preset = selected[i];

  if (jobs <= 0)
    jobs = std::max(1u, std::thread::hardware_concurrency());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= rows.size()) return;
      RunConfig config = base;
      config.apply_preset(*rows[i].preset);
      try {
        rows[i].out = analyze_model(config);
        rows[i].ok = true;
      } catch (const std::exception& e) {
        rows[i].message = e.what();
      }
    }
  };
  const std::size_t n_workers =
      std::min(static_cast<std::size_t>(jobs), rows.size());
  std::vector<std::thread> pool;
  pool.reserve(n_workers);
  for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    if (a.preset->concentration_mM != b.preset->concentration_mM)
      return a.preset->concentration_mM < b.preset->concentration_mM;
    return a.preset->name < b.preset->name;
  });

  const auto dir = ensure_output_dir(base);
  std::ofstream csv(dir / "sweep_summary.csv");
  if (!csv) throw DataError("cannot write sweep_summary.csv");
  csv << "preset,concentration_mM,t1h_s,t2c_s,j_hz,verdict,revival_count,"
         "revival_period_s,path_qfi,geodesic_qfi,delta_qfi,path_wy,"
         "geodesic_wy,delta_wy,crossover_count,last_crossover_s,status\n";
  for (const Row& row : rows) {
    const Preset& p = *row.preset;
    csv << p.name << ',' << format_g17(p.concentration_mM) << ','
        << format_g17(p.params.t1h) << ',' << format_g17(p.params.t2c) << ','
        << format_g17(p.params.j) << ',';
    if (row.ok) {
      const auto& r = row.out.report;
      const double last_crossing =
          r.crossover_times.empty() ? kNan : r.crossover_times.back();
      csv << (row.out.verdict.is_non_markovian ? "nonMarkovian" : "Markovian")
          << ',' << row.out.verdict.revival_intervals.size() << ','
          << format_g17(row.out.revival_period) << ','
          << format_g17(r.qfi.path_length) << ','
          << format_g17(r.qfi.geodesic_length) << ','
          << format_g17(r.qfi.delta) << ',' << format_g17(r.wy.path_length)
          << ',' << format_g17(r.wy.geodesic_length) << ','
          << format_g17(r.wy.delta) << ',' << r.crossover_times.size() << ','
          << format_g17(last_crossing) << ",ok\n";
    } else {
      csv << ",,,,,,,,,,failed: " << row.message << "\n";
    }
  }
  csv.close();
  if (!csv) throw DataError("write to sweep_summary.csv failed");

  // Relaxivity line through (concentration, 1/T1H) for distinct presets.
  std::vector<double> conc, rate;
  std::set<double> distinct;
  for (const Row& row : rows) {
    conc.push_back(row.preset->concentration_mM);
    rate.push_back(1.0 / row.preset->params.t1h);
    distinct.insert(row.preset->concentration_mM);
  }
  if (distinct.size() >= 2) {
    const LineFit fit = fit_relaxivity(conc, rate);
    ordered_json j = {{"slope_per_s_mM", fit.slope},
                      {"intercept_per_s", fit.intercept},
                      {"r_squared", fit.r_squared},
                      {"concentrations_mM", conc},
                      {"rates_per_s", rate}};
    write_text(dir / "relaxivity.json", j.dump(2));
  }
  return 0;
}

int exit_code_for(const std::exception& error) {
  if (dynamic_cast<const DataError*>(&error)) return 3;
  if (dynamic_cast<const ConvergenceError*>(&error)) return 4;
  if (dynamic_cast<const DomainError*>(&error)) return 2;
  return 2;
}

}  // namespace qsl
