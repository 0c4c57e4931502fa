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

#include "qsl/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "qsl/dynamics.hpp"
#include "qsl/fitting.hpp"

namespace qsl {

namespace {

// Sane range for fitted time constants; collapse to an edge is flagged.
constexpr double kMinTimeConstant = 1e-6;
constexpr double kMaxTimeConstant = 1e6;

std::string format_g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double(const std::string& token, std::size_t line_no,
                    const std::filesystem::path& path) {
  try {
    std::size_t consumed = 0;
    const double v = std::stod(token, &consumed);
    while (consumed < token.size() && std::isspace(static_cast<unsigned char>(
                                          token[consumed])))
      ++consumed;
    if (consumed != token.size()) throw std::invalid_argument(token);
    return v;
  } catch (const std::exception&) {
    throw DataError(path.string() + ":" + std::to_string(line_no) +
                    ": cannot parse number '" + token + "'");
  }
}

}  // namespace

double FitResult::param(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return values[static_cast<Eigen::Index>(i)];
  throw DomainError("FitResult: unknown parameter '" + name + "'");
}

std::string FitResult::to_json() const {
  nlohmann::ordered_json j;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < names.size(); ++i)
    params[names[i]] = values[static_cast<Eigen::Index>(i)];
  j["params"] = params;
  j["residual_rms"] = residual_rms;
  nlohmann::ordered_json cov = nlohmann::ordered_json::array();
  for (Eigen::Index r = 0; r < covariance.rows(); ++r) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (Eigen::Index c = 0; c < covariance.cols(); ++c)
      row.push_back(covariance(r, c));
    cov.push_back(row);
  }
  j["covariance"] = cov;
  return j.dump(2);
}

TimeSeries load_series(const std::filesystem::path& path, SeriesFormat format) {
  (void)format;  // CSV is the only wire format
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");

  TimeSeries series;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::vector<std::pair<double, double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t begin = line.find_first_not_of(" \t");
    if (begin == std::string::npos) continue;
    if (line[begin] == '#') {
      const std::string kLabelTag = "# label:";
      if (line.rfind(kLabelTag, 0) == 0) {
        std::string label = line.substr(kLabelTag.size());
        const std::size_t s = label.find_first_not_of(' ');
        series.label = s == std::string::npos ? "" : label.substr(s);
      }
      continue;
    }
    const std::size_t comma = line.find(',');
    if (comma == std::string::npos)
      throw DataError(path.string() + ":" + std::to_string(line_no) +
                      ": expected 't_s,value'");
    const std::string left = line.substr(0, comma);
    const std::string right = line.substr(comma + 1);
    if (!header_seen) {
      header_seen = true;
      if (left.find_first_not_of("-+.0123456789eE \t") != std::string::npos) {
        if (left != "t_s" || right != "value")
          throw DataError(path.string() + ":" + std::to_string(line_no) +
                          ": unexpected header '" + line + "'");
        continue;
      }
    }
    rows.emplace_back(parse_double(left, line_no, path),
                      parse_double(right, line_no, path));
  }
  if (rows.empty())
    throw DataError(path.string() + ": no data rows");

  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  series.t.reserve(rows.size());
  series.value.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i > 0 && !(rows[i].first > rows[i - 1].first))
      throw DataError(path.string() + ": duplicate time stamp " +
                      format_g17(rows[i].first));
    series.t.push_back(rows[i].first);
    series.value.push_back(rows[i].second);
  }
  return series;
}

void write_series(const TimeSeries& series, const std::filesystem::path& path) {
  validate_series(series, 1);
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  if (!series.label.empty()) out << "# label: " << series.label << "\n";
  out << "t_s,value\n";
  for (std::size_t i = 0; i < series.size(); ++i)
    out << format_g17(series.t[i]) << ',' << format_g17(series.value[i]) << "\n";
  if (!out) throw DataError("write to '" + path.string() + "' failed");
}

TimeSeries normalize(const TimeSeries& series, double reference) {
  validate_series(series, 1);
  if (reference == 0.0) throw DomainError("normalize: zero reference");
  TimeSeries out;
  out.t = series.t;
  out.label = series.label.empty() ? "normalized" : series.label + "_norm";
  out.value.reserve(series.size());
  for (double v : series.value) out.value.push_back(v / reference);
  return out;
}

TimeSeries smooth(const TimeSeries& series, int window, int degree) {
  validate_series(series, 1);
  if (window < 5 || window % 2 == 0)
    throw DomainError("smooth: window must be odd and >= 5");
  if (static_cast<std::size_t>(window) > series.size())
    throw DomainError("smooth: window exceeds series length");
  if (degree < 2 || degree > 4)
    throw DomainError("smooth: degree must be in [2, 4]");
  if (degree >= window) throw DomainError("smooth: degree must be < window");

  const int n = static_cast<int>(series.size());
  const int half = window / 2;
  TimeSeries out;
  out.t = series.t;
  out.label = series.label;
  out.value.resize(series.size());

  for (int i = 0; i < n; ++i) {
    int lo = std::max(0, i - half);
    int hi = std::min(n, lo + window);
    lo = std::max(0, hi - window);
    // Local least squares on centered, scaled abscissas; evaluating the
    // fitted polynomial at t[i] is its constant coefficient.
    double scale = 0.0;
    for (int k = lo; k < hi; ++k)
      scale = std::max(scale, std::abs(series.t[k] - series.t[i]));
    if (scale == 0.0) scale = 1.0;
    Eigen::MatrixXd design(hi - lo, degree + 1);
    Eigen::VectorXd rhs(hi - lo);
    for (int k = lo; k < hi; ++k) {
      const double u = (series.t[k] - series.t[i]) / scale;
      double pw = 1.0;
      for (int d = 0; d <= degree; ++d) {
        design(k - lo, d) = pw;
        pw *= u;
      }
      rhs(k - lo) = series.value[k];
    }
    const Eigen::VectorXd coeff =
        design.colPivHouseholderQr().solve(rhs);
    out.value[static_cast<std::size_t>(i)] = coeff(0);
  }
  return out;
}

namespace {

/// Shared wrap-up: run LM in the transformed parameter space, map back,
/// flag bound collapses, and throw FitError on non-convergence.
FitResult finish_fit(const LMFit& lm, std::vector<std::string> names,
                     const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>&
                         to_external,
                     const std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>&
                         external_jacobian) {
  FitResult result;
  result.names = std::move(names);
  result.values = to_external(lm.params);
  result.residual_rms = lm.residual_rms;
  // Delta method: Cov_ext = D Cov_int D^T for the diagonal map D.
  const Eigen::MatrixXd d = external_jacobian(lm.params);
  result.covariance = d * lm.covariance * d.transpose();
  result.converged = lm.converged;
  result.iterations = lm.iterations;
  result.residual_history = lm.residual_history;
  for (Eigen::Index i = 0; i < result.values.size(); ++i) {
    const std::string& name = result.names[static_cast<std::size_t>(i)];
    if (name == "t1h" || name == "t2c") {
      const double v = result.values[i];
      if (v <= kMinTimeConstant || v >= kMaxTimeConstant)
        result.bound_flags.push_back(name);
    }
  }
  if (!result.converged)
    throw FitError("fit did not converge within the iteration budget", result);
  return result;
}

}  // namespace

FitResult fit_exp_cos(const TimeSeries& series, const ExpCosGuess& guess) {
  validate_series(series, 8);
  if (!(guess.t2c > 0.0)) throw DomainError("fit_exp_cos: guess T2C must be > 0");

  // T2C is fitted in log space so it stays positive.
  Eigen::VectorXd p0(3);
  p0 << guess.m0, std::log(guess.t2c), guess.omega;
  auto model_residuals = [&series](const Eigen::VectorXd& p) {
    Eigen::VectorXd r(series.size());
    const double m0 = p[0];
    const double t2c = std::exp(p[1]);
    const double omega = p[2];
    for (std::size_t i = 0; i < series.size(); ++i) {
      const double t = series.t[i];
      r[static_cast<Eigen::Index>(i)] =
          m0 * std::exp(-t / t2c) * std::cos(omega * t) - series.value[i];
    }
    return r;
  };
  const LMFit lm = levenberg_marquardt(model_residuals, p0);
  auto to_external = [](const Eigen::VectorXd& p) {
    Eigen::VectorXd v(3);
    v << p[0], std::exp(p[1]), p[2];
    return v;
  };
  auto jac = [](const Eigen::VectorXd& p) {
    Eigen::MatrixXd d = Eigen::MatrixXd::Identity(3, 3);
    d(1, 1) = std::exp(p[1]);
    return d;
  };
  return finish_fit(lm, {"m0", "t2c", "omega"}, to_external, jac);
}

FitResult fit_xi_model(const TimeSeries& series, const XiModelGuess& guess) {
  validate_series(series, 8);
  guess.params.validate();

  std::vector<std::string> names = {"amplitude", "t1h", "t2c"};
  int n_params = 3;
  if (!guess.fix_j) {
    names.push_back("j");
    ++n_params;
  }
  if (guess.fit_frequency_offset) {
    names.push_back("omega_offset");
    ++n_params;
  }

  Eigen::VectorXd p0(n_params);
  p0[0] = guess.amplitude;
  p0[1] = std::log(guess.params.t1h);
  p0[2] = std::log(guess.params.t2c);
  int idx = 3;
  if (!guess.fix_j) p0[idx++] = std::log(guess.params.j);
  if (guess.fit_frequency_offset) p0[idx++] = guess.omega_offset;

  const double j_fixed = guess.params.j;
  const bool fix_j = guess.fix_j;
  const bool with_offset = guess.fit_frequency_offset;
  auto model_residuals = [&series, j_fixed, fix_j,
                          with_offset](const Eigen::VectorXd& p) {
    RelaxationParams rp;
    rp.t1h = std::exp(p[1]);
    rp.t2c = std::exp(p[2]);
    int k = 3;
    rp.j = fix_j ? j_fixed : std::exp(p[k++]);
    const double omega = with_offset ? p[k++] : 0.0;
    Eigen::VectorXd r(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) {
      const double t = series.t[i];
      double m = p[0] * xi(t, rp);
      if (with_offset) m *= std::cos(omega * t);
      r[static_cast<Eigen::Index>(i)] = m - series.value[i];
    }
    return r;
  };
  const LMFit lm = levenberg_marquardt(model_residuals, p0);
  auto to_external = [n_params, fix_j, with_offset](const Eigen::VectorXd& p) {
    Eigen::VectorXd v(n_params);
    v[0] = p[0];
    v[1] = std::exp(p[1]);
    v[2] = std::exp(p[2]);
    int k = 3;
    if (!fix_j) {
      v[k] = std::exp(p[k]);
      ++k;
    }
    if (with_offset) v[k] = p[k];
    return v;
  };
  auto jac = [n_params, fix_j](const Eigen::VectorXd& p) {
    Eigen::MatrixXd d = Eigen::MatrixXd::Identity(n_params, n_params);
    d(1, 1) = std::exp(p[1]);
    d(2, 2) = std::exp(p[2]);
    if (!fix_j) d(3, 3) = std::exp(p[3]);
    return d;
  };
  return finish_fit(lm, std::move(names), to_external, jac);
}

double t1_from_null(double t_null) {
  if (!(t_null > 0.0)) throw DomainError("t1_from_null: t_null must be > 0");
  return t_null / std::log(2.0);
}

LineFit fit_relaxivity(std::span<const double> concentrations_mM,
                       std::span<const double> rates) {
  if (concentrations_mM.size() != rates.size())
    throw DomainError("fit_relaxivity: input lengths differ");
  const std::size_t n = concentrations_mM.size();
  if (n < 2) throw DomainError("fit_relaxivity: need at least two points");

  const double cbar =
      std::accumulate(concentrations_mM.begin(), concentrations_mM.end(), 0.0) /
      static_cast<double>(n);
  const double rbar =
      std::accumulate(rates.begin(), rates.end(), 0.0) / static_cast<double>(n);
  double scc = 0.0, scr = 0.0, srr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dc = concentrations_mM[i] - cbar;
    const double dr = rates[i] - rbar;
    scc += dc * dc;
    scr += dc * dr;
    srr += dr * dr;
  }
  if (scc == 0.0)
    throw DomainError("fit_relaxivity: all concentrations are equal");

  LineFit fit;
  fit.slope = scr / scc;
  fit.intercept = rbar - fit.slope * cbar;
  fit.r_squared = srr == 0.0 ? 1.0 : (scr * scr) / (scc * srr);
  return fit;
}

}  // namespace qsl
