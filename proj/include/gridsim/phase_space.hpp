// Copyright 2026 The gridsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "gridsim/oscillator.hpp"

namespace gridsim {

/// chi(alpha) = Tr(rho D(alpha)) = <D(alpha)>.
inline Complex char_function(const FockVector& psi, Complex alpha, const Conventions& c) {
  c.check_displacement(alpha);
  if (alpha == Complex(0, 0)) return Complex(1, 0);
  AxisDisplacer d(alpha, c);
  return d.chi(d.scan_weights(psi.normalized()), std::abs(alpha));
}

inline Complex char_function(const DensityMatrix& rho, Complex alpha, const Conventions& c) {
  c.check_displacement(alpha);
  if (alpha == Complex(0, 0)) return Complex(1, 0);
  AxisDisplacer d(alpha, c);
  return d.chi(d.scan_weights(rho.normalized()), std::abs(alpha));
}

/// A sampled characteristic-function line cut chi(t * axis).
struct CharScan {
  Complex axis;  // unit direction
  Eigen::VectorXd t_values;
  Vec values;
  int scan_dim = 0;  // Fock dimension actually used for the scan
};

namespace detail {

/// Marginal scans reach displacement amplitudes far beyond the state's own
/// truncation guard; the spectral expectation stays accurate as long as the
/// scan space is enlarged so that |t_max|^2 <= dim/8. States are zero-padded
/// into the enlarged space.
inline int scan_dimension(double t_max, const Conventions& c, int cap = 4096) {
  double needed = 8.0 * t_max * t_max;
  int dim = c.fock_dim;
  while (dim < needed) dim *= 2;
  if (dim > cap) {
    throw TruncationError("scan range t_max = " + std::to_string(t_max) +
                          " needs Fock dimension " + std::to_string(dim) +
                          " beyond the cap " + std::to_string(cap));
  }
  return dim;
}

template <typename State>
CharScan scan_impl(const State& state, Complex axis, const Eigen::VectorXd& t,
                   const Conventions& c) {
  if (t.size() == 0) throw std::invalid_argument("scan grid is empty");
  const double mag = std::abs(axis);
  if (mag == 0.0) throw std::invalid_argument("scan axis must be nonzero");
  CharScan scan;
  scan.axis = axis / mag;
  scan.t_values = t * mag;  // fold the axis magnitude into the parameter
  scan.scan_dim = scan_dimension(scan.t_values.cwiseAbs().maxCoeff(), c);
  Conventions sc(scan.scan_dim);
  AxisDisplacer d(scan.axis, sc);
  Eigen::VectorXd w = d.scan_weights(state);
  scan.values.resize(t.size());
  for (Eigen::Index i = 0; i < t.size(); ++i) scan.values[i] = d.chi(w, scan.t_values[i]);
  return scan;
}

}  // namespace detail

inline CharScan scan_char_function(const FockVector& psi, Complex axis, const Eigen::VectorXd& t,
                                   const Conventions& c) {
  return detail::scan_impl(psi.normalized(), axis, t, c);
}

inline CharScan scan_char_function(const DensityMatrix& rho, Complex axis,
                                   const Eigen::VectorXd& t, const Conventions& c) {
  return detail::scan_impl(rho.normalized(), axis, t, c);
}

enum class MarginalTarget { q, p };

/// Probability density over one quadrature, reconstructed by zero-padded
/// discrete Fourier transform of a characteristic-function scan.
struct Marginal {
  Eigen::VectorXd coordinate;
  Eigen::VectorXd density;
  double integral = 0;      // trapezoid; should sit in [0.98, 1.02]
  double min_density = 0;   // small negative DFT ripple is tolerated but flagged
  bool normalization_ok = false;
  bool ripple_flag = false;
  bool window_ok = false;  // scan decayed to ~0 at the window edge

  double mean() const {
    double m = 0;
    for (Eigen::Index i = 0; i + 1 < coordinate.size(); ++i) {
      double dx = coordinate[i + 1] - coordinate[i];
      m += 0.5 * dx * (coordinate[i] * density[i] + coordinate[i + 1] * density[i + 1]);
    }
    return m / integral;
  }

  double variance() const {
    const double m = mean();
    double v = 0;
    for (Eigen::Index i = 0; i + 1 < coordinate.size(); ++i) {
      double dx = coordinate[i + 1] - coordinate[i];
      auto f = [&](Eigen::Index k) {
        double d = coordinate[k] - m;
        return d * d * density[k];
      };
      v += 0.5 * dx * (f(i) + f(i + 1));
    }
    return v / integral;
  }
};

/// P(q) from a scan of chi(i t) (axis = i), P(p) from chi(t) (axis = 1):
///   P(q) = (1/pi) Int chi(i t) exp(-2 i q t) dt,
///   P(p) = (1/pi) Int chi(t)  exp(+2 i p t) dt.
/// The zero-padding factor only refines the output grid; values are the
/// exact discrete transform of the scan.
inline Marginal marginal_from_scan(const CharScan& scan, MarginalTarget target,
                                   int padding = 8) {
  const Eigen::Index k = scan.t_values.size();
  if (k < 2) throw std::invalid_argument("scan needs at least two points");
  const double dt = scan.t_values[1] - scan.t_values[0];
  for (Eigen::Index i = 1; i < k; ++i) {
    if (std::abs(scan.t_values[i] - scan.t_values[i - 1] - dt) > 1e-9 * std::abs(dt)) {
      throw std::invalid_argument("scan grid must be uniform");
    }
  }
  const bool imag_axis = std::abs(scan.axis - Complex(0, 1)) < 1e-12;
  const bool real_axis = std::abs(scan.axis - Complex(1, 0)) < 1e-12;
  if (target == MarginalTarget::q && !imag_axis) {
    throw std::invalid_argument("P(q) requires a scan along the imaginary axis");
  }
  if (target == MarginalTarget::p && !real_axis) {
    throw std::invalid_argument("P(p) requires a scan along the real axis");
  }

  const Eigen::Index m = padding * k;
  const double dx = kPi / (m * std::abs(dt));
  const double sign = (target == MarginalTarget::q) ? -2.0 : 2.0;

  Marginal out;
  out.coordinate.resize(m);
  out.density.resize(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const double x = (static_cast<double>(j) - m / 2) * dx;
    Complex acc(0, 0);
    for (Eigen::Index i = 0; i < k; ++i) {
      acc += scan.values[i] * std::exp(Complex(0, sign * x * scan.t_values[i]));
    }
    out.coordinate[j] = x;
    out.density[j] = (std::abs(dt) / kPi) * acc.real();
  }
  out.min_density = out.density.minCoeff();
  out.ripple_flag = out.min_density < -1e-6;
  double integral = 0;
  for (Eigen::Index j = 0; j + 1 < m; ++j) {
    integral += 0.5 * dx * (out.density[j] + out.density[j + 1]);
  }
  out.integral = integral;
  out.normalization_ok = integral > 0.98 && integral < 1.02;
  out.window_ok =
      std::max(std::abs(scan.values[0]), std::abs(scan.values[k - 1])) < 0.05;
  return out;
}

/// W(q, p) = (2/pi) Tr(rho D(alpha) Pi D(-alpha)), alpha = q + i p, with Pi
/// the photon-number parity. Computed from the same axis exponentials as
/// D(alpha); the factorization D(-alpha) = phase * D(-q) D(-i p) drops out
/// of the parity expectation.
inline Eigen::MatrixXd wigner(const FockVector& psi, const Eigen::VectorXd& q_grid,
                              const Eigen::VectorXd& p_grid, const Conventions& c) {
  const double qm = q_grid.size() ? q_grid.cwiseAbs().maxCoeff() : 0.0;
  const double pm = p_grid.size() ? p_grid.cwiseAbs().maxCoeff() : 0.0;
  c.check_displacement(Complex(qm, pm));

  FockVector state = psi.normalized();
  AxisDisplacer real_axis(Complex(1, 0), c);
  AxisDisplacer imag_axis(Complex(0, 1), c);
  Eigen::MatrixXd w(q_grid.size(), p_grid.size());
  for (Eigen::Index jp = 0; jp < p_grid.size(); ++jp) {
    FockVector shifted_p = imag_axis.apply(state, -p_grid[jp]);
    for (Eigen::Index jq = 0; jq < q_grid.size(); ++jq) {
      FockVector shifted = real_axis.apply(shifted_p, -q_grid[jq]);
      double parity = 0;
      for (int n = 0; n < c.fock_dim; ++n) {
        const double pop = std::norm(shifted.amplitudes[n]);
        parity += (n % 2 == 0) ? pop : -pop;
      }
      w(jq, jp) = (2.0 / kPi) * parity;
    }
  }
  return w;
}

inline Eigen::MatrixXd wigner(const DensityMatrix& rho, const Eigen::VectorXd& q_grid,
                              const Eigen::VectorXd& p_grid, const Conventions& c) {
  DensityMatrix r = rho.normalized();
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (r.matrix + r.matrix.adjoint()));
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(q_grid.size(), p_grid.size());
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    const double lambda = es.eigenvalues()[i];
    if (lambda < 1e-10) continue;
    w += lambda * wigner(FockVector(es.eigenvectors().col(i)), q_grid, p_grid, c);
  }
  return w;
}

/// Per-point binary outcome record: (number of dark outcomes, shots).
struct ShotRecord {
  long successes = 0;
  long shots = 0;
};

/// Nonparametric bootstrap standard error of the per-point outcome fraction.
inline std::vector<double> bootstrap_errors(const std::vector<ShotRecord>& records,
                                            int resamples, std::uint64_t seed = 1) {
  if (resamples < 100) throw std::invalid_argument("bootstrap needs at least 100 resamples");
  std::mt19937_64 rng(seed);
  std::vector<double> errors;
  errors.reserve(records.size());
  for (const auto& rec : records) {
    if (rec.shots <= 0) throw std::invalid_argument("bootstrap needs shots >= 1");
    if (rec.successes < 0 || rec.successes > rec.shots) {
      throw std::invalid_argument("successes out of range");
    }
    const double p = static_cast<double>(rec.successes) / rec.shots;
    std::binomial_distribution<long> binom(rec.shots, p);
    double sum = 0, sum2 = 0;
    for (int r = 0; r < resamples; ++r) {
      const double est = static_cast<double>(binom(rng)) / rec.shots;
      sum += est;
      sum2 += est * est;
    }
    const double mean = sum / resamples;
    const double var = std::max(0.0, (sum2 - resamples * mean * mean) / (resamples - 1));
    errors.push_back(std::sqrt(var));
  }
  return errors;
}

}  // namespace gridsim
