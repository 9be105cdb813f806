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

#include <array>
#include <random>

#include "gridsim/ancilla_circuit.hpp"
#include "gridsim/grid_code.hpp"
#include "gridsim/oscillator.hpp"

namespace gridsim {

inline const std::array<Eigen::Matrix2cd, 4>& pauli_matrices() {
  static const std::array<Eigen::Matrix2cd, 4> sigma = [] {
    std::array<Eigen::Matrix2cd, 4> s;
    s[0] = Eigen::Matrix2cd::Identity();
    s[1] << 0, 1, 1, 0;
    s[2] << 0, Complex(0, -1), Complex(0, 1), 0;
    s[3] << 1, 0, 0, -1;
    return s;
  }();
  return sigma;
}

// ---------------------------------------------------------------------------
// Logical state readout and reconstruction.

struct LogicalReadout {
  double x = 0, y = 0, z = 0;
  double operator[](int k) const { return k == 0 ? x : (k == 1 ? y : z); }
};

/// Pauli readout Re<D(l_j/2)> for j = x, y, z.
template <typename State>
LogicalReadout logical_readout(const State& state, const LogicalFrame& frame,
                               const Conventions& c) {
  LogicalReadout r;
  r.x = modular_expectation(state, 0.5 * frame.lx, ReadoutPart::real, c);
  r.y = modular_expectation(state, 0.5 * frame.ly, ReadoutPart::real, c);
  r.z = modular_expectation(state, 0.5 * frame.lz, ReadoutPart::real, c);
  return r;
}

struct StabilizerReadout {
  double sx = 0, sz = 0;
};

/// Stabilizer readout Re<D(l_j)> for j = x, z.
template <typename State>
StabilizerReadout stabilizer_readout(const State& state, const LogicalFrame& frame,
                                     const Conventions& c) {
  StabilizerReadout s;
  s.sx = modular_expectation(state, frame.lx, ReadoutPart::real, c);
  s.sz = modular_expectation(state, frame.lz, ReadoutPart::real, c);
  return s;
}

/// Readout permutation implementing the Hadamard as a classical update of
/// the readout directions: (x, y, z) -> (z, -y, x).
inline LogicalReadout hadamard_permute(const LogicalReadout& r) {
  return LogicalReadout{r.z, -r.y, r.x};
}

/// rho_L = (1 + x X + y Y + z Z)/2. Bloch vectors longer than 1 are reported
/// as-is and flagged, not projected.
struct LogicalState {
  Eigen::Matrix2cd rho;
  double bloch_norm = 0;
  bool physical = true;
};

inline LogicalState reconstruct_state(double x, double y, double z) {
  const auto& s = pauli_matrices();
  LogicalState st;
  st.rho = 0.5 * (s[0] + x * s[1] + y * s[2] + z * s[3]);
  st.bloch_norm = std::sqrt(x * x + y * y + z * z);
  st.physical = st.bloch_norm <= 1.0 + 1e-12;
  return st;
}

inline LogicalState reconstruct_state(const LogicalReadout& r) {
  return reconstruct_state(r.x, r.y, r.z);
}

/// F = <id| rho_L |id>.
inline double state_fidelity(const LogicalState& st, const Eigen::Vector2cd& ideal) {
  return std::real(ideal.dot(st.rho * ideal));
}

// ---------------------------------------------------------------------------
// Process tomography.

/// Input-state readout table: rows j = 0..5 index the input states, columns
/// k = 0..3 the Pauli basis, with the fixed identity entry o_{j0} = 1/2 and
/// o_{jk} = <sigma_k>/2 elsewhere.
struct PauliReadout {
  Eigen::Matrix<double, 6, 4> o;

  static PauliReadout from_readouts(const std::array<LogicalReadout, 6>& rs) {
    PauliReadout p;
    for (int j = 0; j < 6; ++j) {
      p.o(j, 0) = 0.5;
      p.o(j, 1) = 0.5 * rs[j].x;
      p.o(j, 2) = 0.5 * rs[j].y;
      p.o(j, 3) = 0.5 * rs[j].z;
    }
    return p;
  }
};

using Lambda = Eigen::Matrix<double, 6, 3>;  // measured outputs, k = X, Y, Z

inline Lambda lambda_from_readouts(const std::array<LogicalReadout, 6>& rs) {
  Lambda l;
  for (int j = 0; j < 6; ++j) {
    l(j, 0) = 0.5 * rs[j].x;
    l(j, 1) = 0.5 * rs[j].y;
    l(j, 2) = 0.5 * rs[j].z;
  }
  return l;
}

/// beta maps the 16 chi entries to the 18 predicted readouts:
/// lambda_{jk} = sum_{mn} chi_{mn} Tr(sigma_k sigma_m rho_j sigma_n)/2 with
/// rho_j = sum_a o_{ja} sigma_a, so
/// beta_{(jk),(mn)} = sum_a o_{ja} Tr(sigma_k sigma_m sigma_a sigma_n)/2.
/// Row index = 3 j + (k - 1), column index = 4 m + n.
inline Eigen::MatrixXcd build_beta(const PauliReadout& readout) {
  const auto& s = pauli_matrices();
  Eigen::MatrixXcd beta = Eigen::MatrixXcd::Zero(18, 16);
  for (int j = 0; j < 6; ++j) {
    for (int k = 1; k <= 3; ++k) {
      for (int m = 0; m < 4; ++m) {
        for (int n = 0; n < 4; ++n) {
          Complex acc(0, 0);
          for (int a = 0; a < 4; ++a) {
            acc += readout.o(j, a) * (s[k] * s[m] * s[a] * s[n]).trace();
          }
          beta(3 * j + (k - 1), 4 * m + n) = 0.5 * acc;
        }
      }
    }
  }
  return beta;
}

inline Eigen::Vector<double, 18> predict_lambda(const Eigen::MatrixXcd& beta,
                                                const Eigen::Matrix4cd& chi) {
  Eigen::Vector<Complex, 16> v;
  for (int m = 0; m < 4; ++m)
    for (int n = 0; n < 4; ++n) v[4 * m + n] = chi(m, n);
  return (beta * v).real();
}

/// Coefficients of sum_{mn} chi_{mn} sigma_n sigma_m - 1 in the Pauli basis;
/// all four must vanish for a trace-preserving process.
inline Eigen::Vector4d trace_constraint(const Eigen::Matrix4cd& chi) {
  const auto& s = pauli_matrices();
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) m += chi(a, b) * (s[b] * s[a]);
  Eigen::Vector4d c;
  for (int a = 0; a < 4; ++a) c[a] = 0.5 * std::real((s[a] * m).trace());
  c[0] -= 1.0;
  return c;
}

/// Lower-triangular factor parameterization chi = T^dag T; Hermitian and
/// positive semidefinite by construction.
struct TParams {
  std::array<double, 16> t{};  // t[0] = t_1, ..., t[15] = t_16

  Eigen::Matrix4cd factor() const {
    Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
    m(0, 0) = t[0];
    m(1, 1) = t[1];
    m(2, 2) = t[2];
    m(3, 3) = t[3];
    m(1, 0) = Complex(t[4], t[5]);
    m(2, 1) = Complex(t[6], t[7]);
    m(3, 2) = Complex(t[8], t[9]);
    m(2, 0) = Complex(t[10], t[11]);
    m(3, 1) = Complex(t[12], t[13]);
    m(3, 0) = Complex(t[14], t[15]);
    return m;
  }

  Eigen::Matrix4cd chi() const {
    Eigen::Matrix4cd f = factor();
    return f.adjoint() * f;
  }

  /// d chi / d t_i, analytic.
  Eigen::Matrix4cd dchi(int i) const {
    Eigen::Matrix4cd df = Eigen::Matrix4cd::Zero();
    switch (i) {
      case 0: df(0, 0) = 1; break;
      case 1: df(1, 1) = 1; break;
      case 2: df(2, 2) = 1; break;
      case 3: df(3, 3) = 1; break;
      case 4: df(1, 0) = 1; break;
      case 5: df(1, 0) = Complex(0, 1); break;
      case 6: df(2, 1) = 1; break;
      case 7: df(2, 1) = Complex(0, 1); break;
      case 8: df(3, 2) = 1; break;
      case 9: df(3, 2) = Complex(0, 1); break;
      case 10: df(2, 0) = 1; break;
      case 11: df(2, 0) = Complex(0, 1); break;
      case 12: df(3, 1) = 1; break;
      case 13: df(3, 1) = Complex(0, 1); break;
      case 14: df(3, 0) = 1; break;
      case 15: df(3, 0) = Complex(0, 1); break;
      default: throw std::out_of_range("t index");
    }
    Eigen::Matrix4cd f = factor();
    return df.adjoint() * f + f.adjoint() * df;
  }

  /// Extract parameters from a positive semidefinite chi. The reversed
  /// Cholesky factorization produces the lower-triangular factor directly.
  static TParams from_chi(const Eigen::Matrix4cd& chi_psd) {
    Eigen::Matrix4cd rev = Eigen::Matrix4cd::Zero();
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) rev(i, j) = chi_psd(3 - i, 3 - j);
    rev += 1e-14 * Eigen::Matrix4cd::Identity();
    Eigen::LLT<Eigen::Matrix4cd> llt(rev);
    Eigen::Matrix4cd m = llt.matrixL();
    Eigen::Matrix4cd tfac = Eigen::Matrix4cd::Zero();  // T = J M^dag J
    Eigen::Matrix4cd madj = m.adjoint();
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) tfac(i, j) = madj(3 - i, 3 - j);
    TParams p;
    p.t[0] = tfac(0, 0).real();
    p.t[1] = tfac(1, 1).real();
    p.t[2] = tfac(2, 2).real();
    p.t[3] = tfac(3, 3).real();
    p.t[4] = tfac(1, 0).real();
    p.t[5] = tfac(1, 0).imag();
    p.t[6] = tfac(2, 1).real();
    p.t[7] = tfac(2, 1).imag();
    p.t[8] = tfac(3, 2).real();
    p.t[9] = tfac(3, 2).imag();
    p.t[10] = tfac(2, 0).real();
    p.t[11] = tfac(2, 0).imag();
    p.t[12] = tfac(3, 1).real();
    p.t[13] = tfac(3, 1).imag();
    p.t[14] = tfac(3, 0).real();
    p.t[15] = tfac(3, 0).imag();
    return p;
  }
};

struct ChiFitOptions {
  std::uint64_t seed = 0x6772696473696dULL;  // deterministic multi-start
  int starts = 8;
  int max_iterations = 400;
  double penalty_max = 1e12;
};

struct ChiFitResult {
  Eigen::Matrix4cd chi;
  TParams params;
  double objective = 0;            // |beta chi - lambda|^2 at the solution
  double constraint_residual = 0;  // ||sum chi sigma sigma - 1||
  double gradient_norm = 0;
  bool converged = false;
};

namespace detail {

/// Damped least squares over the 16 T parameters with the four
/// trace-preservation equations enforced by an escalating quadratic penalty.
inline void chi_lm_polish(const Eigen::MatrixXcd& beta, const Eigen::Vector<double, 18>& lam,
                          TParams& p, const ChiFitOptions& opt, double& objective,
                          double& grad_norm) {
  using Vec16 = Eigen::Matrix<double, 16, 1>;
  using Vec22 = Eigen::Matrix<double, 22, 1>;
  using Jac = Eigen::Matrix<double, 22, 16>;

  auto residuals = [&](const TParams& tp, double w, Vec22& r) {
    Eigen::Matrix4cd chi = tp.chi();
    r.head<18>() = predict_lambda(beta, chi) - lam;
    r.tail<4>() = std::sqrt(w) * trace_constraint(chi);
  };
  auto jacobian = [&](const TParams& tp, double w, Jac& jac) {
    const double sw = std::sqrt(w);
    for (int i = 0; i < 16; ++i) {
      Eigen::Matrix4cd d = tp.dchi(i);
      jac.col(i).head<18>() = predict_lambda(beta, d);
      Eigen::Vector4d tc = trace_constraint(d);
      tc[0] += 1.0;  // trace_constraint subtracts the affine part; derivative is linear
      jac.col(i).tail<4>() = sw * tc;
    }
  };

  for (double w = 1e4; w <= opt.penalty_max; w *= 100.0) {
    double mu = 1e-6;
    Vec22 r;
    residuals(p, w, r);
    double f = r.squaredNorm();
    for (int it = 0; it < opt.max_iterations; ++it) {
      Jac jac;
      jacobian(p, w, jac);
      Vec16 g = jac.transpose() * r;
      grad_norm = g.norm();
      if (grad_norm < 1e-12 * (1.0 + f)) break;
      Eigen::Matrix<double, 16, 16> h = jac.transpose() * jac;
      bool stepped = false;
      for (int tries = 0; tries < 40; ++tries) {
        Eigen::Matrix<double, 16, 16> hd = h;
        hd.diagonal().array() += mu * (1.0 + h.diagonal().array());
        Vec16 delta = hd.ldlt().solve(-g);
        TParams cand = p;
        for (int i = 0; i < 16; ++i) cand.t[i] += delta[i];
        Vec22 rc;
        residuals(cand, w, rc);
        double fc = rc.squaredNorm();
        if (fc < f) {
          p = cand;
          r = rc;
          const double rel = (f - fc) / (1.0 + f);
          f = fc;
          mu = std::max(mu * 0.3, 1e-12);
          stepped = true;
          if (rel < 1e-14) it = opt.max_iterations;  // converged at this penalty level
          break;
        }
        mu *= 4.0;
      }
      if (!stepped) break;
    }
  }
  Eigen::Matrix4cd chi = p.chi();
  objective = (predict_lambda(beta, chi) - lam).squaredNorm();
}

}  // namespace detail

/// Constrained least-squares process-matrix fit: find the T parameters
/// minimizing |beta chi(t) - lambda|^2 subject to trace preservation.
/// Deterministic multi-start around a constrained linear-inversion seed.
inline ChiFitResult fit_chi(const PauliReadout& readout, const Lambda& lambda,
                            const ChiFitOptions& opt = {}) {
  if (!readout.o.allFinite() || !lambda.allFinite()) {
    throw std::invalid_argument("tomography data must be finite");
  }
  Eigen::MatrixXcd beta = build_beta(readout);
  Eigen::Vector<double, 18> lam;
  for (int j = 0; j < 6; ++j)
    for (int k = 0; k < 3; ++k) lam[3 * j + k] = lambda(j, k);

  // Hermitian basis: 4 diagonal + 12 off-diagonal (re, im) directions.
  std::array<Eigen::Matrix4cd, 16> basis;
  {
    int idx = 0;
    for (int m = 0; m < 4; ++m) {
      Eigen::Matrix4cd b = Eigen::Matrix4cd::Zero();
      b(m, m) = 1;
      basis[idx++] = b;
    }
    for (int m = 0; m < 4; ++m) {
      for (int n = m + 1; n < 4; ++n) {
        Eigen::Matrix4cd re = Eigen::Matrix4cd::Zero(), im = Eigen::Matrix4cd::Zero();
        re(m, n) = re(n, m) = 1;
        im(m, n) = Complex(0, 1);
        im(n, m) = Complex(0, -1);
        basis[idx++] = re;
        basis[idx++] = im;
      }
    }
  }

  // Constrained linear inversion over the Hermitian coordinates.
  Eigen::Matrix<double, 18, 16> a_data;
  Eigen::Matrix<double, 4, 16> c_con;
  for (int i = 0; i < 16; ++i) {
    a_data.col(i) = predict_lambda(beta, basis[i]);
    Eigen::Vector4d tc = trace_constraint(basis[i]);
    tc[0] += 1.0;
    c_con.col(i) = tc;
  }
  Eigen::Vector4d d(1, 0, 0, 0);
  Eigen::Matrix<double, 16, 1> h_p =
      c_con.completeOrthogonalDecomposition().pseudoInverse() * d;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(c_con);
  Eigen::MatrixXd kernel = lu.kernel();  // 16 x 12
  Eigen::VectorXd y =
      (a_data * kernel).colPivHouseholderQr().solve(lam - a_data * h_p);
  Eigen::Matrix<double, 16, 1> h = h_p + kernel * y;

  Eigen::Matrix4cd chi_lin = Eigen::Matrix4cd::Zero();
  for (int i = 0; i < 16; ++i) chi_lin += h[i] * basis[i];

  // Clip to the PSD cone for the factor seed.
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(chi_lin);
  Eigen::Vector4d ev = es.eigenvalues().cwiseMax(0.0);
  Eigen::Matrix4cd chi_seed =
      es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();

  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> jitter(0.0, 0.2);

  ChiFitResult best;
  double best_score = std::numeric_limits<double>::infinity();
  for (int s = 0; s < opt.starts; ++s) {
    TParams p;
    if (s == 0) {
      p = TParams::from_chi(chi_seed);
    } else if (s == 1) {
      p.t[0] = 1.0;  // identity channel
    } else {
      p = TParams::from_chi(chi_seed);
      for (auto& v : p.t) v += jitter(rng);
    }
    double obj = 0, gnorm = 0;
    detail::chi_lm_polish(beta, lam, p, opt, obj, gnorm);
    double con = trace_constraint(p.chi()).norm();
    double score = obj + 1e6 * std::max(0.0, con - 1e-8);
    if (score < best_score) {
      best_score = score;
      best.chi = p.chi();
      best.params = p;
      best.objective = obj;
      best.constraint_residual = con;
      best.gradient_norm = gnorm;
    }
  }
  best.converged = best.gradient_norm <= 1e-6 && best.constraint_residual <= 1e-6;
  return best;
}

/// F = Tr(chi chi_ideal).
inline double process_fidelity(const Eigen::Matrix4cd& chi, const Eigen::Matrix4cd& chi_ideal) {
  return std::real((chi * chi_ideal).trace());
}

/// chi of the unitary channel rho -> U rho U^dag: chi_{mn} = u_m conj(u_n)
/// with u_m = Tr(sigma_m U)/2.
inline Eigen::Matrix4cd chi_from_unitary(const Eigen::Matrix2cd& u) {
  const auto& s = pauli_matrices();
  Eigen::Vector4cd coeff;
  for (int m = 0; m < 4; ++m) coeff[m] = 0.5 * (s[m] * u).trace();
  return coeff * coeff.adjoint();
}

/// exp(-i angle sigma_axis / 2).
inline Eigen::Matrix2cd rotation_gate(Axis axis, double angle) {
  const auto& s = pauli_matrices();
  const Eigen::Matrix2cd& sig = s[axis == Axis::x ? 1 : (axis == Axis::y ? 2 : 3)];
  return std::cos(0.5 * angle) * Eigen::Matrix2cd::Identity() -
         Complex(0, std::sin(0.5 * angle)) * sig;
}

inline Eigen::Matrix2cd hadamard_gate() {
  Eigen::Matrix2cd h;
  h << 1, 1, 1, -1;
  return h / std::sqrt(2.0);
}

}  // namespace gridsim
