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

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace gridsim {

using Complex = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

inline constexpr double kPi = 3.14159265358979323846;

/// Thrown when a requested displacement (or squeeze) would push population
/// against the Fock-space truncation edge. Silent leakage corrupts
/// post-selection probabilities, so guards are hard errors.
class TruncationError : public std::runtime_error {
 public:
  explicit TruncationError(const std::string& what) : std::runtime_error(what) {}
};

/// Fock-space truncation and the phase-space convention used throughout:
/// alpha = q + i p with [q, p] = i/2, so that <alpha|q|alpha> = Re(alpha)
/// and <alpha|p|alpha> = Im(alpha) for a coherent state |alpha>.
struct Conventions {
  int fock_dim;

  explicit Conventions(int n) : fock_dim(n) {
    if (n < 2) throw std::invalid_argument("fock_dim must be >= 2");
  }

  /// Largest displacement magnitude the truncation supports: |alpha|^2 <= N/8.
  double displacement_guard() const { return fock_dim / 8.0; }

  void check_displacement(Complex alpha) const {
    if (std::norm(alpha) > displacement_guard() * (1.0 + 1e-12)) {
      throw TruncationError("displacement |alpha|^2 = " + std::to_string(std::norm(alpha)) +
                            " exceeds truncation guard N/8 = " +
                            std::to_string(displacement_guard()));
    }
  }
};

/// Pure oscillator state: amplitudes over |0>, |1>, ..., |N-1>.
struct FockVector {
  Vec amplitudes;

  FockVector() = default;
  explicit FockVector(Vec a) : amplitudes(std::move(a)) {}

  int dim() const { return static_cast<int>(amplitudes.size()); }
  double norm() const { return amplitudes.norm(); }

  FockVector normalized() const {
    double n = norm();
    if (n == 0.0) throw std::invalid_argument("cannot normalize zero state");
    return FockVector(amplitudes / n);
  }

  static FockVector vacuum(const Conventions& c) { return basis_state(0, c); }

  static FockVector basis_state(int n, const Conventions& c) {
    if (n < 0 || n >= c.fock_dim) throw std::invalid_argument("basis index out of range");
    Vec a = Vec::Zero(c.fock_dim);
    a[n] = 1.0;
    return FockVector(a);
  }
};

/// Mixed oscillator (or hybrid ancilla x oscillator) state.
struct DensityMatrix {
  Mat matrix;

  DensityMatrix() = default;
  explicit DensityMatrix(Mat m) : matrix(std::move(m)) {}

  static DensityMatrix pure(const FockVector& psi) {
    return DensityMatrix(psi.amplitudes * psi.amplitudes.adjoint());
  }

  int dim() const { return static_cast<int>(matrix.rows()); }
  double trace_real() const { return matrix.trace().real(); }
  double hermiticity_defect() const { return (matrix - matrix.adjoint()).cwiseAbs().maxCoeff(); }

  double min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (matrix + matrix.adjoint()),
                                          Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }

  DensityMatrix normalized() const {
    Complex t = matrix.trace();
    if (std::abs(t) == 0.0) throw std::invalid_argument("cannot normalize zero density matrix");
    return DensityMatrix(matrix / t);
  }
};

using OscOperator = Mat;

/// Ladder and quadrature operators on the truncated space. Columnwise
/// a|n> = sqrt(n)|n-1>; q = (a + a^dag)/2 and p = (a - a^dag)/(2i) satisfy
/// [q, p] = i/2 away from the truncation corner.
struct LadderOperators {
  OscOperator a, a_dagger, n, q, p;
};

inline LadderOperators ladder_operators(const Conventions& c) {
  const int N = c.fock_dim;
  Mat a = Mat::Zero(N, N);
  for (int k = 1; k < N; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  LadderOperators ops;
  ops.a = a;
  ops.a_dagger = a.adjoint();
  ops.n = ops.a_dagger * ops.a;
  ops.q = 0.5 * (ops.a + ops.a_dagger);
  ops.p = Complex(0, -0.5) * (ops.a - ops.a_dagger);
  return ops;
}

/// Phase-space commutation phase Phi = Im(beta * conj(alpha)); displacements
/// commute for Phi = k pi and anti-commute for Phi = (2k+1) pi/2.
inline double commutation_phase(Complex alpha, Complex beta) {
  return std::imag(beta * std::conj(alpha));
}

enum class CommutationKind { commuting, anti_commuting, generic };

inline CommutationKind classify_commutation(double phi, double tol = 1e-12) {
  const double half_pi_units = phi / (kPi / 2.0);
  const double r = std::round(half_pi_units);
  if (std::abs(half_pi_units - r) > tol) return CommutationKind::generic;
  const long k = static_cast<long>(r);
  return (k % 2 == 0) ? CommutationKind::commuting : CommutationKind::anti_commuting;
}

/// Exact exponentials of displacement generators along one phase-space
/// direction. The generator K = u a^dag - conj(u) a (|u| = 1) is
/// anti-Hermitian; i K is Hermitian and unitarily equivalent to a real
/// symmetric tridiagonal matrix, so one tridiagonal eigendecomposition per
/// direction yields D(t u) = W exp(-i t E) W^dag for every t. This keeps the
/// numerical exponential exactly unitary and makes characteristic-function
/// scans O(N) per point.
class AxisDisplacer {
 public:
  AxisDisplacer(Complex direction, const Conventions& c)
      : conventions_(c), dim_(c.fock_dim) {
    const double mag = std::abs(direction);
    if (mag == 0.0) throw std::invalid_argument("axis direction must be nonzero");
    u_ = direction / mag;

    // i K is conjugate to the real tridiagonal with off-diagonal sqrt(n+1)
    // by the diagonal phase matrix diag(exp(i n phi)), phi = arg(i u).
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(dim_);
    Eigen::VectorXd sub(dim_ - 1);
    for (int n = 0; n < dim_ - 1; ++n) sub[n] = std::sqrt(static_cast<double>(n + 1));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub);
    if (es.info() != Eigen::Success) throw std::runtime_error("tridiagonal eigensolve failed");
    evals_ = es.eigenvalues();

    const double phi = std::arg(Complex(0, 1) * u_);
    evecs_ = es.eigenvectors().cast<Complex>();
    for (int n = 0; n < dim_; ++n) {
      evecs_.row(n) *= std::exp(Complex(0, phi * n));
    }
  }

  int dim() const { return dim_; }
  Complex direction() const { return u_; }
  const Eigen::VectorXd& eigenvalues() const { return evals_; }

  /// D(t u) as a dense matrix.
  OscOperator at(double t) const {
    conventions_.check_displacement(t * u_);
    return evecs_ * phase_column(t).asDiagonal() * evecs_.adjoint();
  }

  /// D(t u) |psi>, two matrix-vector products.
  FockVector apply(const FockVector& psi, double t) const {
    conventions_.check_displacement(t * u_);
    require_dim(psi.dim());
    Vec w = evecs_.adjoint() * psi.amplitudes;
    w.array() *= phase_column(t).array();
    return FockVector(evecs_ * w);
  }

  /// Spectral weights for scanning <D(t u)> over many t at O(N) per point.
  /// States of smaller dimension are zero-padded into the scan space.
  Eigen::VectorXd scan_weights(const FockVector& psi) const {
    Vec w = evecs_.topRows(psi.dim()).adjoint() * psi.amplitudes;
    return w.cwiseAbs2();
  }

  Eigen::VectorXd scan_weights(const DensityMatrix& rho) const {
    const int m = rho.dim();
    if (m > dim_) throw std::invalid_argument("state dimension exceeds displacer dimension");
    Mat top = evecs_.topRows(m);
    Mat prod = rho.matrix * top;  // m x dim_
    Eigen::VectorXd w(dim_);
    for (int k = 0; k < dim_; ++k) w[k] = std::real(top.col(k).dot(prod.col(k)));
    return w;
  }

  /// chi(t) = sum_k w_k exp(-i t E_k).
  Complex chi(const Eigen::VectorXd& weights, double t) const {
    Complex acc(0, 0);
    for (int k = 0; k < dim_; ++k) {
      acc += weights[k] * std::exp(Complex(0, -t * evals_[k]));
    }
    return acc;
  }

 private:
  Vec phase_column(double t) const {
    Vec ph(dim_);
    for (int k = 0; k < dim_; ++k) ph[k] = std::exp(Complex(0, -t * evals_[k]));
    return ph;
  }

  void require_dim(int d) const {
    if (d != dim_) throw std::invalid_argument("dimension mismatch");
  }

  Conventions conventions_;
  Complex u_;
  int dim_;
  Eigen::VectorXd evals_;
  Mat evecs_;
};

/// D(alpha) = exp(alpha a^dag - conj(alpha) a).
inline OscOperator displacement(Complex alpha, const Conventions& c) {
  if (alpha == Complex(0, 0)) return Mat::Identity(c.fock_dim, c.fock_dim);
  c.check_displacement(alpha);
  return AxisDisplacer(alpha, c).at(std::abs(alpha));
}

/// S(r) = exp(r (a^2 - a^dag^2) / 2), r >= 0, squeezed axis aligned with
/// position: Var_q(S(r)|0>) = exp(-2r)/4.
inline OscOperator squeeze(double r, const Conventions& c, double max_r = 2.0) {
  if (r < 0.0) throw std::invalid_argument("squeezing parameter must be >= 0");
  if (r > max_r) {
    throw TruncationError("squeezing r = " + std::to_string(r) +
                          " exceeds truncation guard r <= " + std::to_string(max_r));
  }
  const int N = c.fock_dim;
  if (r == 0.0) return Mat::Identity(N, N);
  LadderOperators ops = ladder_operators(c);
  Mat h = Complex(0, 0.5) * (ops.a * ops.a - ops.a_dagger * ops.a_dagger);
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  Vec ph(N);
  for (int k = 0; k < N; ++k) ph[k] = std::exp(Complex(0, -r * es.eigenvalues()[k]));
  return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

/// S(r)|0> without forming the full operator.
inline FockVector squeezed_vacuum(double r, const Conventions& c, double max_r = 2.0) {
  OscOperator s = squeeze(r, c, max_r);
  return FockVector(s.col(0));
}

/// Photon-number parity (-1)^n.
inline OscOperator parity_operator(const Conventions& c) {
  Vec d(c.fock_dim);
  for (int n = 0; n < c.fock_dim; ++n) d[n] = (n % 2 == 0) ? 1.0 : -1.0;
  return d.asDiagonal();
}

inline Complex expectation(const FockVector& psi, const OscOperator& op) {
  if (op.rows() != psi.dim() || op.cols() != psi.dim()) {
    throw std::invalid_argument("operator/state dimension mismatch");
  }
  return psi.amplitudes.dot(op * psi.amplitudes);  // <psi|op|psi>
}

inline Complex expectation(const DensityMatrix& rho, const OscOperator& op) {
  if (op.rows() != rho.dim() || op.cols() != rho.dim()) {
    throw std::invalid_argument("operator/state dimension mismatch");
  }
  return (op.cwiseProduct(rho.matrix.transpose())).sum();  // Tr(op rho)
}

/// || (U^dag U - 1) P_M ||_F with P_M projecting onto n <= M; the low-energy
/// unitarity defect used by the truncation tests.
inline double unitarity_defect(const OscOperator& u, int m) {
  Mat d = u.adjoint() * u - Mat::Identity(u.rows(), u.cols());
  return d.leftCols(m + 1).norm();
}

}  // namespace gridsim
