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

#include <map>
#include <string>
#include <vector>

#include "gridsim/oscillator.hpp"

namespace gridsim {

/// Square-grid code parameters: spacing l, squeezing r, and the real
/// coefficients c_k of the displaced-squeezed-state superposition
/// |0>_L = sum_k c_k D(k l) |r>,  |1>_L = D(l/2) |0>_L.
struct GridParams {
  double l = 0.0;
  double r = 0.0;
  std::map<int, double> coefficients;  // k -> c_k

  void validate() const {
    if (!(l > 0.0)) throw std::invalid_argument("grid spacing l must be > 0");
    if (r < 0.0) throw std::invalid_argument("squeezing r must be >= 0");
    bool any = false;
    for (const auto& [k, ck] : coefficients) {
      (void)k;
      if (ck != 0.0) any = true;
    }
    if (!any) throw std::invalid_argument("at least one coefficient c_k must be nonzero");
  }

  static GridParams symmetric(double r = 0.9) {
    GridParams p;
    p.l = std::sqrt(2.0 * kPi);
    p.r = r;
    p.coefficients = {{-1, 1.0}, {0, 2.0}, {1, 1.0}};
    return p;
  }
};

enum class Axis { x, y, z };

inline const char* axis_name(Axis a) {
  switch (a) {
    case Axis::x: return "x";
    case Axis::y: return "y";
    default: return "z";
  }
}

inline Axis axis_from_name(const std::string& s) {
  if (s == "x") return Axis::x;
  if (s == "y") return Axis::y;
  if (s == "z") return Axis::z;
  throw std::invalid_argument("unknown axis '" + s + "'");
}

/// The three phase-space readout directions. Pauli readout displaces by
/// l_j/2, stabilizer readout by l_j. The frame constraints are
/// l_y = -l_x - l_z and Im(l_z conj(l_x)) = 2 pi, which together fix the
/// Pauli anti-commutation structure for any rotated frame.
struct LogicalFrame {
  Complex lx, ly, lz;

  static LogicalFrame standard(double l) {
    LogicalFrame f;
    f.lx = Complex(l, 0);
    f.lz = Complex(0, 2.0 * kPi / l);
    f.ly = -f.lx - f.lz;
    f.validate();
    return f;
  }

  Complex amplitude(Axis a) const {
    switch (a) {
      case Axis::x: return lx;
      case Axis::y: return ly;
      default: return lz;
    }
  }

  void validate(double tol = 1e-12) const {
    if (std::abs(ly + lx + lz) > tol) {
      throw std::invalid_argument("frame violates l_y = -l_x - l_z");
    }
    if (std::abs(std::imag(lz * std::conj(lx)) - 2.0 * kPi) > tol) {
      throw std::invalid_argument("frame violates Im(l_z conj(l_x)) = 2 pi");
    }
  }
};

inline LogicalFrame default_frame(const GridParams& params) {
  params.validate();
  return LogicalFrame::standard(params.l);
}

/// Hadamard as a pi/2 rotation of the readout frame: every l_j is multiplied
/// by i. For the symmetric grid (l = sqrt(2 pi)) the rotated x direction
/// coincides with the old z direction and vice versa, so the x and z
/// readouts swap while the y readout changes sign through the geometric
/// phase of the rotated half-lattice displacement. Applying the rotation
/// twice negates every amplitude, which leaves all readouts unchanged.
inline LogicalFrame hadamard_frame(const LogicalFrame& frame) {
  frame.validate();
  LogicalFrame f;
  f.lx = Complex(0, 1) * frame.lx;
  f.lz = Complex(0, 1) * frame.lz;
  f.ly = -f.lx - f.lz;
  f.validate();
  return f;
}

/// Approximate codeword per the c_k comb. Construction reuses one
/// real-axis displacer for every component.
inline FockVector codeword(const GridParams& params, int label, const Conventions& c) {
  params.validate();
  if (label != 0 && label != 1) throw std::invalid_argument("codeword label must be 0 or 1");
  FockVector sq = squeezed_vacuum(params.r, c);
  AxisDisplacer real_axis(Complex(1, 0), c);
  Vec acc = Vec::Zero(c.fock_dim);
  for (const auto& [k, ck] : params.coefficients) {
    if (ck == 0.0) continue;
    acc += ck * real_axis.apply(sq, k * params.l).amplitudes;
  }
  FockVector psi = FockVector(acc).normalized();
  if (label == 1) psi = real_axis.apply(psi, 0.5 * params.l);
  return psi;
}

/// Residuals of the displacement-operator Pauli algebra, reported separately
/// as exact operator identities (limited only by truncation) and codespace
/// residuals (limited by finite r and k_max).
struct AlgebraReport {
  struct Identity {
    std::string name;
    double residual;
  };
  std::vector<Identity> operator_identities;
  double stabilizer_x_residual_0, stabilizer_x_residual_1;  // ||(S_x - 1)|mu>_L||
  double stabilizer_z_residual_0, stabilizer_z_residual_1;
  double stabilizer_x_expect_0, stabilizer_z_expect_0;  // Re<S_i> on |0>_L

  double max_operator_residual() const {
    double m = 0;
    for (const auto& id : operator_identities) m = std::max(m, id.residual);
    return m;
  }
};

inline AlgebraReport verify_algebra(const GridParams& params, const Conventions& c) {
  const LogicalFrame f = default_frame(params);
  const int block = c.fock_dim / 4;
  const Complex I(0, 1);

  auto D = [&](Complex a) { return displacement(a, c); };
  OscOperator X = D(0.5 * f.lx), Y = D(0.5 * f.ly), Z = D(0.5 * f.lz);
  OscOperator Sx = D(f.lx), Sz = D(f.lz);

  auto residual = [&](const Mat& lhs, const Mat& rhs) {
    return Mat(lhs - rhs).leftCols(block).norm();
  };

  AlgebraReport rep;
  rep.operator_identities = {
      {"X^2 = S_x", residual(X * X, Sx)},
      {"Y^2 = S_x^dag S_z^dag", residual(Y * Y, Sx.adjoint() * Sz.adjoint())},
      {"Z^2 = S_z", residual(Z * Z, Sz)},
      {"X Y = i Z^dag", residual(X * Y, I * Z.adjoint())},
      {"X Z = -i Y^dag", residual(X * Z, -I * Y.adjoint())},
      {"Y Z = i X^dag", residual(Y * Z, I * X.adjoint())},
  };

  FockVector zero = codeword(params, 0, c);
  FockVector one = codeword(params, 1, c);
  auto code_res = [&](const OscOperator& s, const FockVector& mu) {
    return (s * mu.amplitudes - mu.amplitudes).norm();
  };
  rep.stabilizer_x_residual_0 = code_res(Sx, zero);
  rep.stabilizer_x_residual_1 = code_res(Sx, one);
  rep.stabilizer_z_residual_0 = code_res(Sz, zero);
  rep.stabilizer_z_residual_1 = code_res(Sz, one);
  rep.stabilizer_x_expect_0 = expectation(zero, Sx).real();
  rep.stabilizer_z_expect_0 = expectation(zero, Sz).real();
  return rep;
}

}  // namespace gridsim
