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

#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "gridsim/tomography.hpp"
#include "oracles.hpp"

using namespace gridsim;
using Catch::Matchers::WithinAbs;

namespace {
const double kL = std::sqrt(2.0 * kPi);

std::array<LogicalReadout, 6> ideal_eigenstate_readouts() {
  return {LogicalReadout{0, 0, 1},  LogicalReadout{0, 0, -1}, LogicalReadout{1, 0, 0},
          LogicalReadout{-1, 0, 0}, LogicalReadout{0, 1, 0},  LogicalReadout{0, -1, 0}};
}

std::array<Eigen::Matrix2cd, 6> ideal_eigenstate_rhos() {
  std::array<Eigen::Matrix2cd, 6> rhos;
  auto rs = ideal_eigenstate_readouts();
  for (int j = 0; j < 6; ++j) rhos[j] = reconstruct_state(rs[j]).rho;
  return rhos;
}

std::array<LogicalReadout, 6> channel_outputs(const Eigen::Matrix4cd& chi) {
  const auto& s = pauli_matrices();
  auto rhos = ideal_eigenstate_rhos();
  std::array<LogicalReadout, 6> out;
  for (int j = 0; j < 6; ++j) {
    Eigen::Matrix2cd r = Eigen::Matrix2cd::Zero();
    for (int m = 0; m < 4; ++m)
      for (int n = 0; n < 4; ++n) r += chi(m, n) * (s[m] * rhos[j] * s[n]);
    out[j].x = std::real((s[1] * r).trace());
    out[j].y = std::real((s[2] * r).trace());
    out[j].z = std::real((s[3] * r).trace());
  }
  return out;
}

Eigen::Matrix2cd random_unitary(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::Matrix2cd m;
  m << Complex(g(rng), g(rng)), Complex(g(rng), g(rng)), Complex(g(rng), g(rng)),
      Complex(g(rng), g(rng));
  Eigen::HouseholderQR<Eigen::Matrix2cd> qr(m);
  Eigen::Matrix2cd q = qr.householderQ();
  Eigen::Matrix2cd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < 2; ++i) q.col(i) *= r(i, i) / std::abs(r(i, i));
  return q;
}
}  // namespace

TEST_CASE("logical readout of codewords") {
  Conventions c(256);
  GridParams p = GridParams::symmetric();
  LogicalFrame f = default_frame(p);
  FockVector zero = codeword(p, 0, c);
  FockVector one = codeword(p, 1, c);

  SECTION("z readout matches the analytic component-overlap model") {
    auto comb = oracles::codeword_comb(p.l, {1, 2, 1}, -1, false);
    double oracle = oracles::comb_char_function(comb, p.r, 0.5 * f.lz).real();
    REQUIRE_THAT(logical_readout(zero, f, c).z, WithinAbs(oracle, 1e-6));
  }
  SECTION("|1>_L readout is the negative of |0>_L") {
    REQUIRE_THAT(logical_readout(one, f, c).z, WithinAbs(-logical_readout(zero, f, c).z, 1e-8));
  }
  SECTION("vacuum readouts are the coherent characteristic function") {
    FockVector vac = FockVector::vacuum(c);
    LogicalReadout r = logical_readout(vac, f, c);
    REQUIRE_THAT(r.x, WithinAbs(std::exp(-0.5 * std::norm(0.5 * f.lx)), 1e-10));
    REQUIRE_THAT(r.y, WithinAbs(std::exp(-0.5 * std::norm(0.5 * f.ly)), 1e-10));
    REQUIRE_THAT(r.z, WithinAbs(std::exp(-0.5 * std::norm(0.5 * f.lz)), 1e-10));
  }
  SECTION("vacuum stabilizer sx = exp(-l^2/2)") {
    StabilizerReadout s = stabilizer_readout(FockVector::vacuum(c), f, c);
    REQUIRE_THAT(s.sx, WithinAbs(std::exp(-0.5 * kL * kL), 1e-10));
  }
  SECTION("readout is linear in the state") {
    DensityMatrix a = DensityMatrix::pure(zero);
    DensityMatrix b = DensityMatrix::pure(one);
    double pmix = 0.3;
    DensityMatrix mix(pmix * a.matrix + (1 - pmix) * b.matrix);
    LogicalReadout rm = logical_readout(mix, f, c);
    LogicalReadout ra = logical_readout(a, f, c);
    LogicalReadout rb = logical_readout(b, f, c);
    REQUIRE_THAT(rm.z, WithinAbs(pmix * ra.z + (1 - pmix) * rb.z, 1e-12));
    REQUIRE_THAT(rm.x, WithinAbs(pmix * ra.x + (1 - pmix) * rb.x, 1e-12));
  }
}

TEST_CASE("state reconstruction and fidelity") {
  SECTION("(0,0,1) is |0><0|") {
    LogicalState st = reconstruct_state(0, 0, 1);
    REQUIRE_THAT(std::abs(st.rho(0, 0) - Complex(1, 0)), WithinAbs(0.0, 1e-15));
    REQUIRE_THAT(std::abs(st.rho(1, 1)), WithinAbs(0.0, 1e-15));
    REQUIRE(st.physical);
  }
  SECTION("(0,0,0) is maximally mixed with fidelity 1/2 to any pure state") {
    LogicalState st = reconstruct_state(0, 0, 0);
    REQUIRE_THAT(state_fidelity(st, Eigen::Vector2cd(1, 0)), WithinAbs(0.5, 1e-15));
    REQUIRE_THAT(
        state_fidelity(st, Eigen::Vector2cd(1 / std::sqrt(2.0), 1 / std::sqrt(2.0))),
        WithinAbs(0.5, 1e-15));
  }
  SECTION("overlong Bloch vectors are flagged, not projected") {
    LogicalState st = reconstruct_state(0.9, 0.0, 0.9);
    REQUIRE_FALSE(st.physical);
    REQUIRE_THAT(st.bloch_norm, WithinAbs(std::hypot(0.9, 0.9), 1e-15));
    REQUIRE_THAT(std::abs(st.rho(0, 1) - Complex(0.45, 0)), WithinAbs(0.0, 1e-15));
  }
  SECTION("pure state fidelity is 1") {
    REQUIRE_THAT(state_fidelity(reconstruct_state(0, 0, 1), Eigen::Vector2cd(1, 0)),
                 WithinAbs(1.0, 1e-15));
  }
}

TEST_CASE("beta matrix") {
  auto rs = ideal_eigenstate_readouts();
  PauliReadout o = PauliReadout::from_readouts(rs);

  SECTION("identity chi reproduces the input readouts") {
    Eigen::Matrix4cd chi = Eigen::Matrix4cd::Zero();
    chi(0, 0) = 1;
    Eigen::Vector<double, 18> lam = predict_lambda(build_beta(o), chi);
    for (int j = 0; j < 6; ++j)
      for (int k = 0; k < 3; ++k) REQUIRE_THAT(lam[3 * j + k], WithinAbs(o.o(j, k + 1), 1e-14));
  }

  SECTION("X conjugation flips the z prediction on |0>") {
    Eigen::Matrix4cd chi = Eigen::Matrix4cd::Zero();
    chi(1, 1) = 1;  // the X channel
    Eigen::Vector<double, 18> lam = predict_lambda(build_beta(o), chi);
    REQUIRE_THAT(lam[2], WithinAbs(-o.o(0, 3), 1e-14));  // state j=0, k=Z
    REQUIRE_THAT(lam[0], WithinAbs(o.o(0, 1), 1e-14));   // x component unchanged
  }

  SECTION("matches the brute-force index sum for random chi and o") {
    std::mt19937_64 rng(99);
    std::normal_distribution<double> g;
    PauliReadout ro;
    for (int j = 0; j < 6; ++j) {
      ro.o(j, 0) = 0.5;
      for (int k = 1; k < 4; ++k) ro.o(j, k) = 0.4 * g(rng);
    }
    Eigen::Matrix4cd t = Eigen::Matrix4cd::Zero();
    for (int m = 0; m < 4; ++m)
      for (int n = 0; n <= m; ++n) t(m, n) = Complex(g(rng), m == n ? 0.0 : g(rng));
    Eigen::Matrix4cd chi = t.adjoint() * t;
    Eigen::Vector<double, 18> lam = predict_lambda(build_beta(ro), chi);

    const auto& s = pauli_matrices();
    for (int j = 0; j < 6; ++j) {
      Eigen::Matrix2cd rho = Eigen::Matrix2cd::Zero();
      for (int a = 0; a < 4; ++a) rho += ro.o(j, a) * s[a];
      for (int k = 1; k <= 3; ++k) {
        Complex brute(0, 0);
        for (int m = 0; m < 4; ++m)
          for (int n = 0; n < 4; ++n)
            brute += chi(m, n) * (s[k] * s[m] * rho * s[n]).trace();
        REQUIRE_THAT(lam[3 * j + (k - 1)], WithinAbs(0.5 * brute.real(), 1e-12));
      }
    }
  }
}

TEST_CASE("trace constraint") {
  SECTION("identity channel satisfies it exactly") {
    Eigen::Matrix4cd chi = Eigen::Matrix4cd::Zero();
    chi(0, 0) = 1;
    REQUIRE(trace_constraint(chi).norm() < 1e-15);
  }
  SECTION("any unitary channel satisfies it") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 5; ++i) {
      Eigen::Matrix4cd chi = chi_from_unitary(random_unitary(rng));
      REQUIRE(trace_constraint(chi).norm() < 1e-12);
    }
  }
  SECTION("a trace-decreasing channel violates it") {
    Eigen::Matrix4cd chi = Eigen::Matrix4cd::Zero();
    chi(0, 0) = 0.5;
    REQUIRE(trace_constraint(chi).norm() > 0.4);
  }
}

TEST_CASE("T parameterization") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g;
  TParams p;
  for (auto& v : p.t) v = g(rng);
  Eigen::Matrix4cd chi = p.chi();
  SECTION("chi = T^dag T is Hermitian PSD") {
    REQUIRE((chi - chi.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(chi);
    REQUIRE(es.eigenvalues().minCoeff() > -1e-12);
  }
  SECTION("from_chi round trip") {
    TParams q = TParams::from_chi(chi);
    REQUIRE((q.chi() - chi).cwiseAbs().maxCoeff() < 1e-7);
  }
  SECTION("analytic derivative matches finite differences") {
    const double eps = 1e-7;
    for (int i = 0; i < 16; ++i) {
      TParams pp = p, pm = p;
      pp.t[i] += eps;
      pm.t[i] -= eps;
      Eigen::Matrix4cd fd = (pp.chi() - pm.chi()) / (2 * eps);
      REQUIRE((fd - p.dchi(i)).cwiseAbs().maxCoeff() < 1e-6);
    }
  }
}

TEST_CASE("chi fit") {
  SECTION("noiseless identity-process data") {
    auto rs = ideal_eigenstate_readouts();
    PauliReadout o = PauliReadout::from_readouts(rs);
    Lambda lam = lambda_from_readouts(rs);
    ChiFitResult fit = fit_chi(o, lam);
    REQUIRE(fit.converged);
    REQUIRE_THAT(std::abs(fit.chi(0, 0) - Complex(1, 0)), WithinAbs(0.0, 1e-6));
    for (int m = 0; m < 4; ++m)
      for (int n = 0; n < 4; ++n)
        if (m != 0 || n != 0) REQUIRE_THAT(std::abs(fit.chi(m, n)), WithinAbs(0.0, 1e-6));
    REQUIRE(fit.constraint_residual < 1e-8);
  }

  SECTION("random unitary channels round trip") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 5; ++trial) {
      Eigen::Matrix4cd chi_true = chi_from_unitary(random_unitary(rng));
      auto rs = ideal_eigenstate_readouts();
      PauliReadout o = PauliReadout::from_readouts(rs);
      Lambda lam = lambda_from_readouts(channel_outputs(chi_true));
      ChiFitResult fit = fit_chi(o, lam);
      REQUIRE(process_fidelity(fit.chi, chi_true) >= 0.999);
      REQUIRE(fit.constraint_residual < 1e-6);
    }
  }

  SECTION("random mixed-unitary CPTP channels recover within trace distance 1e-3") {
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> u01(0.1, 0.9);
    for (int trial = 0; trial < 8; ++trial) {
      double w = u01(rng);
      Eigen::Matrix4cd chi_true = w * chi_from_unitary(random_unitary(rng)) +
                                  (1 - w) * chi_from_unitary(random_unitary(rng));
      auto rs = ideal_eigenstate_readouts();
      PauliReadout o = PauliReadout::from_readouts(rs);
      Lambda lam = lambda_from_readouts(channel_outputs(chi_true));
      ChiFitResult fit = fit_chi(o, lam);
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(fit.chi - chi_true);
      double trace_dist = 0.5 * es.eigenvalues().cwiseAbs().sum();
      REQUIRE(trace_dist < 1e-3);
    }
  }

  SECTION("rejects non-finite data") {
    auto rs = ideal_eigenstate_readouts();
    PauliReadout o = PauliReadout::from_readouts(rs);
    Lambda lam = lambda_from_readouts(rs);
    lam(0, 0) = std::numeric_limits<double>::quiet_NaN();
    REQUIRE_THROWS_AS(fit_chi(o, lam), std::invalid_argument);
  }
}

TEST_CASE("process fidelity") {
  std::mt19937_64 rng(3);
  Eigen::Matrix4cd chi = chi_from_unitary(random_unitary(rng));
  SECTION("identical channels give 1") {
    REQUIRE_THAT(process_fidelity(chi, chi), WithinAbs(1.0, 1e-12));
  }
  SECTION("depolarizing vs identity gives 0.25") {
    Eigen::Matrix4cd dep = 0.25 * Eigen::Matrix4cd::Identity();
    Eigen::Matrix4cd id = Eigen::Matrix4cd::Zero();
    id(0, 0) = 1;
    REQUIRE_THAT(process_fidelity(dep, id), WithinAbs(0.25, 1e-15));
  }
}

TEST_CASE("hadamard as a readout permutation gives a perfect process matrix") {
  Conventions c(256);
  GridParams p = GridParams::symmetric();
  LogicalFrame f = default_frame(p);

  std::array<LogicalReadout, 6> in;
  auto recipes = six_state_recipes(p);
  for (int j = 0; j < 6; ++j) {
    PreparedState st = prepare_state(recipes[j], p, f, c);
    in[j] = logical_readout(st.state, f, c);
  }
  std::array<LogicalReadout, 6> out;
  for (int j = 0; j < 6; ++j) out[j] = hadamard_permute(in[j]);

  ChiFitResult fit = fit_chi(PauliReadout::from_readouts(in), lambda_from_readouts(out));
  Eigen::Matrix4cd chi_h = chi_from_unitary(hadamard_gate());
  REQUIRE(process_fidelity(fit.chi, chi_h) >= 1.0 - 1e-9);
}

TEST_CASE("rotation gate helper") {
  Eigen::Matrix2cd t = rotation_gate(Axis::z, kPi / 4);
  // R_z(pi/4) = diag(e^{-i pi/8}, e^{i pi/8}); as a channel this is the T gate.
  REQUIRE_THAT(std::abs(t(0, 0) - std::exp(Complex(0, -kPi / 8))), WithinAbs(0.0, 1e-15));
  REQUIRE_THAT(std::abs(t(1, 1) - std::exp(Complex(0, kPi / 8))), WithinAbs(0.0, 1e-15));
}
