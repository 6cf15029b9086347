// Copyright 2026 The qdimer authors
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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "qdimer/channels.hpp"
#include "qdimer/liouvillian.hpp"

using namespace qdimer;

namespace {

Matrix4 random_density(std::mt19937& gen) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix4 a;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) a(i, j) = Complex(n(gen), n(gen));
  Matrix4 rho = a * a.adjoint();
  rho /= rho.trace();
  return rho;
}

}  // namespace

TEST_CASE("vectorization layout") {
  Matrix4 m;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m(i, j) = Complex(i, j);
  const Vector16 v = vec_state(m);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(v(i + 4 * j) == m(i, j));
  CHECK((unvec_state(v) - m).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("kronecker action") {
  std::mt19937 gen(11);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    Matrix4 a, b, x;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        a(i, j) = Complex(n(gen), n(gen));
        b(i, j) = Complex(n(gen), n(gen));
        x(i, j) = Complex(n(gen), n(gen));
      }
    // kron(a, b) vec(x) = vec(b x a^T) in column-stacking convention.
    const Vector16 lhs = kron4(a, b) * vec_state(x);
    const Vector16 rhs = vec_state(b * x * a.transpose());
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("assembled generator matches the direct right-hand side") {
  SystemParams p;
  const Matrix4 h = build_hamiltonian(p);
  const auto channels = resonant_jump_channels(p);
  const Liouvillian l = assemble_liouvillian(h, channels);

  std::mt19937 gen(202608);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix4 rho = random_density(gen);
    const Matrix4 via_matrix = unvec_state(l.mat * vec_state(rho));
    const Matrix4 direct = master_rhs(h, channels, rho);
    CHECK((via_matrix - direct).cwiseAbs().maxCoeff() <= 1e-13);
    CHECK(std::abs(direct.trace()) <= 1e-14);
  }
}

TEST_CASE("trace preservation of all channel sets") {
  SystemParams p;
  const Matrix4 h = build_hamiltonian(p);
  CHECK(trace_preservation_residual(assemble_liouvillian(h, resonant_jump_channels(p))) <=
        1e-12);
  CHECK(trace_preservation_residual(assemble_liouvillian(h, local_jump_channels(p))) <=
        1e-12);
  SystemParams d = p;
  d.omega1 = 100.05;
  d.omega2 = 99.95;
  CHECK(trace_preservation_residual(
            assemble_liouvillian(build_hamiltonian(d), detuned_jump_channels(d))) <= 1e-12);
}

TEST_CASE("pure hamiltonian flow") {
  SystemParams p;
  const Matrix4 h = build_hamiltonian(p);
  const Liouvillian l = assemble_liouvillian(h, {});

  // |s><as| is an eigenmatrix with eigenvalue -i * splitting.
  const Matrix4 coherence = ket_sym() * ket_asym().adjoint();
  const Vector16 v = vec_state(coherence);
  const Vector16 lv = l.mat * v;
  const Complex expected(0.0, -p.splitting());
  CHECK((lv - expected * v).cwiseAbs().maxCoeff() <= 1e-12);

  // Populations are stationary under pure hamiltonian flow.
  CHECK((l.mat * vec_state(pure_state(ket_ee()).mat)).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("spectrum lies in the closed left half plane") {
  SystemParams p;
  const Liouvillian l = assemble_liouvillian(build_hamiltonian(p), resonant_jump_channels(p));
  const auto spec = liouvillian_spectrum(l);
  REQUIRE(spec.size() == 16);
  // Sorted by descending real part; a zero mode leads.
  CHECK(spec(0).real() <= 1e-10);
  CHECK(spec(0).real() >= -1e-12);
  for (Eigen::Index i = 1; i < spec.size(); ++i) CHECK(spec(i).real() <= spec(i - 1).real());
  for (const auto& ev : spec) CHECK(ev.real() <= 1e-10);
}

TEST_CASE("stationary state") {
  SystemParams p;
  const Liouvillian l = assemble_liouvillian(build_hamiltonian(p), resonant_jump_channels(p));
  const DensityMatrix ss = stationary_state(l);
  CHECK(trace_error(ss) <= 1e-12);
  // Upward radiative rates underflow, so the dimer relaxes to the ground state.
  CHECK(ss.mat(kIdxGG, kIdxGG).real() > 1.0 - 1e-4);
  CHECK((l.mat * vec_state(ss.mat)).cwiseAbs().maxCoeff() <= 1e-11);
}

TEST_CASE("ground and excited state rates") {
  SystemParams p;
  const Matrix4 h = build_hamiltonian(p);
  const auto ch = resonant_jump_channels(p);

  // |gg><gg| is stationary.
  CHECK(master_rhs(h, ch, pure_state(ket_gg()).mat).cwiseAbs().maxCoeff() <= 1e-12);

  // From |ee><ee| the excited population drains at 2 * gamma_rad.
  const Matrix4 rhs = master_rhs(h, ch, pure_state(ket_ee()).mat);
  CHECK(rhs(kIdxEE, kIdxEE).real() == Catch::Approx(-4e-4).epsilon(1e-12));
  // The decay feeds the symmetric doublet state only.
  CHECK(std::abs(ket_sym().dot(rhs * ket_sym()) - Complex(4e-4, 0.0)) <= 1e-15);
  CHECK(std::abs(ket_asym().dot(rhs * ket_asym())) <= 1e-15);
}

TEST_CASE("resonant and detuned generators agree at zero detuning") {
  SystemParams p;
  const Matrix4 h = build_hamiltonian(p);
  const Liouvillian a = assemble_liouvillian(h, resonant_jump_channels(p));
  const Liouvillian b = assemble_liouvillian(h, detuned_jump_channels(p));
  CHECK((a.mat - b.mat).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("zero-rate channels are skipped") {
  SystemParams p;
  const Matrix4 h = build_hamiltonian(p);
  std::vector<JumpChannel> ch = resonant_jump_channels(p);
  std::vector<JumpChannel> nonzero;
  for (const auto& c : ch)
    if (c.rate != 0.0) nonzero.push_back(c);
  CHECK(nonzero.size() < ch.size());  // the underflowed absorption channels
  const Liouvillian full = assemble_liouvillian(h, ch);
  const Liouvillian trimmed = assemble_liouvillian(h, nonzero);
  CHECK((full.mat - trimmed.mat).cwiseAbs().maxCoeff() == 0.0);
}
