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

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <random>

#include "qdimer/channels.hpp"

using namespace qdimer;

namespace {

const JumpChannel& find_channel(const std::vector<JumpChannel>& ch,
                                const std::string& label) {
  for (const auto& c : ch)
    if (c.label == label) return c;
  FAIL("missing channel " << label);
  return ch.front();
}

}  // namespace

TEST_CASE("thermal rate function") {
  CHECK(kms_rate(0.02, -5.0, 0.02) == 0.02);
  CHECK(kms_rate(0.02, 0.0, 0.02) == 0.02);
  CHECK(kms_rate(0.02, 0.2, 0.02) == Catch::Approx(0.02 * std::exp(-10.0)).epsilon(1e-12));
  CHECK(kms_rate(0.02, 0.2, 0.02) == Catch::Approx(9.08e-7).epsilon(1e-3));
  // Deeply suppressed absorption underflows to exactly zero.
  CHECK(kms_rate(2e-4, 100.1, 0.02) == 0.0);
  // High temperature recovers the flat rate.
  CHECK(kms_rate(0.02, 0.2, 1e12) == Catch::Approx(0.02).epsilon(1e-10));
  CHECK_THROWS_AS(kms_rate(-0.1, 0.0, 0.02), std::invalid_argument);
  CHECK_THROWS_AS(kms_rate(0.02, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("resonant channel set") {
  SystemParams p;
  const auto ch = resonant_jump_channels(p);
  REQUIRE(ch.size() == 10);

  SECTION("doublet exchange operators") {
    const auto& down = find_channel(ch, "dp,13");
    const auto& up = find_channel(ch, "dp,12");
    // |as><s| / 2 and |s><as| / 2.
    CHECK(std::abs(ket_asym().dot(down.op * ket_sym()) - Complex(0.5, 0.0)) <= 1e-15);
    CHECK((down.op - 0.5 * ket_asym() * ket_sym().adjoint()).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK(std::abs(ket_sym().dot(up.op * ket_asym()) - Complex(0.5, 0.0)) <= 1e-15);
    CHECK(down.transition_frequency == Catch::Approx(-0.2).epsilon(1e-14));
    CHECK(up.transition_frequency == Catch::Approx(0.2).epsilon(1e-14));
    CHECK(down.rate == 0.02);
    CHECK(up.rate == Catch::Approx(0.02 * std::exp(-10.0)).epsilon(1e-12));
  }

  SECTION("dephasing diagonal operator") {
    const auto& diag = find_channel(ch, "dp,11");
    const Matrix4 half_n = 0.5 * (number1() + number2());
    CHECK((diag.op - half_n).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK(diag.transition_frequency == 0.0);
    CHECK(diag.rate == 0.02);
  }

  SECTION("radiative operators act only on the bright ladder") {
    const auto& low = find_channel(ch, "rad,1");
    const auto& high = find_channel(ch, "rad,2");
    CHECK((low.op * ket_asym()).norm() <= 1e-15);
    CHECK((high.op * ket_asym()).norm() <= 1e-15);
    CHECK(std::abs(ket_gg().dot(low.op * ket_sym())) ==
          Catch::Approx(std::sqrt(2.0)).epsilon(1e-14));
    CHECK(std::abs(ket_sym().dot(high.op * ket_ee())) ==
          Catch::Approx(std::sqrt(2.0)).epsilon(1e-14));
    CHECK(low.rate == 2e-4);
    CHECK(high.rate == 2e-4);
    CHECK(low.transition_frequency == Catch::Approx(-100.1).epsilon(1e-14));
    CHECK(high.transition_frequency == Catch::Approx(-99.9).epsilon(1e-14));
  }

  SECTION("absorption partners satisfy detailed balance") {
    const auto& low = find_channel(ch, "rad,1");
    const auto& low_dag = find_channel(ch, "rad,1dag");
    CHECK((low_dag.op - low.op.adjoint().eval()).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK(low_dag.transition_frequency == -low.transition_frequency);
    // exp(-100.1 / 0.02) underflows: upward radiative rates are exactly zero.
    CHECK(low_dag.rate == 0.0);
    const auto& up = find_channel(ch, "dp,12");
    const auto& down = find_channel(ch, "dp,13");
    CHECK(up.rate == Catch::Approx(down.rate * std::exp(-0.2 / 0.02)).epsilon(1e-12));
  }

  SECTION("every operator is an eigenoperator of the hamiltonian") {
    const Matrix4 h = build_hamiltonian(p);
    for (const auto& c : ch) {
      const Matrix4 comm = h * c.op - c.op * h;
      CHECK((comm - c.transition_frequency * c.op).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }

  SECTION("detuned parameters are rejected") {
    SystemParams d = p;
    d.omega1 = 100.01;
    CHECK_THROWS_AS(resonant_jump_channels(d), std::invalid_argument);
  }
}

TEST_CASE("detuned channel set") {
  SystemParams p;
  p.omega1 = 100.065;
  p.omega2 = 99.935;  // y = 1.3
  const auto ch = detuned_jump_channels(p);
  REQUIRE(ch.size() == 10);

  SECTION("eigenoperator property at finite detuning") {
    const Matrix4 h = build_hamiltonian(p);
    for (const auto& c : ch) {
      const Matrix4 comm = h * c.op - c.op * h;
      CHECK((comm - c.transition_frequency * c.op).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }

  SECTION("channel decompositions resum to the coupling operators") {
    const Matrix4 n1 = find_channel(ch, "dp,11").op + find_channel(ch, "dp,12").op +
                       find_channel(ch, "dp,13").op;
    CHECK((n1 - number1()).cwiseAbs().maxCoeff() <= 1e-14);
    const Matrix4 n2 = find_channel(ch, "dp,21").op + find_channel(ch, "dp,22").op +
                       find_channel(ch, "dp,23").op;
    CHECK((n2 - number2()).cwiseAbs().maxCoeff() <= 1e-14);
    const Matrix4 stot = find_channel(ch, "rad,1").op + find_channel(ch, "rad,2").op;
    CHECK((stot - (sigma1() + sigma2())).cwiseAbs().maxCoeff() <= 1e-14);
  }

  SECTION("interaction picture recomposition") {
    const Matrix4 h = build_hamiltonian(p);
    std::mt19937 gen(42);
    std::uniform_real_distribution<double> tdist(0.0, 10.0);
    for (int trial = 0; trial < 10; ++trial) {
      const double t = tdist(gen);
      const Matrix4 u = (Complex(0.0, 1.0) * h * t).exp();
      const Matrix4 udag = u.adjoint();
      // e^{iHt} A e^{-iHt} = sum_k A_k e^{i w_k t} for each coupling operator.
      const Matrix4 lhs_n1 = u * number1() * udag;
      Matrix4 rhs_n1 = Matrix4::Zero();
      for (const char* lbl : {"dp,11", "dp,12", "dp,13"}) {
        const auto& c = find_channel(ch, lbl);
        rhs_n1 += c.op * std::exp(Complex(0.0, c.transition_frequency * t));
      }
      CHECK((lhs_n1 - rhs_n1).cwiseAbs().maxCoeff() <= 1e-10);

      const Matrix4 lhs_s = u * (sigma1() + sigma2()) * udag;
      Matrix4 rhs_s = Matrix4::Zero();
      for (const char* lbl : {"rad,1", "rad,2"}) {
        const auto& c = find_channel(ch, lbl);
        rhs_s += c.op * std::exp(Complex(0.0, c.transition_frequency * t));
      }
      CHECK((lhs_s - rhs_s).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }

  SECTION("zero detuning reduces to the resonant set") {
    SystemParams r;  // resonant defaults
    const auto det = detuned_jump_channels(r);
    const auto res = resonant_jump_channels(r);
    REQUIRE(det.size() == res.size());
    for (std::size_t i = 0; i < det.size(); ++i) {
      CHECK(det[i].label == res[i].label);
      CHECK((det[i].op - res[i].op).cwiseAbs().maxCoeff() <= 1e-12);
      CHECK(det[i].rate == Catch::Approx(res[i].rate).margin(1e-15));
      CHECK(det[i].transition_frequency ==
            Catch::Approx(res[i].transition_frequency).margin(1e-12));
    }
  }

  SECTION("zero coupling is rejected") {
    SystemParams bad = p;
    bad.coupling = 0.0;
    CHECK_THROWS_AS(detuned_jump_channels(bad), std::invalid_argument);
  }
}

TEST_CASE("local channel set") {
  SystemParams p;
  const auto ch = local_jump_channels(p);
  REQUIRE(ch.size() == 6);

  const auto& z1 = find_channel(ch, "local,dp_1");
  const auto& z2 = find_channel(ch, "local,dp_2");
  CHECK((z1.op - sigma_z1()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((z2.op - sigma_z2()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(z1.rate == 0.02);
  CHECK(z1.transition_frequency == 0.0);

  // The local operator connects the doublet states: <as| sigma_z1 |s> = 1.
  CHECK(std::abs(ket_asym().dot(z1.op * ket_sym()) - Complex(1.0, 0.0)) <= 1e-15);

  // The radiative channels are the same collective eigenoperators.
  const auto res = resonant_jump_channels(p);
  for (const char* lbl : {"rad,1", "rad,2", "rad,1dag", "rad,2dag"}) {
    const auto& a = find_channel(ch, lbl);
    const auto& b = find_channel(res, lbl);
    CHECK((a.op - b.op).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK(a.rate == b.rate);
    CHECK(a.transition_frequency == b.transition_frequency);
  }
}

TEST_CASE("channel dispatcher") {
  SystemParams p;
  const auto g = global_jump_channels(p);
  const auto r = resonant_jump_channels(p);
  REQUIRE(g.size() == r.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    CHECK((g[i].op - r[i].op).cwiseAbs().maxCoeff() <= 1e-12);

  SystemParams d = p;
  d.omega1 = 100.01;
  const auto gd = global_jump_channels(d);
  CHECK(gd.size() == 10);
}
