// rate_model.hpp - reduced four-population rate equations and closed forms.
//
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

#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "qdimer/errors.hpp"
#include "qdimer/system.hpp"

namespace qdimer {

// Populations ordered (p_ee, p_s, p_as, p_gg).
using PopulationVector = Eigen::Vector4d;

// The reduced model is defined for resonant qubits with a common dephasing
// rate; anything else must be compared against the full master equation.
inline void check_rate_model_params(const SystemParams& p) {
  p.validate();
  if (!p.is_resonant())
    throw std::invalid_argument("rate model: requires zero detuning");
  if (p.gamma_dp1 != p.gamma_dp2)
    throw std::invalid_argument("rate model: requires a common dephasing rate");
}

// Stochastic generator of the reduced dynamics, d pop/dt = R * pop, with the
// four transitions
//   ee -> s   at 2*gamma_rad
//   s  -> gg  at 2*gamma_rad
//   s  -> as  at gamma_dp/2
//   as -> s   at (gamma_dp/2) exp(-2*coupling/temp_dp).
// Off-diagonal entries are nonnegative and every column sums to zero.
inline Eigen::Matrix4d rate_generator(const SystemParams& p) {
  check_rate_model_params(p);
  constexpr int ee = 0, s = 1, as = 2, gg = 3;
  Eigen::Matrix4d r = Eigen::Matrix4d::Zero();
  const auto add = [&r](int from, int to, double rate) {
    r(to, from) += rate;
    r(from, from) -= rate;
  };
  const double gamma_dp = p.gamma_dp1;
  add(ee, s, 2.0 * p.gamma_rad);
  add(s, gg, 2.0 * p.gamma_rad);
  add(s, as, 0.5 * gamma_dp);
  add(as, s, 0.5 * gamma_dp * std::exp(-2.0 * p.coupling / p.temp_dp));
  return r;
}

inline PopulationVector rate_rhs(const PopulationVector& pop, const SystemParams& p) {
  return rate_generator(p) * pop;
}

// Quasi-stationary distribution reached after the fast relaxation stage:
// all population shared between |as> and |gg>, with
// p_as = (gamma_dp/2) / (2*gamma_rad + gamma_dp/2).
inline PopulationVector quasi_stationary(const SystemParams& p) {
  check_rate_model_params(p);
  const double gamma_dp = p.gamma_dp1;
  const double denom = 2.0 * p.gamma_rad + 0.5 * gamma_dp;
  if (!(denom > 0.0))
    throw std::invalid_argument("quasi_stationary: all rates are zero");
  const double p_as = 0.5 * gamma_dp / denom;
  return {0.0, 0.0, p_as, 1.0 - p_as};
}

// Closed-form long-time tail: p_as(t) = p_as_qs * exp(-decay_rate * t) with
// decay_rate = gamma_dp * gamma_rad * exp(-2*coupling/temp_dp)
//              / (gamma_dp/2 + 2*gamma_rad).
// The formula is an asymptotic approximation; `valid` flags whether t lies
// past its stated onset (2/gamma_dp) * exp(coupling/temp_dp), and nothing is
// thrown outside that window.
struct AnalyticTail {
  double p_as = 0.0;
  double p_gg = 1.0;
  double decay_rate = 0.0;
  double validity_start = 0.0;
  bool valid = false;
};

inline AnalyticTail analytic_pas(double t, const SystemParams& p) {
  check_rate_model_params(p);
  const double gamma_dp = p.gamma_dp1;
  AnalyticTail out;
  out.decay_rate = gamma_dp * p.gamma_rad * std::exp(-2.0 * p.coupling / p.temp_dp) /
                   (0.5 * gamma_dp + 2.0 * p.gamma_rad);
  out.validity_start = gamma_dp > 0.0
                           ? (2.0 / gamma_dp) * std::exp(p.coupling / p.temp_dp)
                           : std::numeric_limits<double>::infinity();
  out.p_as = quasi_stationary(p)(2) * std::exp(-out.decay_rate * t);
  out.p_gg = 1.0 - out.p_as;
  out.valid = t >= out.validity_start;
  return out;
}

// Exact solution of the linear rate equations. Diagonalizable generators are
// solved spectrally (the scaling-and-squaring exponential loses probability
// conservation once |r t| reaches ~1e10); the defective gamma_dp = 0 cascade
// falls back to the matrix exponential, which is fine over its short horizon.
inline std::vector<PopulationVector> solve_rates(const PopulationVector& p0,
                                                 const std::vector<double>& times,
                                                 const SystemParams& p) {
  for (int i = 0; i < 4; ++i)
    if (!(p0(i) >= -1e-12))
      throw std::invalid_argument("solve_rates: negative initial population");
  if (std::abs(p0.sum() - 1.0) > 1e-9)
    throw std::invalid_argument("solve_rates: initial populations must sum to 1");
  const Eigen::Matrix4d r = rate_generator(p);

  Eigen::Vector4cd lambda;
  Eigen::Vector4cd weights;
  Eigen::Matrix4cd v;
  bool spectral = false;
  Eigen::EigenSolver<Eigen::Matrix4d> es(r);
  if (es.info() == Eigen::Success) {
    v = es.eigenvectors();
    lambda = es.eigenvalues();
    if (Eigen::PartialPivLU<Eigen::Matrix4cd>(v).rcond() > 1e-8) {
      spectral = true;
      const double scale = r.cwiseAbs().maxCoeff();
      for (int i = 0; i < 4; ++i) {
        // Snap the Perron zero mode and forbid spurious growth.
        if (std::abs(lambda(i)) <= 1e-12 * scale) lambda(i) = 0.0;
        if (lambda(i).real() > 0.0) lambda(i).real(0.0);
        // Decaying modes are orthogonal to the exact left null vector 1^T;
        // restoring that in floating point pins sum(p) for every t.
        if (lambda(i) != 0.0) v.col(i).array() -= v.col(i).mean();
      }
      weights = Eigen::PartialPivLU<Eigen::Matrix4cd>(v).solve(
          p0.cast<std::complex<double>>());
    }
  }

  std::vector<PopulationVector> out;
  out.reserve(times.size());
  for (double t : times) {
    if (!(t >= 0.0)) throw std::invalid_argument("solve_rates: times must be >= 0");
    if (t == 0.0) {
      out.push_back(p0);
    } else if (spectral) {
      Eigen::Vector4cd acc = Eigen::Vector4cd::Zero();
      for (int i = 0; i < 4; ++i) acc += weights(i) * std::exp(lambda(i) * t) * v.col(i);
      out.push_back(acc.real());
    } else {
      out.push_back(Eigen::Matrix4d((r * t).exp()) * p0);
    }
  }
  return out;
}

// Closed-form radiative cascade at gamma_dp = 0 (both dephasing reservoirs
// off): ee -> s -> gg with equal rates produces the defective-chain solution.
inline PopulationVector dicke_chain(double t, double gamma_rad) {
  const double x = 2.0 * gamma_rad * t;
  const double decay = std::exp(-x);
  return {decay, x * decay, 0.0, 1.0 - decay * (1.0 + x)};
}

}  // namespace qdimer
