// channels.hpp - jump channels of the dissipative generator.
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
#include <string>
#include <vector>

#include "qdimer/errors.hpp"
#include "qdimer/system.hpp"

namespace qdimer {

// One Lindblad jump channel. `transition_frequency` is the energy gained by
// the system when the channel fires: negative for emission (full spectral
// weight), positive for absorption (thermally suppressed), zero for pure
// dephasing. `rate` already includes the thermal factor.
struct JumpChannel {
  Matrix4 op = Matrix4::Zero();
  double rate = 0.0;
  double transition_frequency = 0.0;
  std::string label;
};

// One-sided flat reservoir spectrum obeying Kubo-Martin-Schwinger detailed
// balance: gamma(omega <= 0) = gamma_negative, gamma(omega > 0) =
// exp(-omega/temperature) * gamma_negative.
inline double kms_rate(double gamma_negative, double omega, double temperature) {
  if (!(temperature > 0.0))
    throw std::invalid_argument("kms_rate: temperature must be > 0");
  if (gamma_negative < 0.0)
    throw std::invalid_argument("kms_rate: base rate must be >= 0");
  if (omega <= 0.0) return gamma_negative;
  return gamma_negative * std::exp(-omega / temperature);
}

// Channels of the resonant (omega1 == omega2) global generator. Jump
// operators are eigenoperators of the Hamiltonian, so each carries a sharp
// transition frequency. Fixed order:
//   dp,11 dp,12 dp,13 dp,21 dp,22 dp,23 rad,1 rad,2 rad,1dag rad,2dag
inline std::vector<JumpChannel> resonant_jump_channels(const SystemParams& p,
                                                       double tol = 1e-12) {
  p.validate();
  if (!p.is_resonant(tol))
    throw std::invalid_argument(
        "resonant_jump_channels: qubits are detuned; use detuned_jump_channels");

  const double split = p.splitting();       // = 2*coupling at resonance
  const double theta = p.frequency_sum();
  const Matrix4 s1 = sigma1();
  const Matrix4 s2 = sigma2();
  const Matrix4 n1 = number1();
  const Matrix4 n2 = number2();

  // Dephasing eigenoperators of the per-qubit occupation coupling:
  // n_k = (n1+n2)/2 -+ (|s><as| + |as><s|)/2 in the symmetric/antisymmetric
  // frame; the off-diagonal halves carry frequencies +-split.
  const Matrix4 dp_diag = 0.5 * (n1 + n2);
  const Matrix4 dp_up = 0.25 * (s1.adjoint() + s2.adjoint()) * (s1 - s2);  // |s><as|/2
  const Matrix4 dp_down = dp_up.adjoint();                                 // |as><s|/2

  // Collective radiative eigenoperators: sqrt(2)|gg><s| and sqrt(2)|s><ee|.
  const Matrix4 rad_low = s1 + s2 - n1 * s2 - n2 * s1;
  const Matrix4 rad_high = n1 * s2 + n2 * s1;

  std::vector<JumpChannel> ch;
  ch.reserve(10);
  ch.push_back({dp_diag, kms_rate(p.gamma_dp1, 0.0, p.temp_dp), 0.0, "dp,11"});
  ch.push_back({dp_up, kms_rate(p.gamma_dp1, split, p.temp_dp), split, "dp,12"});
  ch.push_back({dp_down, kms_rate(p.gamma_dp1, -split, p.temp_dp), -split, "dp,13"});
  ch.push_back({dp_diag, kms_rate(p.gamma_dp2, 0.0, p.temp_dp), 0.0, "dp,21"});
  ch.push_back({Matrix4(-dp_up), kms_rate(p.gamma_dp2, split, p.temp_dp), split, "dp,22"});
  ch.push_back({Matrix4(-dp_down), kms_rate(p.gamma_dp2, -split, p.temp_dp), -split, "dp,23"});

  const double w_outer = 0.5 * (theta + split);  // |s> -> |gg> emission
  const double w_inner = 0.5 * (theta - split);  // |ee> -> |s> emission
  ch.push_back({rad_low, kms_rate(p.gamma_rad, -w_outer, p.temp_rad), -w_outer, "rad,1"});
  ch.push_back({rad_high, kms_rate(p.gamma_rad, -w_inner, p.temp_rad), -w_inner, "rad,2"});
  ch.push_back({Matrix4(rad_low.adjoint()), kms_rate(p.gamma_rad, w_outer, p.temp_rad),
                w_outer, "rad,1dag"});
  ch.push_back({Matrix4(rad_high.adjoint()), kms_rate(p.gamma_rad, w_inner, p.temp_rad),
                w_inner, "rad,2dag"});
  return ch;
}

// Channels of the detuned global generator, valid for any detuning
// (reduces to the resonant forms at omega1 == omega2). Same order and
// labels as resonant_jump_channels.
inline std::vector<JumpChannel> detuned_jump_channels(const SystemParams& p) {
  p.validate();

  const double y = p.detuning() / p.coupling;
  const double s2v = y * y + 4.0;
  const double sv = std::sqrt(s2v);
  const double split = p.splitting();
  const double theta = p.frequency_sum();

  const Matrix4 s1 = sigma1();
  const Matrix4 s2 = sigma2();
  const Matrix4 n1 = number1();
  const Matrix4 n2 = number2();
  const Matrix4 exch = s1.adjoint() * s2 + s2.adjoint() * s1;

  // Eigenoperator components of the occupation couplings n1 and n2.
  const Matrix4 dp11 = (1.0 / s2v) * (2.0 * (0.5 * (y * y + 2.0) * n1 + n2) + y * exch);
  const Matrix4 dp12 = -(1.0 / s2v) * (0.5 * (y + sv) * s1.adjoint() + s2.adjoint()) *
                       (0.5 * (y - sv) * s1 + s2);
  const Matrix4 dp13 = -(1.0 / s2v) * (0.5 * (y - sv) * s1.adjoint() + s2.adjoint()) *
                       (0.5 * (y + sv) * s1 + s2);
  const Matrix4 dp21 = (1.0 / s2v) * (2.0 * (0.5 * (y * y + 2.0) * n2 + n1) - y * exch);
  const Matrix4 dp22 = Matrix4(-dp12);
  const Matrix4 dp23 = Matrix4(-dp13);

  // Eigenoperator components of the collective coupling sigma1 + sigma2.
  const Matrix4 rad1 = (1.0 / sv) * ((1.0 + 0.5 * (y + sv)) * s1 +
                                     (1.0 + 0.5 * (sv - y)) * s2 -
                                     2.0 * n1 * s2 - 2.0 * n2 * s1);
  const Matrix4 rad2 = (1.0 / sv) * ((-1.0 - 0.5 * (y - sv)) * s1 +
                                     (-1.0 + 0.5 * (y + sv)) * s2 +
                                     2.0 * n1 * s2 + 2.0 * n2 * s1);

  std::vector<JumpChannel> ch;
  ch.reserve(10);
  ch.push_back({dp11, kms_rate(p.gamma_dp1, 0.0, p.temp_dp), 0.0, "dp,11"});
  ch.push_back({dp12, kms_rate(p.gamma_dp1, split, p.temp_dp), split, "dp,12"});
  ch.push_back({dp13, kms_rate(p.gamma_dp1, -split, p.temp_dp), -split, "dp,13"});
  ch.push_back({dp21, kms_rate(p.gamma_dp2, 0.0, p.temp_dp), 0.0, "dp,21"});
  ch.push_back({dp22, kms_rate(p.gamma_dp2, split, p.temp_dp), split, "dp,22"});
  ch.push_back({dp23, kms_rate(p.gamma_dp2, -split, p.temp_dp), -split, "dp,23"});

  const double w_outer = 0.5 * (theta + split);
  const double w_inner = 0.5 * (theta - split);
  ch.push_back({rad1, kms_rate(p.gamma_rad, -w_outer, p.temp_rad), -w_outer, "rad,1"});
  ch.push_back({rad2, kms_rate(p.gamma_rad, -w_inner, p.temp_rad), -w_inner, "rad,2"});
  ch.push_back({Matrix4(rad1.adjoint()), kms_rate(p.gamma_rad, w_outer, p.temp_rad),
                w_outer, "rad,1dag"});
  ch.push_back({Matrix4(rad2.adjoint()), kms_rate(p.gamma_rad, w_inner, p.temp_rad),
                w_inner, "rad,2dag"});
  return ch;
}

// Dispatcher used by scenario code: exact resonant forms when possible.
inline std::vector<JumpChannel> global_jump_channels(const SystemParams& p) {
  return p.is_resonant() ? resonant_jump_channels(p) : detuned_jump_channels(p);
}

// Channels of the local-dephasing variant: each dephasing reservoir couples
// to its own bare qubit through sigma_z (which ignores the doublet splitting),
// while radiative decay keeps the collective resonant forms evaluated at the
// mean frequency. Order:
//   local,dp_1 local,dp_2 rad,1 rad,2 rad,1dag rad,2dag
inline std::vector<JumpChannel> local_jump_channels(const SystemParams& p) {
  p.validate();

  const double split = 2.0 * p.coupling;
  const double theta = p.frequency_sum();
  const Matrix4 s1 = sigma1();
  const Matrix4 s2 = sigma2();
  const Matrix4 rad_low = s1 + s2 - number1() * s2 - number2() * s1;
  const Matrix4 rad_high = number1() * s2 + number2() * s1;

  std::vector<JumpChannel> ch;
  ch.reserve(6);
  ch.push_back({sigma_z1(), kms_rate(p.gamma_dp1, 0.0, p.temp_dp), 0.0, "local,dp_1"});
  ch.push_back({sigma_z2(), kms_rate(p.gamma_dp2, 0.0, p.temp_dp), 0.0, "local,dp_2"});

  const double w_outer = 0.5 * (theta + split);
  const double w_inner = 0.5 * (theta - split);
  ch.push_back({rad_low, kms_rate(p.gamma_rad, -w_outer, p.temp_rad), -w_outer, "rad,1"});
  ch.push_back({rad_high, kms_rate(p.gamma_rad, -w_inner, p.temp_rad), -w_inner, "rad,2"});
  ch.push_back({Matrix4(rad_low.adjoint()), kms_rate(p.gamma_rad, w_outer, p.temp_rad),
                w_outer, "rad,1dag"});
  ch.push_back({Matrix4(rad_high.adjoint()), kms_rate(p.gamma_rad, w_inner, p.temp_rad),
                w_inner, "rad,2dag"});
  return ch;
}

}  // namespace qdimer
