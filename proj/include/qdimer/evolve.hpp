// evolve.hpp - time propagation of the vectorized master equation.
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

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qdimer/channels.hpp"
#include "qdimer/errors.hpp"
#include "qdimer/liouvillian.hpp"
#include "qdimer/system.hpp"

namespace qdimer {

// Raised when the generator cannot be diagonalized reliably (defective or
// near-defective eigenvector basis, or a spuriously growing mode).
struct SpectralDecompositionError : NumericalError {
  using NumericalError::NumericalError;
};

enum class Provenance { spectral, rk };
enum class StateValidation { strict, off };

inline const char* to_string(Provenance p) {
  return p == Provenance::spectral ? "spectral" : "rk";
}

struct Trajectory {
  std::vector<double> times;
  std::vector<DensityMatrix> states;
  Provenance provenance = Provenance::spectral;
  double max_hermiticity_deviation = 0.0;
  std::string note;  // non-empty when a propagator had to adjust itself
};

// Logarithmic sample grid with exact endpoints. The number of points is
// round(points_per_decade * log10(t_max/t_min)) + 1, at least 2.
inline std::vector<double> log_time_grid(double t_min, double t_max,
                                         double points_per_decade) {
  if (!(t_min > 0.0))
    throw std::invalid_argument("log_time_grid: t_min must be > 0");
  if (!(t_max > t_min))
    throw std::invalid_argument("log_time_grid: t_max must be > t_min");
  if (!(points_per_decade > 0.0))
    throw std::invalid_argument("log_time_grid: points_per_decade must be > 0");
  const double decades = std::log10(t_max / t_min);
  long n = std::lround(points_per_decade * decades) + 1;
  if (n < 2) n = 2;
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(n));
  for (long k = 0; k < n; ++k) {
    const double f = static_cast<double>(k) / static_cast<double>(n - 1);
    grid.push_back(t_min * std::pow(10.0, f * decades));
  }
  grid.front() = t_min;
  grid.back() = t_max;
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

namespace detail {

using LongComplex = std::complex<long double>;
using Matrix16L = Eigen::Matrix<LongComplex, 16, 16>;
using Vector16L = Eigen::Matrix<LongComplex, 16, 1>;

inline void check_times(const std::vector<double>& times) {
  if (times.empty())
    throw std::invalid_argument("propagate: times must be non-empty");
  if (!(times.front() >= 0.0))
    throw std::invalid_argument("propagate: times must start at t >= 0");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i]))
      throw std::invalid_argument("propagate: times must be finite");
    if (i > 0 && !(times[i] > times[i - 1]))
      throw std::invalid_argument("propagate: times must be strictly increasing");
  }
}

inline void check_product_frame(const DensityMatrix& rho0) {
  if (rho0.frame != BasisFrame::product)
    throw std::invalid_argument(
        "propagate: initial state must be expressed in the product frame");
}

// Hermitizes and gates one sampled state. In strict mode a trace drift above
// 1e-9 or an eigenvalue below -1e-9 aborts the run; negativity is never
// silently clipped.
inline Matrix4 finalize_sample(Matrix4 rho, double t, StateValidation validation,
                               double* max_dev) {
  if (validation == StateValidation::off) return rho;
  const double dev = (rho - Matrix4(rho.adjoint())).cwiseAbs().maxCoeff();
  if (dev > *max_dev) *max_dev = dev;
  rho = 0.5 * (rho + Matrix4(rho.adjoint()));
  const double trace_dev = std::abs(rho.trace() - Complex(1.0, 0.0));
  if (trace_dev > 1e-9)
    throw NumericalError("propagate: trace drifted by " + std::to_string(trace_dev) +
                         " at t=" + std::to_string(t));
  Eigen::SelfAdjointEigenSolver<Matrix4> es(rho, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-9)
    throw NumericalError("propagate: state lost positivity (min eigenvalue " +
                         std::to_string(es.eigenvalues().minCoeff()) + ") at t=" +
                         std::to_string(t));
  return rho;
}

struct SpectralDecomposition {
  Matrix16L v;
  Vector16L lambda;
  Eigen::PartialPivLU<Matrix16L> lu;
  double condition = 0.0;
};

// Extended-precision eigendecomposition with structural cleanup: decaying
// modes keep their rates, a genuinely stationary mode is snapped to zero so
// arbitrarily late samples stay exact, and real modes are made exactly real.
inline SpectralDecomposition decompose(const Liouvillian& l) {
  SpectralDecomposition d;
  const Matrix16L m = l.mat.cast<LongComplex>();
  Eigen::ComplexEigenSolver<Matrix16L> solver(m, true);
  if (solver.info() != Eigen::Success)
    throw SpectralDecompositionError("spectral: eigensolver did not converge");
  d.v = solver.eigenvectors();
  d.lambda = solver.eigenvalues();
  for (int i = 0; i < 16; ++i) {
    long double re = d.lambda(i).real();
    long double im = d.lambda(i).imag();
    if (re > 1e-10L)
      throw SpectralDecompositionError(
          "spectral: generator has a growing mode (Re lambda = " +
          std::to_string(static_cast<double>(re)) + ")");
    if (re > 0.0L) re = 0.0L;
    if (std::hypot(static_cast<double>(re), static_cast<double>(im)) <= 1e-11) {
      re = 0.0L;
      im = 0.0L;
    }
    if (std::abs(static_cast<double>(im)) <= 1e-8) im = 0.0L;
    d.lambda(i) = LongComplex(re, im);
  }
  // Gate on the raw eigenvector basis before any repair below: a defective
  // generator must be refused based on what the eigensolver actually found.
  d.lu.compute(d.v);
  {
    const double rcond = static_cast<double>(d.lu.rcond());
    d.condition = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
  }
  // Near-defective bases (equal-rate cascades) hide secular t*exp terms in a
  // huge-weight cancellation that the eigenvalue cleanup above destroys, so
  // anything past 1e8 is refused even though the mode sum would still run.
  if (!(d.condition <= 1e8))
    throw SpectralDecompositionError(
        "spectral: eigenvector basis is ill-conditioned (cond ~ " +
        std::to_string(d.condition) + "), generator is defective or near-defective");

  // A real-eigenvalue mode is a hermitian matrix direction up to one global
  // phase. Eigensolver backward error leaks complex multiples of neighboring
  // modes into it (worst across the tiny slow-mode gap), which would surface
  // as a spurious hermiticity defect of every propagated state; rotating the
  // phase out and symmetrizing removes that leak at first order.
  for (int i = 0; i < 16; ++i) {
    if (d.lambda(i).imag() != 0.0L) continue;
    Eigen::Matrix<LongComplex, 4, 4> m;
    for (int c = 0; c < 4; ++c)
      for (int r = 0; r < 4; ++r) m(r, c) = d.v(r + 4 * c, i);
    // m(r,c) m(c,r) = e^{2i phi} |H_rc|^2 exposes the phase.
    int br = 0, bc = 0;
    long double best = -1.0L;
    for (int c = 0; c < 4; ++c)
      for (int r = 0; r < 4; ++r) {
        const long double mag = std::abs(m(r, c) * m(c, r));
        if (mag > best) {
          best = mag;
          br = r;
          bc = c;
        }
      }
    if (best <= 0.0L) continue;
    const long double phi = std::arg(m(br, bc) * m(bc, br)) / 2.0L;
    m *= std::exp(LongComplex(0.0L, -phi));
    const Eigen::Matrix<LongComplex, 4, 4> sym = 0.5L * (m + m.adjoint().eval());
    if (sym.norm() < 0.5L * m.norm()) continue;  // phase ambiguous by pi/2
    for (int c = 0; c < 4; ++c)
      for (int r = 0; r < 4; ++r) d.v(r + 4 * c, i) = sym(r, c);
  }
  d.lu.compute(d.v);
  return d;
}

}  // namespace detail

// Exact mode-sum propagation: rho(t) = V exp(diag(lambda) t) V^-1 vec(rho0).
// Cost is independent of t, so it covers the full 10+ decade observation
// window. Throws SpectralDecompositionError when the generator resists
// diagonalization and NumericalError when a sampled state fails validation.
inline Trajectory spectral_propagate(const Liouvillian& l, const DensityMatrix& rho0,
                                     const std::vector<double>& times,
                                     StateValidation validation = StateValidation::strict) {
  detail::check_times(times);
  detail::check_product_frame(rho0);
  const detail::SpectralDecomposition d = detail::decompose(l);
  const detail::Vector16L c =
      d.lu.solve(detail::Vector16L(vec_state(rho0.mat).cast<detail::LongComplex>()));

  Trajectory traj;
  traj.provenance = Provenance::spectral;
  traj.times = times;
  traj.states.reserve(times.size());
  for (double t : times) {
    Matrix4 rho;
    if (t == 0.0) {
      rho = rho0.mat;
    } else {
      detail::Vector16L w;
      for (int i = 0; i < 16; ++i)
        w(i) = std::exp(d.lambda(i) * static_cast<long double>(t)) * c(i);
      const Vector16 vt = detail::Vector16L(d.v * w).cast<Complex>();
      rho = unvec_state(vt);
    }
    rho = detail::finalize_sample(rho, t, validation, &traj.max_hermiticity_deviation);
    traj.states.push_back({rho, BasisFrame::product});
  }
  return traj;
}

namespace detail {

// Right-hand side of the master equation in operator form,
//   drho/dt = G rho + rho G^+ + sum_k (L_k rho) L_k^+,
// with G = -iH - (1/2) sum_k L_k^+ L_k and the rates folded into L_k.
// Channels with exactly zero rate are dropped up front.
struct MasterRhs {
  Matrix4 g = Matrix4::Zero();
  Matrix4 g_adj = Matrix4::Zero();
  std::vector<std::pair<Matrix4, Matrix4>> jumps;

  MasterRhs(const Matrix4& h, const std::vector<JumpChannel>& channels) {
    Matrix4 decay = Matrix4::Zero();
    for (const JumpChannel& c : channels) {
      if (c.rate == 0.0) continue;
      decay += c.rate * Matrix4(c.op.adjoint() * c.op);
      // Keep the sign outside the square root: non-CP generators (negative
      // rates) are legitimate inputs when state validation is off.
      const Matrix4 scaled = std::sqrt(std::abs(c.rate)) * c.op;
      jumps.emplace_back(std::copysign(1.0, c.rate) * scaled, Matrix4(scaled.adjoint()));
    }
    g = Complex(0.0, -1.0) * h - 0.5 * decay;
    g_adj = g.adjoint();
  }

  void operator()(const Matrix4& y, Matrix4& out, Matrix4& scratch) const {
    out.noalias() = g * y;
    out.noalias() += y * g_adj;
    for (const auto& j : jumps) {
      scratch.noalias() = j.first * y;
      out.noalias() += scratch * j.second;
    }
  }
};

}  // namespace detail

// Adaptive explicit Dormand-Prince 5(4) integration of the master equation.
// Independent of the spectral path (never diagonalizes the generator); used
// to cross-validate it and to handle defective generators. rho0 is the state
// at t = 0 and `times` are absolute sample times.
inline Trajectory rk_propagate(const Matrix4& h_op,
                               const std::vector<JumpChannel>& channels,
                               const DensityMatrix& rho0,
                               const std::vector<double>& times,
                               double rel_tol = 1e-10,
                               StateValidation validation = StateValidation::strict) {
  detail::check_times(times);
  detail::check_product_frame(rho0);
  if (!(rel_tol >= 1e-12 && rel_tol <= 1e-4))
    throw std::invalid_argument("rk_propagate: rel_tol must lie in [1e-12, 1e-4]");

  // Dormand-Prince 5(4) tableau; e = b5 - b4 is the embedded error weight.
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                   a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                   a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                   b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                   e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
  constexpr double kAbsTol = 1e-14;
  const double eps = std::numeric_limits<double>::epsilon();

  const detail::MasterRhs rhs(h_op, channels);
  Matrix4 y = rho0.mat;
  Matrix4 k[7], stage, scratch, y_next, err_mat;

  Trajectory traj;
  traj.provenance = Provenance::rk;
  traj.times = times;
  traj.states.reserve(times.size());

  rhs(y, k[0], scratch);
  double t = 0.0;
  double hstep = 1e-6;
  {
    const double d0 = y.norm();
    const double d1 = k[0].norm();
    if (d1 > 1e-300 && d0 > 0.0) hstep = 0.01 * d0 / d1;
    hstep = std::min(hstep, std::max(times.back(), 1e-12));
  }

  const auto error_norm = [&](const Matrix4& e, const Matrix4& y0, const Matrix4& y1) {
    double acc = 0.0;
    for (int col = 0; col < 4; ++col)
      for (int row = 0; row < 4; ++row) {
        const double scale =
            kAbsTol + rel_tol * std::max(std::abs(y0(row, col)), std::abs(y1(row, col)));
        const double r = std::abs(e(row, col)) / scale;
        acc += r * r;
      }
    return std::sqrt(acc / 16.0);
  };

  for (double target : times) {
    if (target == 0.0) {
      traj.states.push_back({detail::finalize_sample(y, 0.0, validation,
                                                     &traj.max_hermiticity_deviation),
                             BasisFrame::product});
      continue;
    }
    while (t < target) {
      const double floor_h = 16.0 * eps * std::max(std::abs(t), 1.0);
      const bool clamped = t + hstep >= target;
      const double htry = clamped ? target - t : hstep;
      if (!clamped && htry < floor_h)
        throw StiffnessError("rk_propagate: step size underflow at t=" +
                             std::to_string(t) + "; generator too stiff for an "
                             "explicit method");

      stage = y + (htry * a21) * k[0];
      rhs(stage, k[1], scratch);
      stage = y + (htry * a31) * k[0] + (htry * a32) * k[1];
      rhs(stage, k[2], scratch);
      stage = y + (htry * a41) * k[0] + (htry * a42) * k[1] + (htry * a43) * k[2];
      rhs(stage, k[3], scratch);
      stage = y + (htry * a51) * k[0] + (htry * a52) * k[1] + (htry * a53) * k[2] +
              (htry * a54) * k[3];
      rhs(stage, k[4], scratch);
      stage = y + (htry * a61) * k[0] + (htry * a62) * k[1] + (htry * a63) * k[2] +
              (htry * a64) * k[3] + (htry * a65) * k[4];
      rhs(stage, k[5], scratch);
      y_next = y + (htry * b1) * k[0] + (htry * b3) * k[2] + (htry * b4) * k[3] +
               (htry * b5) * k[4] + (htry * b6) * k[5];
      rhs(y_next, k[6], scratch);
      err_mat = (htry * e1) * k[0] + (htry * e3) * k[2] + (htry * e4) * k[3] +
                (htry * e5) * k[4] + (htry * e6) * k[5] + (htry * e7) * k[6];

      const double err = error_norm(err_mat, y, y_next);
      const bool finite = y_next.allFinite() && std::isfinite(err);

      if (finite && err <= 1.0) {
        t = clamped ? target : t + htry;
        y = y_next;
        k[0] = k[6];
        if (!clamped) {
          const double factor =
              err > 0.0 ? std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0) : 5.0;
          hstep = htry * factor;
        }
      } else {
        const double factor =
            finite ? std::clamp(0.9 * std::pow(err, -0.2), 0.2, 0.9) : 0.2;
        hstep = htry * factor;
        if (hstep < floor_h)
          throw StiffnessError("rk_propagate: step size underflow at t=" +
                               std::to_string(t) + "; generator too stiff for an "
                               "explicit method");
      }
    }
    const Matrix4 checked = detail::finalize_sample(
        y, target, validation, &traj.max_hermiticity_deviation);
    if (validation == StateValidation::strict) y = checked;
    traj.states.push_back({checked, BasisFrame::product});
  }
  return traj;
}

// Preferred entry point: spectral propagation with an automatic fall back to
// the adaptive integrator when the generator cannot be diagonalized, or when
// the mode sum itself produces states that fail validation (a near-defective
// basis can slip through the condition gate). The integrator has no spectral
// artifacts, so its verdict on state validity is final. The fallback is
// recorded in Trajectory::note.
inline Trajectory spectral_propagate(const Matrix4& h_op,
                                     const std::vector<JumpChannel>& channels,
                                     const DensityMatrix& rho0,
                                     const std::vector<double>& times,
                                     StateValidation validation = StateValidation::strict) {
  const Liouvillian l = assemble_liouvillian(h_op, channels);
  try {
    return spectral_propagate(l, rho0, times, validation);
  } catch (const NumericalError& e) {
    Trajectory traj = rk_propagate(h_op, channels, rho0, times, 1e-10, validation);
    traj.note = std::string("spectral propagation unavailable (") + e.what() +
                "); fell back to the adaptive integrator";
    return traj;
  }
}

}  // namespace qdimer
