// observables.hpp - populations, entropy, concurrence, lifetime extraction.
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
#include <cstddef>
#include <vector>

#include "qdimer/errors.hpp"
#include "qdimer/evolve.hpp"
#include "qdimer/system.hpp"

namespace qdimer {

inline double expectation(const DensityMatrix& rho, const Vector4& ket) {
  return ket.dot(rho.mat * ket).real();
}

// Populations of the doubly excited, symmetric, antisymmetric and ground
// states. Defined on product-frame states only.
struct Populations {
  double p_ee = 0.0;
  double p_s = 0.0;
  double p_as = 0.0;
  double p_gg = 0.0;
};

inline Populations populations(const DensityMatrix& rho) {
  if (rho.frame != BasisFrame::product)
    throw std::invalid_argument("populations: state must be in the product frame");
  return {expectation(rho, ket_ee()), expectation(rho, ket_sym()),
          expectation(rho, ket_asym()), expectation(rho, ket_gg())};
}

// Populations of the energy eigenstates {|ee>, |+>, |->, |gg>}; |-> is the
// long-lived member of the doublet and coincides with |as> at zero detuning.
struct EigenPopulations {
  double p_ee = 0.0;
  double p_plus = 0.0;
  double p_minus = 0.0;
  double p_gg = 0.0;
};

inline EigenPopulations eigen_populations(const DensityMatrix& rho,
                                          const EigenBasis& basis) {
  if (rho.frame != BasisFrame::product)
    throw std::invalid_argument("eigen_populations: state must be in the product frame");
  return {expectation(rho, Vector4(basis.u.col(0))),
          expectation(rho, Vector4(basis.u.col(1))),
          expectation(rho, Vector4(basis.u.col(2))),
          expectation(rho, Vector4(basis.u.col(3)))};
}

// Von Neumann entropy in nats. Basis independent. Eigenvalues below 1e-12
// contribute zero; an eigenvalue below -1e-6 signals a state too far from
// positivity for the entropy to mean anything.
inline double von_neumann_entropy(const DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<Matrix4> es(
      Matrix4(0.5 * (rho.mat + rho.mat.adjoint())), Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double lam = es.eigenvalues()(i);
    if (lam < -1e-6)
      throw NumericalError("von_neumann_entropy: eigenvalue " + std::to_string(lam) +
                           " is too negative");
    if (lam < 1e-12) continue;
    s -= lam * std::log(lam);
  }
  return s;
}

// Two-qubit concurrence C = max(0, r1 - r2 - r3 - r4) where r_i are the
// square roots of the eigenvalues of rho * (Y rho* Y), sorted descending,
// and Y = sigma_y (x) sigma_y. The spin flip is tied to the product basis.
inline double concurrence(const DensityMatrix& rho) {
  if (rho.frame != BasisFrame::product)
    throw std::invalid_argument("concurrence: state must be in the product frame");
  Matrix4 y = Matrix4::Zero();
  y(0, 3) = -1.0;
  y(1, 2) = 1.0;
  y(2, 1) = 1.0;
  y(3, 0) = -1.0;
  const Matrix4 flipped = y * rho.mat.conjugate() * y;
  Eigen::ComplexEigenSolver<Matrix4> es(Matrix4(rho.mat * flipped), false);
  if (es.info() != Eigen::Success)
    throw NumericalError("concurrence: eigensolver failed");
  Eigen::Vector4d r;
  for (int i = 0; i < 4; ++i)
    r(i) = std::sqrt(std::max(0.0, es.eigenvalues()(i).real()));
  std::sort(r.data(), r.data() + 4, std::greater<double>());
  return std::max(0.0, r(0) - r(1) - r(2) - r(3));
}

// One row of the observable table exported by the command line tool.
struct ObservableRecord {
  double t = 0.0;
  double p_ee = 0.0;
  double p_s = 0.0;
  double p_as = 0.0;
  double p_gg = 0.0;
  double entropy = 0.0;
  double concurrence = 0.0;
  double trace_err = 0.0;
  double min_eig = 0.0;
};

inline std::vector<ObservableRecord> observable_table(const Trajectory& traj) {
  std::vector<ObservableRecord> rows;
  rows.reserve(traj.times.size());
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const DensityMatrix& rho = traj.states[i];
    const Populations p = populations(rho);
    rows.push_back({traj.times[i], p.p_ee, p.p_s, p.p_as, p.p_gg,
                    von_neumann_entropy(rho), concurrence(rho), trace_error(rho),
                    min_eigenvalue(rho)});
  }
  return rows;
}

// Exponential tail fit of a slowly decaying population.
struct FitResult {
  double gamma = 0.0;      // decay rate of the tail
  double t_ent = 0.0;      // lifetime, 1/gamma
  double r_squared = 0.0;  // of the linear fit to ln(value)
  double plateau = 0.0;    // peak value the tail decays from
  double t_start = 0.0;    // first sample time in the fit window
  double t_end = 0.0;      // last sample time in the fit window
  int points = 0;          // samples inside the window
};

inline constexpr int kMinFitPoints = 5;

// Fits ln(v) = a - gamma * t over the window where v has fallen to between
// 80% and 5% of its peak. Demands that the series actually decays below half
// its peak (InsufficientHorizonError otherwise), is monotone on the window
// and is well described by a single exponential (FitQualityError otherwise).
inline FitResult fit_exponential_tail(const std::vector<double>& times,
                                      const std::vector<double>& values) {
  if (times.size() != values.size())
    throw std::invalid_argument("fit_exponential_tail: size mismatch");
  const std::size_t n = times.size();
  if (n < static_cast<std::size_t>(kMinFitPoints))
    throw InsufficientHorizonError("fit_exponential_tail: too few samples");

  std::size_t peak = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (values[i] > values[peak]) peak = i;
  const double plateau = values[peak];
  if (!(plateau > 1e-12))
    throw FitQualityError("fit_exponential_tail: signal is zero");

  bool decayed = false;
  for (std::size_t i = peak + 1; i < n; ++i)
    if (values[i] < 0.5 * plateau) {
      decayed = true;
      break;
    }
  if (!decayed)
    throw InsufficientHorizonError(
        "fit_exponential_tail: signal never decays below half its peak; extend t_max");

  std::size_t first = n, last = 0;
  for (std::size_t i = peak + 1; i < n; ++i) {
    if (values[i] > 0.8 * plateau) continue;
    if (values[i] < 0.05 * plateau) break;
    if (first == n) first = i;
    last = i;
  }
  if (first == n || last + 1 - first < static_cast<std::size_t>(kMinFitPoints))
    throw InsufficientHorizonError(
        "fit_exponential_tail: fewer than " + std::to_string(kMinFitPoints) +
        " samples in the fit window; increase the grid density or t_max");

  for (std::size_t i = first + 1; i <= last; ++i)
    if (values[i] > values[i - 1] * (1.0 + 1e-9) + 1e-15)
      throw FitQualityError("fit_exponential_tail: tail is not monotone");

  // Least squares on (t, ln v).
  const std::size_t m = last + 1 - first;
  double st = 0.0, sy = 0.0;
  for (std::size_t i = first; i <= last; ++i) {
    st += times[i];
    sy += std::log(values[i]);
  }
  const double tbar = st / static_cast<double>(m);
  const double ybar = sy / static_cast<double>(m);
  double stt = 0.0, sty = 0.0, syy = 0.0;
  for (std::size_t i = first; i <= last; ++i) {
    const double dt = times[i] - tbar;
    const double dy = std::log(values[i]) - ybar;
    stt += dt * dt;
    sty += dt * dy;
    syy += dy * dy;
  }
  if (!(stt > 0.0) || !(syy > 0.0))
    throw FitQualityError("fit_exponential_tail: degenerate fit window");
  const double slope = sty / stt;
  const double r2 = (sty * sty) / (stt * syy);
  if (!(slope < 0.0))
    throw FitQualityError("fit_exponential_tail: tail does not decay");
  if (r2 < 0.999)
    throw FitQualityError("fit_exponential_tail: fit quality R^2 = " +
                          std::to_string(r2) + " below 0.999; tail is not a single "
                          "exponential on the chosen window");

  FitResult fit;
  fit.gamma = -slope;
  fit.t_ent = 1.0 / fit.gamma;
  fit.r_squared = r2;
  fit.plateau = plateau;
  fit.t_start = times[first];
  fit.t_end = times[last];
  fit.points = static_cast<int>(m);
  return fit;
}

// Lifetime of the protected doublet member: fits the tail of <-|rho|->.
inline FitResult fit_lifetime(const Trajectory& traj, const EigenBasis& basis) {
  std::vector<double> v;
  v.reserve(traj.states.size());
  for (const DensityMatrix& rho : traj.states)
    v.push_back(expectation(rho, Vector4(basis.u.col(2))));
  return fit_exponential_tail(traj.times, v);
}

}  // namespace qdimer
