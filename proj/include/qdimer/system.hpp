// system.hpp - two-qubit system: parameters, operators, Hamiltonian, eigenbasis.
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

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "qdimer/errors.hpp"

namespace qdimer {

using Complex = std::complex<double>;
using Matrix4 = Eigen::Matrix4cd;
using Vector4 = Eigen::Vector4cd;
using Matrix16 = Eigen::Matrix<Complex, 16, 16>;
using Vector16 = Eigen::Matrix<Complex, 16, 1>;

// Product basis order is fixed everywhere: {|ee>, |eg>, |ge>, |gg>},
// first letter = qubit 1, second letter = qubit 2.
inline constexpr int kIdxEE = 0;
inline constexpr int kIdxEG = 1;
inline constexpr int kIdxGE = 2;
inline constexpr int kIdxGG = 3;

enum class BasisFrame { product, eigen };

// 4x4 density matrix tagged with the basis it is expressed in.
struct DensityMatrix {
  Matrix4 mat = Matrix4::Zero();
  BasisFrame frame = BasisFrame::product;
};

inline Vector4 ket_ee() { return Vector4::Unit(kIdxEE); }
inline Vector4 ket_eg() { return Vector4::Unit(kIdxEG); }
inline Vector4 ket_ge() { return Vector4::Unit(kIdxGE); }
inline Vector4 ket_gg() { return Vector4::Unit(kIdxGG); }
inline Vector4 ket_sym() { return (ket_eg() + ket_ge()) / std::sqrt(2.0); }
inline Vector4 ket_asym() { return (ket_eg() - ket_ge()) / std::sqrt(2.0); }

inline DensityMatrix pure_state(const Vector4& ket,
                                BasisFrame frame = BasisFrame::product) {
  return {ket * ket.adjoint(), frame};
}

// Lowering operator of qubit 1: |ee> -> |ge>, |eg> -> |gg>.
inline Matrix4 sigma1() {
  Matrix4 m = Matrix4::Zero();
  m(kIdxGE, kIdxEE) = 1.0;
  m(kIdxGG, kIdxEG) = 1.0;
  return m;
}

// Lowering operator of qubit 2: |ee> -> |eg>, |ge> -> |gg>.
inline Matrix4 sigma2() {
  Matrix4 m = Matrix4::Zero();
  m(kIdxEG, kIdxEE) = 1.0;
  m(kIdxGG, kIdxGE) = 1.0;
  return m;
}

inline Matrix4 number1() { return sigma1().adjoint() * sigma1(); }  // diag(1,1,0,0)
inline Matrix4 number2() { return sigma2().adjoint() * sigma2(); }  // diag(1,0,1,0)

inline Matrix4 sigma_z1() {
  Matrix4 m = Matrix4::Zero();
  m.diagonal() << 1.0, 1.0, -1.0, -1.0;
  return m;
}

inline Matrix4 sigma_z2() {
  Matrix4 m = Matrix4::Zero();
  m.diagonal() << 1.0, -1.0, 1.0, -1.0;
  return m;
}

inline double trace_error(const DensityMatrix& rho) {
  return std::abs(rho.mat.trace() - Complex(1.0, 0.0));
}

inline double hermiticity_error(const DensityMatrix& rho) {
  return (rho.mat - rho.mat.adjoint()).cwiseAbs().maxCoeff();
}

inline double min_eigenvalue(const DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<Matrix4> es(
      Matrix4(0.5 * (rho.mat + rho.mat.adjoint())), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

// All frequencies, rates and temperatures are in the same dimensionless
// energy unit (hbar = k_B = 1); defaults correspond to a unit of 0.01 eV.
struct SystemParams {
  double omega1 = 100.0;    // transition frequency of qubit 1
  double omega2 = 100.0;    // transition frequency of qubit 2
  double coupling = 0.1;    // coherent qubit-qubit coupling, must be > 0
  double gamma_dp1 = 2e-2;  // dephasing rate, reservoir of qubit 1
  double gamma_dp2 = 2e-2;  // dephasing rate, reservoir of qubit 2
  double gamma_rad = 2e-4;  // radiative decay rate (common reservoir)
  double temp_dp = 2e-2;    // dephasing reservoir temperature
  double temp_rad = 2e-2;   // radiative reservoir temperature

  double detuning() const { return omega1 - omega2; }
  double frequency_sum() const { return omega1 + omega2; }
  // Energy splitting of the single-excitation doublet.
  double splitting() const {
    return std::sqrt(detuning() * detuning() + 4.0 * coupling * coupling);
  }
  bool is_resonant(double tol = 1e-12) const {
    return std::abs(detuning()) <= tol;
  }

  // Throws std::invalid_argument on hard violations; returns secular-regime
  // warnings (the generator is derived assuming omega1,2 >> coupling and
  // |omega1 - omega2| << omega1,2).
  std::vector<std::string> validate() const {
    if (!(coupling > 0.0)) throw std::invalid_argument("coupling must be > 0");
    if (gamma_dp1 < 0.0 || gamma_dp2 < 0.0 || gamma_rad < 0.0)
      throw std::invalid_argument("rates must be >= 0");
    if (!(temp_dp > 0.0) || !(temp_rad > 0.0))
      throw std::invalid_argument("temperatures must be > 0");
    if (!(omega1 > 0.0) || !(omega2 > 0.0))
      throw std::invalid_argument("qubit frequencies must be > 0");
    std::vector<std::string> warnings;
    const double omega_min = std::min(omega1, omega2);
    if (omega_min < 10.0 * coupling)
      warnings.push_back("weak frequency/coupling separation: min(omega) < 10*coupling");
    if (std::abs(detuning()) > 0.1 * omega_min)
      warnings.push_back("large detuning: |omega1 - omega2| > 0.1*min(omega)");
    return warnings;
  }
};

// H = omega1 n1 + omega2 n2 + coupling (s1+ s2 + s2+ s1), symmetrized so the
// stored matrix is Hermitian to the last bit.
inline Matrix4 build_hamiltonian(const SystemParams& p) {
  p.validate();
  Matrix4 h = p.omega1 * number1() + p.omega2 * number2() +
              p.coupling * (sigma1().adjoint() * sigma2() +
                            sigma2().adjoint() * sigma1());
  return 0.5 * (h + Matrix4(h.adjoint()));
}

// Energy eigenbasis. Columns of u are the eigenvectors expressed in the
// product basis, ordered {|ee>, |+>, |->, |gg>}; at zero detuning |+> and |->
// are the symmetric and antisymmetric single-excitation states.
struct EigenBasis {
  Matrix4 u = Matrix4::Identity();
  Eigen::Vector4d frequencies = Eigen::Vector4d::Zero();
  double mixing = 0.0;  // detuning/(2*coupling + splitting); 0 at resonance
};

// Closed-form eigenbasis. The |-> mixing amplitude is written as
// -detuning/(2*coupling + splitting), which stays finite at zero detuning.
inline EigenBasis eigen_system(const SystemParams& p) {
  p.validate();
  const double delta = p.detuning();
  const double split = p.splitting();
  const double a = delta / (2.0 * p.coupling + split);
  const double norm = 1.0 / std::sqrt(1.0 + a * a);

  const Vector4 plus = norm * (ket_sym() + a * ket_asym());
  const Vector4 minus = norm * (ket_asym() - a * ket_sym());

  EigenBasis basis;
  basis.u.col(0) = ket_ee();
  basis.u.col(1) = plus;
  basis.u.col(2) = minus;
  basis.u.col(3) = ket_gg();
  const double theta = p.frequency_sum();
  basis.frequencies << theta, 0.5 * (theta + split), 0.5 * (theta - split), 0.0;
  basis.mixing = a;
  return basis;
}

inline double unitarity_error(const EigenBasis& basis) {
  return (basis.u.adjoint() * basis.u - Matrix4::Identity()).cwiseAbs().maxCoeff();
}

enum class BasisDirection { to_eigen, to_product };

// Unitary frame change for density matrices; flips the frame tag.
inline DensityMatrix change_basis(const DensityMatrix& rho,
                                  const EigenBasis& basis,
                                  BasisDirection direction) {
  if (unitarity_error(basis) > 1e-10)
    throw std::invalid_argument("change_basis: basis is not unitary");
  if (direction == BasisDirection::to_eigen) {
    if (rho.frame != BasisFrame::product)
      throw std::invalid_argument("change_basis: state is not in the product frame");
    return {basis.u.adjoint() * rho.mat * basis.u, BasisFrame::eigen};
  }
  if (rho.frame != BasisFrame::eigen)
    throw std::invalid_argument("change_basis: state is not in the eigen frame");
  return {basis.u * rho.mat * basis.u.adjoint(), BasisFrame::product};
}

// Static dipole-dipole coupling from geometry.
// Inputs: dipole moments in Debye, separation vector in nm. Output in rad/s
// and in multiples of the chosen energy unit (default 0.01 eV).
struct DipoleCoupling {
  double omega_si = 0.0;      // rad/s
  double omega_scaled = 0.0;  // in units of energy_unit_ev
};

inline DipoleCoupling dipole_coupling_constant(const Eigen::Vector3d& d1_debye,
                                               const Eigen::Vector3d& d2_debye,
                                               const Eigen::Vector3d& r_nm,
                                               double energy_unit_ev = 0.01) {
  if (!d1_debye.allFinite() || !d2_debye.allFinite() || !r_nm.allFinite())
    throw std::invalid_argument("dipole_coupling_constant: non-finite input");
  const double r = r_nm.norm();
  if (r <= 0.0)
    throw SingularGeometryError("dipole_coupling_constant: zero separation");
  if (!(energy_unit_ev > 0.0))
    throw std::invalid_argument("dipole_coupling_constant: energy unit must be > 0");

  const Eigen::Vector3d n = r_nm / r;
  // Gaussian units: Omega = (d1.d2 - 3 (d1.n)(d2.n)) / (hbar r^3).
  const double hbar_erg_s = 1.054571817e-27;
  const double debye_statc_cm = 1e-18;
  const double nm_cm = 1e-7;
  const double ev_erg = 1.602176634e-12;

  const double geometry_d2 = d1_debye.dot(d2_debye) - 3.0 * d1_debye.dot(n) * d2_debye.dot(n);
  const double r_cm = r * nm_cm;
  const double omega_si =
      geometry_d2 * debye_statc_cm * debye_statc_cm / (hbar_erg_s * r_cm * r_cm * r_cm);
  const double unit_rad_s = energy_unit_ev * ev_erg / hbar_erg_s;
  return {omega_si, omega_si / unit_rad_s};
}

}  // namespace qdimer
