// liouvillian.hpp - vectorized generator of the master equation.
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
#include <vector>

#include "qdimer/channels.hpp"
#include "qdimer/errors.hpp"
#include "qdimer/system.hpp"

namespace qdimer {

// Column-stacking convention throughout: vec(M)(i + 4j) = M(i, j). This is
// Eigen's native column-major layout, so vec/unvec are pure reshapes.
inline Vector16 vec_state(const Matrix4& m) {
  return Eigen::Map<const Vector16>(m.data());
}

inline Matrix4 unvec_state(const Vector16& v) {
  return Eigen::Map<const Matrix4>(v.data());
}

// Kronecker product compatible with column-stacking:
// kron4(A, B) * vec(X) == vec(B * X * A^T).
inline Matrix16 kron4(const Matrix4& a, const Matrix4& b) {
  Matrix16 m;
  for (int p = 0; p < 4; ++p)
    for (int r = 0; r < 4; ++r)
      m.block<4, 4>(4 * p, 4 * r) = a(p, r) * b;
  return m;
}

struct Liouvillian {
  Matrix16 mat = Matrix16::Zero();
};

// d vec(rho)/dt = mat * vec(rho) with
//   mat = -i (I (x) H - H^T (x) I)
//         + sum_k rate_k [ conj(L_k) (x) L_k
//                          - (I (x) L_k^+ L_k + (L_k^+ L_k)^T (x) I) / 2 ].
// Channels with exactly zero rate are skipped.
inline Liouvillian assemble_liouvillian(const Matrix4& h,
                                        const std::vector<JumpChannel>& channels) {
  const Matrix4 id = Matrix4::Identity();
  Liouvillian l;
  l.mat = Complex(0.0, -1.0) * (kron4(id, h) - kron4(h.transpose(), id));
  for (const JumpChannel& c : channels) {
    if (c.rate == 0.0) continue;
    const Matrix4 ldl = c.op.adjoint() * c.op;
    l.mat += c.rate * (kron4(c.op.conjugate(), c.op) -
                       0.5 * (kron4(id, ldl) + kron4(ldl.transpose(), id)));
  }
  return l;
}

// Direct (unvectorized) right-hand side; independent of the Kronecker
// assembly above, used as its cross-check.
inline Matrix4 master_rhs(const Matrix4& h, const std::vector<JumpChannel>& channels,
                          const Matrix4& rho) {
  Matrix4 out = Complex(0.0, -1.0) * (h * rho - rho * h);
  for (const JumpChannel& c : channels) {
    if (c.rate == 0.0) continue;
    const Matrix4 ldl = c.op.adjoint() * c.op;
    out += c.rate * (c.op * rho * c.op.adjoint() - 0.5 * (ldl * rho + rho * ldl));
  }
  return out;
}

// Trace preservation means vec(I)^+ is a left null vector of the generator.
inline double trace_preservation_residual(const Liouvillian& l) {
  const Vector16 left = vec_state(Matrix4::Identity());
  return (left.adjoint() * l.mat).cwiseAbs().maxCoeff();
}

// Eigenvalues sorted by descending real part (slowest modes first).
inline Vector16 liouvillian_spectrum(const Liouvillian& l) {
  Eigen::ComplexEigenSolver<Matrix16> es(l.mat, false);
  if (es.info() != Eigen::Success)
    throw NumericalError("liouvillian_spectrum: eigensolver failed");
  std::vector<Complex> ev(es.eigenvalues().data(), es.eigenvalues().data() + 16);
  std::sort(ev.begin(), ev.end(), [](const Complex& x, const Complex& y) {
    if (x.real() != y.real()) return x.real() > y.real();
    return x.imag() > y.imag();
  });
  Vector16 out;
  for (int i = 0; i < 16; ++i) out(i) = ev[i];
  return out;
}

// Normalized kernel element of the generator (the eigenvector of the
// eigenvalue closest to zero). Throws if that vector is traceless, which
// signals a degenerate kernel that needs mode-by-mode treatment.
inline DensityMatrix stationary_state(const Liouvillian& l) {
  Eigen::ComplexEigenSolver<Matrix16> es(l.mat, true);
  if (es.info() != Eigen::Success)
    throw NumericalError("stationary_state: eigensolver failed");
  int best = 0;
  for (int i = 1; i < 16; ++i)
    if (std::abs(es.eigenvalues()(i)) < std::abs(es.eigenvalues()(best))) best = i;
  Matrix4 rho = unvec_state(es.eigenvectors().col(best));
  rho = 0.5 * (rho + Matrix4(rho.adjoint()));
  const Complex tr = rho.trace();
  if (std::abs(tr) < 1e-12)
    throw NumericalError("stationary_state: kernel vector is traceless");
  rho /= tr;
  return {rho, BasisFrame::product};
}

}  // namespace qdimer
