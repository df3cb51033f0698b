// Copyright 2026 The qtomo Authors
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

#include "qtomo/quantum_core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

#include "qtomo/errors.hpp"

namespace qtomo {

Ket::Ket(CVector amplitudes) : amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() < 2) {
    throw DomainError("Ket: dimension must be at least 2");
  }
  const double norm2 = amplitudes_.squaredNorm();
  if (!(std::abs(norm2 - 1.0) <= kNormTolerance)) {
    throw DomainError("Ket: squared norm " + std::to_string(norm2) + " is not 1");
  }
}

Ket::Ket(std::initializer_list<Complex> amplitudes)
    : Ket(Eigen::Map<const CVector>(amplitudes.begin(), static_cast<Eigen::Index>(amplitudes.size()))) {}

Ket Ket::with_global_phase(double alpha) const {
  return Ket(CVector(amplitudes_ * std::polar(1.0, alpha)));
}

DensityMatrix::DensityMatrix(CMatrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols() || entries_.rows() < 2) {
    throw DomainError("DensityMatrix: must be square with dimension at least 2");
  }
  const double asym = (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
  if (!(asym <= kHermitianTolerance)) {
    throw DomainError("DensityMatrix: not Hermitian (max deviation " + std::to_string(asym) + ")");
  }
  const Complex tr = entries_.trace();
  if (!(std::abs(tr - 1.0) <= kTraceTolerance)) {
    throw DomainError("DensityMatrix: trace is not 1");
  }
  const HermitianEigen eig = hermitian_eigen(entries_);
  if (eig.values.minCoeff() < -kPsdSlack) {
    throw DomainError("DensityMatrix: negative eigenvalue " + std::to_string(eig.values.minCoeff()));
  }
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  return DensityMatrix(CMatrix(CMatrix::Identity(n, n) / static_cast<double>(dim)));
}

namespace {

HermitianEigen hermitian_eigen_2x2(const CMatrix& h) {
  const double a = h(0, 0).real();
  const double c = h(1, 1).real();
  const Complex b = h(1, 0);
  const double mean = 0.5 * (a + c);
  const double half_gap = std::hypot(0.5 * (a - c), std::abs(b));

  HermitianEigen out{Eigen::VectorXd(2), CMatrix(2, 2)};
  const double upper_value = mean + half_gap;
  // Smaller root from the determinant when the larger one dominates.
  const double lower_value = upper_value > 0.0 && mean > 0.0 ? (a * c - std::norm(b)) / upper_value
                                                             : mean - half_gap;
  out.values << lower_value, upper_value;

  if (std::abs(b) == 0.0) {
    // Already diagonal; order columns to match ascending eigenvalues.
    out.vectors.setZero();
    if (a <= c) {
      out.vectors(0, 0) = 1.0;
      out.vectors(1, 1) = 1.0;
    } else {
      out.vectors(1, 0) = 1.0;
      out.vectors(0, 1) = 1.0;
    }
    return out;
  }

  const double upper = out.values(1);
  Eigen::Vector2cd v;
  if (a >= c) {
    v << Complex(upper - c), b;
  } else {
    v << std::conj(b), Complex(upper - a);
  }
  v.normalize();
  // Orthogonal complement of (x, y) is (-conj(y), conj(x)).
  out.vectors(0, 1) = v(0);
  out.vectors(1, 1) = v(1);
  out.vectors(0, 0) = -std::conj(v(1));
  out.vectors(1, 0) = std::conj(v(0));
  return out;
}

}  // namespace

HermitianEigen hermitian_eigen(const CMatrix& h) {
  if (h.rows() != h.cols()) {
    throw DomainError("hermitian_eigen: matrix is not square");
  }
  if (h.rows() == 2) {
    return hermitian_eigen_2x2(h);
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(h);
  return {solver.eigenvalues(), solver.eigenvectors()};
}

CMatrix psd_sqrt(const CMatrix& h) {
  const HermitianEigen eig = hermitian_eigen(h);
  Eigen::VectorXd roots(eig.values.size());
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
    const double lambda = eig.values(i);
    if (lambda < -kPsdSlack) {
      throw DomainError("psd_sqrt: matrix has eigenvalue " + std::to_string(lambda));
    }
    roots(i) = std::sqrt(std::max(lambda, 0.0));
  }
  return eig.vectors * roots.cast<Complex>().asDiagonal() * eig.vectors.adjoint();
}

Ket ket_from_angles(double theta, double phi) {
  constexpr double pi = std::numbers::pi;
  if (!(theta >= 0.0 && theta <= pi)) {
    throw DomainError("ket_from_angles: theta must lie in [0, pi]");
  }
  if (!(phi >= 0.0 && phi < 2.0 * pi)) {
    throw DomainError("ket_from_angles: phi must lie in [0, 2 pi)");
  }
  return Ket{Complex(std::cos(0.5 * theta)), std::polar(std::sin(0.5 * theta), phi)};
}

DensityMatrix density_from_cholesky(const CholeskyParams& params) {
  const auto& [t1, t2, t3, t4] = params.t;
  const double trace = params.norm_squared();
  if (!(trace >= 1e-300)) {
    throw DegenerateParametersError("density_from_cholesky: Tr(T^dag T) is zero");
  }
  // T^dag T = [[t1^2 + |c|^2, conj(c) t2], [c t2, t2^2]] with c = t3 + i t4.
  const Complex c(t3, t4);
  CMatrix rho(2, 2);
  rho(0, 0) = (t1 * t1 + std::norm(c)) / trace;
  rho(0, 1) = std::conj(c) * t2 / trace;
  rho(1, 0) = c * t2 / trace;
  rho(1, 1) = t2 * t2 / trace;
  return DensityMatrix(std::move(rho), DensityMatrix::Trusted{});
}

DensityMatrix projector(const Ket& psi) {
  return DensityMatrix(CMatrix(psi.amplitudes() * psi.amplitudes().adjoint()));
}

DensityMatrix depolarize(const Ket& psi, double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw DomainError("depolarize: epsilon must lie in [0, 1]");
  }
  const auto d = static_cast<Eigen::Index>(psi.dim());
  CMatrix rho = (1.0 - epsilon) * (psi.amplitudes() * psi.amplitudes().adjoint());
  rho.diagonal().array() += epsilon / static_cast<double>(d);
  return DensityMatrix(std::move(rho));
}

double fidelity(const Ket& psi, const DensityMatrix& rho) {
  if (psi.dim() != rho.dim()) {
    throw DomainError("fidelity: dimension mismatch");
  }
  const CMatrix root = psd_sqrt(rho.entries());
  const CVector v = root * psi.amplitudes();
  // sqrt(rho) |psi><psi| sqrt(rho) = v v^dag; hermitize away rounding before the root.
  CMatrix inner = v * v.adjoint();
  inner = 0.5 * (inner + inner.adjoint()).eval();
  const HermitianEigen eig = hermitian_eigen(inner);
  const double cutoff = kRankCutoff * eig.values.maxCoeff();
  double trace_root = 0.0;
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
    if (eig.values(i) > cutoff) trace_root += std::sqrt(eig.values(i));
  }
  return std::clamp(trace_root * trace_root, 0.0, 1.0);
}

double fidelity_pure(const Ket& psi, const DensityMatrix& rho) {
  if (psi.dim() != rho.dim()) {
    throw DomainError("fidelity_pure: dimension mismatch");
  }
  const Complex value = psi.amplitudes().dot(rho.entries() * psi.amplitudes());
  return std::clamp(value.real(), 0.0, 1.0);
}

double purity(const DensityMatrix& rho) {
  // Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho.
  return rho.entries().squaredNorm();
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim()) {
    throw DomainError("trace_distance: dimension mismatch");
  }
  CMatrix diff = a.entries() - b.entries();
  diff = 0.5 * (diff + diff.adjoint()).eval();
  return 0.5 * hermitian_eigen(diff).values.cwiseAbs().sum();
}

}  // namespace qtomo
