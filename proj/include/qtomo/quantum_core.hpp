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

#pragma once

#include <array>
#include <complex>
#include <cstddef>

#include <Eigen/Core>

namespace qtomo {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

inline constexpr double kNormTolerance = 1e-12;
inline constexpr double kHermitianTolerance = 1e-12;
inline constexpr double kTraceTolerance = 1e-12;
// Eigenvalues down to this value count as zero when testing positivity.
inline constexpr double kPsdSlack = 1e-10;
/// Eigenvalues below this fraction of the largest are treated as zero in fidelity().
inline constexpr double kRankCutoff = 1e-13;

/// Unit-norm state vector in C^d, d >= 2.
class Ket {
 public:
  explicit Ket(CVector amplitudes);
  Ket(std::initializer_list<Complex> amplitudes);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(amplitudes_.size()); }
  const CVector& amplitudes() const noexcept { return amplitudes_; }
  Complex operator[](std::size_t i) const { return amplitudes_(static_cast<Eigen::Index>(i)); }

  /// Returns e^{i alpha} |psi>.
  Ket with_global_phase(double alpha) const;

 private:
  CVector amplitudes_;
};

/// (t1, t2, t3, t4) for T = [[t1, 0], [t3 + i t4, t2]], rho = T^dag T / Tr(T^dag T).
struct CholeskyParams {
  std::array<double, 4> t{};

  double norm_squared() const noexcept { return t[0] * t[0] + t[1] * t[1] + t[2] * t[2] + t[3] * t[3]; }
  CholeskyParams operator-() const noexcept { return {{-t[0], -t[1], -t[2], -t[3]}}; }
};

/// Hermitian, positive semidefinite, unit-trace matrix.
class DensityMatrix {
 public:
  /// Validates all invariants; throws DomainError on violation.
  explicit DensityMatrix(CMatrix entries);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(entries_.rows()); }
  const CMatrix& entries() const noexcept { return entries_; }
  Complex operator()(std::size_t r, std::size_t c) const {
    return entries_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  }

  static DensityMatrix maximally_mixed(std::size_t dim);

 private:
  struct Trusted {};
  DensityMatrix(CMatrix entries, Trusted) : entries_(std::move(entries)) {}
  friend DensityMatrix density_from_cholesky(const CholeskyParams&);

  CMatrix entries_;
};

/// Eigenvalues in ascending order with matching orthonormal eigenvectors as columns.
struct HermitianEigen {
  Eigen::VectorXd values;
  CMatrix vectors;
};

/// Closed form for d = 2, Eigen's self-adjoint solver otherwise.
HermitianEigen hermitian_eigen(const CMatrix& h);

/// Square root of a PSD Hermitian matrix. Eigenvalues in [-kPsdSlack, 0) are
/// clamped to zero; anything more negative is a DomainError.
CMatrix psd_sqrt(const CMatrix& h);

/// (cos(theta/2), e^{i phi} sin(theta/2)) for theta in [0, pi], phi in [0, 2 pi).
Ket ket_from_angles(double theta, double phi);

DensityMatrix density_from_cholesky(const CholeskyParams& params);

/// |psi><psi|.
DensityMatrix projector(const Ket& psi);

/// (1 - epsilon) |psi><psi| + (epsilon / d) I.
DensityMatrix depolarize(const Ket& psi, double epsilon);

/// (Tr sqrt(sqrt(rho) |psi><psi| sqrt(rho)))^2, evaluated through matrix square roots.
double fidelity(const Ket& psi, const DensityMatrix& rho);

/// <psi|rho|psi>; equal to fidelity() for a pure target.
double fidelity_pure(const Ket& psi, const DensityMatrix& rho);

/// Tr(rho^2).
double purity(const DensityMatrix& rho);

/// (1/2) sum |eigenvalues of (a - b)|.
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

}  // namespace qtomo
