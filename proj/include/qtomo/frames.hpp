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

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "qtomo/quantum_core.hpp"

namespace qtomo {

/// Ordered list of unit kets spanning C^d, used as measurement directions.
class Frame {
 public:
  /// Throws DomainError unless M >= d, every element has dimension d and unit
  /// norm, and the elements span C^d.
  Frame(std::string id, std::vector<Ket> elements);

  const std::string& id() const noexcept { return id_; }
  const std::vector<Ket>& elements() const noexcept { return elements_; }
  const Ket& operator[](std::size_t k) const { return elements_.at(k); }
  std::size_t size() const noexcept { return elements_.size(); }
  std::size_t dim() const noexcept { return elements_.front().dim(); }

 private:
  std::string id_;
  std::vector<Ket> elements_;
};

enum class Verdict { kInjective, kNotInjective, kUndetermined };

std::string to_string(Verdict v);

struct InjectivityReport {
  std::string frame_id;
  std::size_t kernel_dimension = 0;
  Verdict verdict = Verdict::kUndetermined;
  // d^2 values, descending; zero-padded when the frame has fewer than d^2 elements.
  std::vector<double> singular_values;
  // Hermitian matrices spanning the kernel of Q -> (<xi_k|Q|xi_k>)_k.
  std::vector<CMatrix> kernel_basis;
};

Frame sic_frame();
Frame mub_frame();

/// Built-in frame by id ("sic" or "mub"); DomainError otherwise.
Frame builtin_frame(const std::string& id);
std::vector<std::string> builtin_frame_ids();

/// (|<xi_k|x>|^2)_k.
std::vector<double> intensity_map(const Frame& frame, const Ket& x);

/// The fixed real basis of Herm(d): E_ii for each i, then E_ij + E_ji for
/// i < j (row-major), then -i E_ij + i E_ji for i < j (row-major).
std::vector<CMatrix> hermitian_basis(std::size_t dim);

/// M x d^2 real matrix of the map Q -> (<xi_k|Q|xi_k>)_k in hermitian_basis().
Eigen::MatrixXd measurement_map_matrix(const Frame& frame);

/// Kernel of the measurement map on Hermitian matrices. For d = 2 every
/// Hermitian matrix has rank <= 2, so an empty kernel is equivalent to
/// injectivity. For d > 2 an empty kernel is only sufficient.
InjectivityReport check_injectivity(const Frame& frame);

inline constexpr double kKernelRelativeThreshold = 1e-10;

Frame load_frame(const std::filesystem::path& path);
void save_frame(const Frame& frame, const std::filesystem::path& path);

}  // namespace qtomo
