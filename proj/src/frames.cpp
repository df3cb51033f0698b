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

#include "qtomo/frames.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "qtomo/errors.hpp"

namespace qtomo {

Frame::Frame(std::string id, std::vector<Ket> elements) : id_(std::move(id)), elements_(std::move(elements)) {
  if (elements_.empty()) {
    throw DomainError("Frame '" + id_ + "': no elements");
  }
  const std::size_t d = elements_.front().dim();
  if (elements_.size() < d) {
    throw DomainError("Frame '" + id_ + "': fewer elements than the dimension");
  }
  CMatrix columns(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(elements_.size()));
  for (std::size_t k = 0; k < elements_.size(); ++k) {
    if (elements_[k].dim() != d) {
      throw DomainError("Frame '" + id_ + "': element " + std::to_string(k + 1) + " has the wrong dimension");
    }
    columns.col(static_cast<Eigen::Index>(k)) = elements_[k].amplitudes();
  }
  Eigen::FullPivLU<CMatrix> lu(columns);
  lu.setThreshold(1e-10);
  if (static_cast<std::size_t>(lu.rank()) != d) {
    throw DomainError("Frame '" + id_ + "': elements do not span C^" + std::to_string(d));
  }
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::kInjective:
      return "injective";
    case Verdict::kNotInjective:
      return "not-injective";
    case Verdict::kUndetermined:
      return "undetermined";
  }
  return "undetermined";
}

Frame sic_frame() {
  const double a = 1.0 / std::sqrt(3.0);
  const double b = std::sqrt(2.0 / 3.0);
  constexpr double pi = std::numbers::pi;
  return Frame("sic", {
                          Ket{1.0, 0.0},
                          Ket{a, b},
                          Ket{a, std::polar(b, 2.0 * pi / 3.0)},
                          Ket{a, std::polar(b, 4.0 * pi / 3.0)},
                      });
}

Frame mub_frame() {
  const double h = 1.0 / std::sqrt(2.0);
  const Complex i(0.0, 1.0);
  return Frame("mub", {
                          Ket{1.0, 0.0},
                          Ket{0.0, 1.0},
                          Ket{h, h},
                          Ket{h, -h},
                          Ket{h, i * h},
                          Ket{h, -i * h},
                      });
}

Frame builtin_frame(const std::string& id) {
  if (id == "sic") return sic_frame();
  if (id == "mub") return mub_frame();
  throw DomainError("unknown frame id '" + id + "' (expected sic or mub)");
}

std::vector<std::string> builtin_frame_ids() { return {"sic", "mub"}; }

std::vector<double> intensity_map(const Frame& frame, const Ket& x) {
  if (frame.dim() != x.dim()) {
    throw DomainError("intensity_map: dimension mismatch");
  }
  std::vector<double> out;
  out.reserve(frame.size());
  for (const Ket& xi : frame.elements()) {
    out.push_back(std::norm(xi.amplitudes().dot(x.amplitudes())));
  }
  return out;
}

std::vector<CMatrix> hermitian_basis(std::size_t dim) {
  const auto d = static_cast<Eigen::Index>(dim);
  std::vector<CMatrix> basis;
  basis.reserve(dim * dim);
  for (Eigen::Index i = 0; i < d; ++i) {
    CMatrix e = CMatrix::Zero(d, d);
    e(i, i) = 1.0;
    basis.push_back(std::move(e));
  }
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = i + 1; j < d; ++j) {
      CMatrix e = CMatrix::Zero(d, d);
      e(i, j) = 1.0;
      e(j, i) = 1.0;
      basis.push_back(std::move(e));
    }
  }
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = i + 1; j < d; ++j) {
      CMatrix e = CMatrix::Zero(d, d);
      e(i, j) = Complex(0.0, -1.0);
      e(j, i) = Complex(0.0, 1.0);
      basis.push_back(std::move(e));
    }
  }
  return basis;
}

Eigen::MatrixXd measurement_map_matrix(const Frame& frame) {
  const std::vector<CMatrix> basis = hermitian_basis(frame.dim());
  Eigen::MatrixXd a(static_cast<Eigen::Index>(frame.size()), static_cast<Eigen::Index>(basis.size()));
  for (std::size_t k = 0; k < frame.size(); ++k) {
    const CVector& xi = frame[k].amplitudes();
    for (std::size_t b = 0; b < basis.size(); ++b) {
      a(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(b)) = xi.dot(basis[b] * xi).real();
    }
  }
  return a;
}

InjectivityReport check_injectivity(const Frame& frame) {
  const Eigen::MatrixXd a = measurement_map_matrix(frame);
  const Eigen::Index n = a.cols();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);

  InjectivityReport report;
  report.frame_id = frame.id();
  report.singular_values.assign(static_cast<std::size_t>(n), 0.0);
  const Eigen::VectorXd& sv = svd.singularValues();
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    report.singular_values[static_cast<std::size_t>(i)] = sv(i);
  }
  const double cutoff = kKernelRelativeThreshold * report.singular_values.front();

  const std::vector<CMatrix> basis = hermitian_basis(frame.dim());
  for (Eigen::Index i = 0; i < n; ++i) {
    if (report.singular_values[static_cast<std::size_t>(i)] >= cutoff) continue;
    ++report.kernel_dimension;
    CMatrix q = CMatrix::Zero(basis.front().rows(), basis.front().cols());
    for (Eigen::Index b = 0; b < n; ++b) {
      q += svd.matrixV()(b, i) * basis[static_cast<std::size_t>(b)];
    }
    report.kernel_basis.push_back(std::move(q));
  }

  if (report.kernel_dimension == 0) {
    report.verdict = Verdict::kInjective;
  } else if (frame.dim() == 2) {
    report.verdict = Verdict::kNotInjective;
  } else {
    report.verdict = Verdict::kUndetermined;
  }
  return report;
}

namespace {

double parse_double(std::string_view token, const std::string& path, std::size_t line) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size() || !std::isfinite(value)) {
    throw FileFormatError(path, line, "cannot parse number '" + std::string(token) + "'");
  }
  return value;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

Frame load_frame(const std::filesystem::path& path) {
  const std::string name = path.string();
  std::ifstream in(path);
  if (!in) {
    throw FileFormatError(name, 0, "cannot open frame file");
  }
  std::string id = path.stem().string();
  std::size_t dim = 0;
  std::vector<Ket> elements;
  std::string raw;
  for (std::size_t line_no = 1; std::getline(in, raw); ++line_no) {
    std::string text = raw;
    if (const auto hash = text.find('#'); hash != std::string::npos) {
      // "# frame <id>" carries the label written by save_frame.
      std::istringstream comment(text.substr(hash + 1));
      std::string key, value;
      if (comment >> key >> value && key == "frame") id = value;
      text.erase(hash);
    }
    text = trim(text);
    if (text.empty()) continue;

    std::istringstream tokens(text);
    if (dim == 0) {
      std::string keyword, count;
      tokens >> keyword >> count;
      std::string extra;
      if (keyword != "dim" || count.empty() || (tokens >> extra)) {
        throw FileFormatError(name, line_no, "expected 'dim <d>' header");
      }
      const double d = parse_double(count, name, line_no);
      if (d < 2 || d != std::floor(d) || d > 1024) {
        throw FileFormatError(name, line_no, "dimension must be an integer >= 2");
      }
      dim = static_cast<std::size_t>(d);
      continue;
    }

    std::vector<double> values;
    for (std::string token; tokens >> token;) {
      values.push_back(parse_double(token, name, line_no));
    }
    if (values.size() != 2 * dim) {
      throw FileFormatError(name, line_no,
                            "expected " + std::to_string(2 * dim) + " numbers, found " + std::to_string(values.size()));
    }
    CVector amplitudes(static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < dim; ++i) {
      amplitudes(static_cast<Eigen::Index>(i)) = Complex(values[2 * i], values[2 * i + 1]);
    }
    try {
      elements.emplace_back(std::move(amplitudes));
    } catch (const DomainError& e) {
      throw FileFormatError(name, line_no, e.what());
    }
  }
  if (dim == 0) {
    throw FileFormatError(name, 0, "missing 'dim <d>' header");
  }
  if (elements.empty()) {
    throw FileFormatError(name, 0, "no frame vectors");
  }
  try {
    return Frame(id, std::move(elements));
  } catch (const DomainError& e) {
    throw FileFormatError(name, 0, e.what());
  }
}

void save_frame(const Frame& frame, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write frame file " + path.string());
  }
  out << "# frame " << frame.id() << "\n";
  out << "dim " << frame.dim() << "\n";
  out << std::setprecision(17);
  for (const Ket& k : frame.elements()) {
    for (std::size_t i = 0; i < k.dim(); ++i) {
      out << (i ? " " : "") << k[i].real() << " " << k[i].imag();
    }
    out << "\n";
  }
  if (!out) {
    throw std::runtime_error("failed writing frame file " + path.string());
  }
}

}  // namespace qtomo
