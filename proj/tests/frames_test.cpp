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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "gtest/gtest.h"
#include "oracles.hpp"
#include "qtomo/errors.hpp"

using namespace qtomo;
namespace fs = std::filesystem;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

Frame three_element_frame() { return Frame("three", {Ket{1.0, 0.0}, Ket{0.0, 1.0}, Ket{kInvSqrt2, kInvSqrt2}}); }

double overlap2(const Ket& a, const Ket& b) { return std::norm(a.amplitudes().dot(b.amplitudes())); }

std::vector<std::pair<oracle::Cx, oracle::Cx>> as_pairs(const Frame& f) {
  std::vector<std::pair<oracle::Cx, oracle::Cx>> out;
  for (const Ket& k : f.elements()) out.emplace_back(k[0], k[1]);
  return out;
}

fs::path temp_file(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "qtomo_frames_test";
  fs::create_directories(dir);
  return dir / name;
}

void write_file(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST(SicFrame, Elements) {
  const Frame f = sic_frame();
  ASSERT_EQ(f.size(), 4u);
  EXPECT_EQ(f.id(), "sic");
  EXPECT_EQ(f[0][0], Complex(1, 0));
  EXPECT_EQ(f[0][1], Complex(0, 0));
  EXPECT_NEAR(f[1][0].real(), 1 / std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(f[1][1].real(), std::sqrt(2.0 / 3.0), 1e-15);
  EXPECT_NEAR(std::arg(f[2][1]), 2 * std::numbers::pi / 3, 1e-15);
}

TEST(SicFrame, PairwiseOverlapIsOneThird) {
  const Frame f = sic_frame();
  for (std::size_t i = 0; i < f.size(); ++i)
    for (std::size_t j = i + 1; j < f.size(); ++j) EXPECT_NEAR(overlap2(f[i], f[j]), 1.0 / 3.0, 1e-12);
}

TEST(MubFrame, Elements) {
  const Frame f = mub_frame();
  ASSERT_EQ(f.size(), 6u);
  EXPECT_EQ(f.id(), "mub");
  EXPECT_NEAR(std::abs(f[2][0] - kInvSqrt2), 0.0, 1e-16);
  EXPECT_NEAR(std::abs(f[2][1] - kInvSqrt2), 0.0, 1e-16);
  EXPECT_NEAR(std::abs(f[4][1] - Complex(0, kInvSqrt2)), 0.0, 1e-16);
  EXPECT_NEAR(std::abs(f[5][1] - Complex(0, -kInvSqrt2)), 0.0, 1e-16);
}

TEST(MubFrame, CrossBasisOverlapIsOneHalf) {
  const Frame f = mub_frame();
  int pairs = 0;
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = i + 1; j < 6; ++j) {
      if (i / 2 == j / 2) {
        EXPECT_NEAR(overlap2(f[i], f[j]), 0.0, 1e-12);
      } else {
        EXPECT_NEAR(overlap2(f[i], f[j]), 0.5, 1e-12);
        ++pairs;
      }
    }
  }
  EXPECT_EQ(pairs, 12);
}

TEST(Frame, Validation) {
  EXPECT_THROW(Frame("one", {Ket{1.0, 0.0}}), DomainError);
  EXPECT_THROW(Frame("parallel", {Ket{1.0, 0.0}, Ket{-1.0, 0.0}}), DomainError);
  EXPECT_THROW(Frame("mixed", {Ket{1.0, 0.0}, Ket(CVector::Unit(3, 1))}), DomainError);
  EXPECT_NO_THROW(three_element_frame());
}

TEST(IntensityMap, Examples) {
  const std::vector<double> mub = intensity_map(mub_frame(), Ket{1.0, 0.0});
  const std::vector<double> mub_expected{1, 0, 0.5, 0.5, 0.5, 0.5};
  for (std::size_t k = 0; k < 6; ++k) EXPECT_NEAR(mub[k], mub_expected[k], 1e-15);
  const std::vector<double> sic = intensity_map(sic_frame(), Ket{1.0, 0.0});
  const std::vector<double> sic_expected{1, 1.0 / 3, 1.0 / 3, 1.0 / 3};
  for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(sic[k], sic_expected[k], 1e-15);
}

TEST(IntensityMap, GlobalPhaseInvariant) {
  std::mt19937_64 gen(21);
  for (const Frame& f : {sic_frame(), mub_frame()}) {
    for (int n = 0; n < 20; ++n) {
      const Ket x(oracle::random_unit_vector(2, gen));
      const std::vector<double> a = intensity_map(f, x);
      const std::vector<double> b = intensity_map(f, x.with_global_phase(0.37 * n));
      for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(a[k], b[k], 1e-14);
    }
  }
  EXPECT_THROW(intensity_map(sic_frame(), Ket(CVector::Unit(3, 0))), DomainError);
}

TEST(HermitianBasis, OrderingAndHermiticity) {
  const std::vector<CMatrix> b = hermitian_basis(3);
  ASSERT_EQ(b.size(), 9u);
  EXPECT_EQ(b[0](0, 0), Complex(1, 0));
  EXPECT_EQ(b[2](2, 2), Complex(1, 0));
  EXPECT_EQ(b[3](0, 1), Complex(1, 0));  // (0,1) symmetric
  EXPECT_EQ(b[5](1, 2), Complex(1, 0));  // (1,2) symmetric
  EXPECT_EQ(b[6](0, 1), Complex(0, -1));
  EXPECT_EQ(b[6](1, 0), Complex(0, 1));
  for (const CMatrix& m : b) EXPECT_EQ((m - m.adjoint()).norm(), 0.0);
}

TEST(CheckInjectivity, BuiltInFramesAreInjective) {
  for (const Frame& f : {sic_frame(), mub_frame()}) {
    const InjectivityReport r = check_injectivity(f);
    EXPECT_EQ(r.frame_id, f.id());
    EXPECT_EQ(r.verdict, Verdict::kInjective);
    EXPECT_EQ(r.kernel_dimension, 0u);
    ASSERT_EQ(r.singular_values.size(), 4u);
    EXPECT_GT(r.singular_values.back(), 0.5);
    EXPECT_TRUE(std::is_sorted(r.singular_values.rbegin(), r.singular_values.rend()));
  }
}

TEST(CheckInjectivity, ThreeElementFrameHasSigmaYKernel) {
  const InjectivityReport r = check_injectivity(three_element_frame());
  EXPECT_EQ(r.verdict, Verdict::kNotInjective);
  EXPECT_EQ(r.kernel_dimension, 1u);
  ASSERT_EQ(r.kernel_basis.size(), 1u);
  // The kernel is spanned by [[0, -i], [i, 0]]; compare up to a real scale.
  const CMatrix& q = r.kernel_basis[0];
  const double scale = q(1, 0).imag();
  EXPECT_NEAR(std::abs(scale), 1.0, 1e-12);
  CMatrix sigma_y(2, 2);
  sigma_y << 0, Complex(0, -1), Complex(0, 1), 0;
  EXPECT_LE((q - scale * sigma_y).cwiseAbs().maxCoeff(), 1e-12);
  const Frame frame = three_element_frame();
  for (const Ket& xi : frame.elements()) {
    EXPECT_NEAR(std::abs(xi.amplitudes().dot(sigma_y * xi.amplitudes())), 0.0, 1e-15);
  }
}

TEST(CheckInjectivity, AgreesWithGaussianElimination) {
  for (const Frame& f : {sic_frame(), mub_frame(), three_element_frame()}) {
    const int rank = oracle::gaussian_rank(oracle::qubit_map_rows(as_pairs(f)));
    EXPECT_EQ(check_injectivity(f).kernel_dimension, static_cast<std::size_t>(4 - rank)) << f.id();
  }
}

TEST(CheckInjectivity, MubMinusAnyElementStaysInjective) {
  const Frame mub = mub_frame();
  for (std::size_t drop = 0; drop < mub.size(); ++drop) {
    std::vector<Ket> kept;
    for (std::size_t k = 0; k < mub.size(); ++k)
      if (k != drop) kept.push_back(mub[k]);
    const Frame f("mub-" + std::to_string(drop), kept);
    EXPECT_EQ(oracle::gaussian_rank(oracle::qubit_map_rows(as_pairs(f))), 4);
    EXPECT_EQ(check_injectivity(f).verdict, Verdict::kInjective) << "dropped " << drop;
  }
}

TEST(CheckInjectivity, InvariantUnderPermutationAndPhase) {
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> angle(0, 2 * std::numbers::pi);
  for (const Frame& base : {sic_frame(), mub_frame(), three_element_frame()}) {
    const InjectivityReport reference = check_injectivity(base);
    std::vector<Ket> elements = base.elements();
    for (int trial = 0; trial < 20; ++trial) {
      std::shuffle(elements.begin(), elements.end(), gen);
      std::vector<Ket> phased;
      for (const Ket& k : elements) phased.push_back(k.with_global_phase(angle(gen)));
      const InjectivityReport r = check_injectivity(Frame(base.id(), phased));
      EXPECT_EQ(r.verdict, reference.verdict);
      EXPECT_EQ(r.kernel_dimension, reference.kernel_dimension);
      for (std::size_t i = 0; i < r.singular_values.size(); ++i)
        EXPECT_NEAR(r.singular_values[i], reference.singular_values[i], 1e-12);
    }
  }
}

TEST(CheckInjectivity, HigherDimension) {
  // Computational basis of C^3: 3 equations on a 9-dimensional space.
  const Frame basis("basis3", {Ket(CVector::Unit(3, 0)), Ket(CVector::Unit(3, 1)), Ket(CVector::Unit(3, 2))});
  const InjectivityReport r = check_injectivity(basis);
  EXPECT_EQ(r.kernel_dimension, 6u);
  EXPECT_EQ(r.verdict, Verdict::kUndetermined);

  // Enough random vectors give a trivial kernel, which suffices.
  std::mt19937_64 gen(8);
  std::vector<Ket> many;
  for (int i = 0; i < 16; ++i) many.emplace_back(oracle::random_unit_vector(4, gen));
  const InjectivityReport r4 = check_injectivity(Frame("random4", many));
  EXPECT_EQ(r4.kernel_dimension, 0u);
  EXPECT_EQ(r4.verdict, Verdict::kInjective);
}

TEST(FrameFile, RoundTripIsExact) {
  for (const Frame& f : {sic_frame(), mub_frame()}) {
    const fs::path p = temp_file(f.id() + ".frame");
    save_frame(f, p);
    const Frame g = load_frame(p);
    EXPECT_EQ(g.id(), f.id());
    ASSERT_EQ(g.size(), f.size());
    for (std::size_t k = 0; k < f.size(); ++k) {
      for (std::size_t i = 0; i < 2; ++i) {
        EXPECT_EQ(g[k][i], f[k][i]);
      }
    }
  }
}

TEST(FrameFile, ParsesCommentsAndDocumentedExample) {
  const fs::path p = temp_file("example.frame");
  write_file(p,
             "# polarization states\n"
             "dim 2\n"
             "1 0 0 0   # H\n"
             "\n"
             "0 0 1 0\n"
             "0.7071067811865476 0.0 0.0 0.7071067811865476\n");
  const Frame f = load_frame(p);
  EXPECT_EQ(f.id(), "example");
  ASSERT_EQ(f.size(), 3u);
  EXPECT_NEAR(f[2][1].imag(), 0.7071067811865476, 0.0);
}

TEST(FrameFile, ValidationErrorsCarryLineNumbers) {
  const fs::path one = temp_file("one.frame");
  write_file(one, "dim 2\n1 0 0 0\n");
  EXPECT_THROW(load_frame(one), FileFormatError);

  const fs::path unnormalized = temp_file("unnormalized.frame");
  write_file(unnormalized, "dim 2\n1 0 0 0\n1 0 1 0\n");
  try {
    load_frame(unnormalized);
    FAIL() << "expected FileFormatError";
  } catch (const FileFormatError& e) {
    EXPECT_EQ(e.line(), 3u);
  }

  const fs::path short_line = temp_file("short.frame");
  write_file(short_line, "# c\ndim 2\n1 0 0\n");
  try {
    load_frame(short_line);
    FAIL() << "expected FileFormatError";
  } catch (const FileFormatError& e) {
    EXPECT_EQ(e.line(), 3u);
  }

  const fs::path bad_number = temp_file("bad.frame");
  write_file(bad_number, "dim 2\n1 0 0 x\n");
  EXPECT_THROW(load_frame(bad_number), FileFormatError);

  const fs::path no_header = temp_file("noheader.frame");
  write_file(no_header, "1 0 0 0\n0 0 1 0\n");
  try {
    load_frame(no_header);
    FAIL() << "expected FileFormatError";
  } catch (const FileFormatError& e) {
    EXPECT_EQ(e.line(), 1u);
  }

  EXPECT_THROW(load_frame(temp_file("does-not-exist.frame")), FileFormatError);
}
