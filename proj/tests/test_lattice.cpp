#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "cavitywalk/lattice.hpp"

namespace cw = cavitywalk;
using cw::Complex;
using cw::ComplexMatrix;

namespace {

constexpr double kPi = std::numbers::pi;

double max_abs(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

// Test-only oracle: exp(-i h t) for the tight-binding matrix h, via Eigen's
// generic matrix exponential.
ComplexMatrix expm_propagator(const cw::ArrayModel& model, double t) {
  const int n = model.n_cavities;
  ComplexMatrix h = ComplexMatrix::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    h(j, j) = model.omega;
    if (j + 1 < n) h(j, j + 1) = h(j + 1, j) = model.hopping;
  }
  ComplexMatrix arg = Complex(0.0, -t) * h;
  return arg.exp();
}

}  // namespace

TEST(NormalModes, SingleCavity) {
  const auto modes = cw::normal_modes({1, 1.0, 0.1});
  ASSERT_EQ(modes.size(), 1);
  EXPECT_NEAR(modes.frequency(1), 1.0, 1e-15);
  EXPECT_NEAR(modes.mode(1, 1), 1.0, 1e-15);
}

TEST(NormalModes, TwoCavities) {
  const auto modes = cw::normal_modes({2, 1.0, 0.1});
  EXPECT_NEAR(modes.frequency(1), 1.1, 1e-15);
  EXPECT_NEAR(modes.frequency(2), 0.9, 1e-15);
  const double h = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(modes.mode(1, 1), h, 1e-15);
  EXPECT_NEAR(modes.mode(1, 2), h, 1e-15);
  EXPECT_NEAR(modes.mode(2, 1), h, 1e-15);
  EXPECT_NEAR(modes.mode(2, 2), -h, 1e-15);
}

TEST(NormalModes, OrthogonalAndSymmetric) {
  for (int n = 1; n <= 40; ++n) {
    const auto modes = cw::normal_modes({n, 1.0, 0.1});
    const cw::RealMatrix s = modes.mode_matrix;
    EXPECT_LT((s * s.transpose() - cw::RealMatrix::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-12)
        << "N=" << n;
    EXPECT_EQ(s, s.transpose()) << "N=" << n;
  }
}

TEST(NormalModes, RejectsInvalidModels) {
  EXPECT_THROW(cw::normal_modes({0, 1.0, 0.1}), std::invalid_argument);
  EXPECT_THROW(cw::normal_modes({3, std::nan(""), 0.1}), std::invalid_argument);
  EXPECT_THROW(cw::normal_modes({3, 1.0, INFINITY}), std::invalid_argument);
  EXPECT_THROW(cw::ArrayModel::make(-2, 1.0, 0.1), std::invalid_argument);
}

TEST(Propagator, IdentityAtTimeZero) {
  for (int n = 1; n <= 16; ++n) {
    const auto g = cw::propagator({n, 1.0, 0.1}, 0.0);
    EXPECT_LT(max_abs(g.matrix - ComplexMatrix::Identity(n, n)), 1e-14) << "N=" << n;
  }
}

TEST(Propagator, SingleCavityIsPhase) {
  for (double t : {0.3, 17.0, 2500.0}) {
    const auto g = cw::propagator({1, 1.3, 0.1}, t);
    EXPECT_NEAR(std::abs(g(1, 1) - std::polar(1.0, -1.3 * t)), 0.0, 1e-13);
  }
}

TEST(Propagator, TwoCavityClosedForm) {
  const cw::ArrayModel model{2, 1.0, 0.1};
  for (double t : {0.0, 1.0, 7.5, 123.4}) {
    const auto g = cw::propagator(model, t);
    const Complex carrier = std::polar(1.0, -t);
    EXPECT_NEAR(std::abs(g(1, 1) - carrier * std::cos(0.1 * t)), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(g(1, 2) - Complex(0, -1) * carrier * std::sin(0.1 * t)), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(g(2, 2) - g(1, 1)), 0.0, 1e-15);
  }
}

TEST(Propagator, MatchesMatrixExponential) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> size(1, 12);
  std::uniform_real_distribution<double> time(0.0, 200.0);
  std::uniform_real_distribution<double> coupling(-0.5, 0.5);
  for (int i = 0; i < 40; ++i) {
    const cw::ArrayModel model{size(rng), 1.0, coupling(rng)};
    const double t = time(rng);
    EXPECT_LT(max_abs(cw::propagator(model, t).matrix - expm_propagator(model, t)), 1e-10)
        << "N=" << model.n_cavities << " J=" << model.hopping << " t=" << t;
  }
}

TEST(Propagator, RejectsNonFiniteTime) {
  EXPECT_THROW(cw::propagator({3, 1.0, 0.1}, std::nan("")), std::invalid_argument);
  EXPECT_THROW(cw::propagator({3, 1.0, 0.1}, INFINITY), std::invalid_argument);
}

TEST(PropagatorProperties, RandomSamples) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> size(1, 16);
  const double j = 0.1;
  std::uniform_real_distribution<double> time(0.0, 100.0 / j);
  for (int i = 0; i < 100; ++i) {
    const cw::ArrayModel model{size(rng), 1.0, j};
    const int n = model.n_cavities;
    const double t1 = time(rng);
    const double t2 = time(rng);
    const auto modes = cw::normal_modes(model);
    const auto g1 = cw::propagator(model, modes, t1);
    const auto g2 = cw::propagator(model, modes, t2);
    const auto g12 = cw::propagator(model, modes, t1 + t2);

    EXPECT_LT(max_abs(g1.matrix * g1.matrix.adjoint() - ComplexMatrix::Identity(n, n)), 1e-12);
    EXPECT_LT(max_abs(g1.matrix * g2.matrix - g12.matrix), 1e-11);
    EXPECT_LT(max_abs(g1.matrix - g1.matrix.transpose()), 1e-14);
    for (int a = 1; a <= n; ++a) {
      double row = 0.0;
      for (int b = 1; b <= n; ++b) {
        EXPECT_LT(std::abs(g1(a, b) - g1(n + 1 - a, n + 1 - b)), 1e-12);
        row += std::norm(g1(a, b));
      }
      EXPECT_NEAR(row, 1.0, 1e-12);
    }
  }
}

TEST(Propagator, ColumnMatchesFullMatrix) {
  const cw::ArrayModel model{9, 1.0, 0.1};
  const auto modes = cw::normal_modes(model);
  const double t = 321.0;
  const auto g = cw::propagator(model, modes, t);
  for (int l = 1; l <= 9; ++l) {
    const auto col = cw::propagator_column(model, modes, t, l);
    EXPECT_LT((col - g.matrix.col(l - 1)).cwiseAbs().maxCoeff(), 1e-14);
  }
  EXPECT_THROW(cw::propagator_column(model, modes, t, 0), std::out_of_range);
  EXPECT_THROW(cw::propagator_column(model, modes, t, 10), std::out_of_range);
}
