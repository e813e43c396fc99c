#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mdmd/dmd.hpp"
#include "test_support.hpp"

namespace mdmd {
namespace {

using testing::linear_trajectory;
using testing::random_spectrum;
using testing::spectrum_mismatch;

TEST(Split, DropsLastAndFirstColumns) {
  Eigen::MatrixXcd m(2, 3);
  m << 1, 2, 3, 4, 5, 6;
  const auto p = split_snapshots(m);
  ASSERT_EQ(p.minus.cols(), 2);
  EXPECT_TRUE(p.minus == m.leftCols(2));
  EXPECT_TRUE(p.plus == m.rightCols(2));
  EXPECT_EQ(split_snapshots(Eigen::MatrixXcd::Zero(4, 301)).minus.cols(), 300);
  EXPECT_THROW(split_snapshots(Eigen::MatrixXcd::Zero(4, 1)), StructuralError);
}

TEST(Truncation, Examples) {
  Eigen::VectorXd d(3);
  d << 1.0, 1e-3, 1e-12;
  EXPECT_EQ(truncation_rank(d, {10}), 2);
  EXPECT_EQ(truncation_rank(Eigen::VectorXd::Constant(1, 5.0), {0}), 1);
  EXPECT_EQ(truncation_rank(Eigen::VectorXd::Constant(1, 5.0), {7}), 1);
  Eigen::VectorXd e(2);
  e << 1.0, std::pow(10.0, -2.5);
  EXPECT_EQ(truncation_rank(e, {2}), 1);
  EXPECT_EQ(truncation_rank(e, {3}), 2);
}

TEST(Truncation, StrictInequalityAtExactPowerOfTen) {
  Eigen::VectorXd d(2);
  d << 1.0, 0.01;  // log10 ratio == -2 exactly
  EXPECT_EQ(truncation_rank(d, {2}), 1);
}

TEST(Truncation, DegenerateAndInvalid) {
  EXPECT_THROW(truncation_rank(Eigen::VectorXd::Zero(3), {5}), DegenerateDataError);
  EXPECT_THROW(truncation_rank(Eigen::VectorXd(), {5}), DegenerateDataError);
  EXPECT_THROW(truncation_rank(Eigen::VectorXd::Ones(2), {-1}), ConfigError);
}

TEST(Truncation, MonotoneInTolerance) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ex(-14.0, 0.0);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd d(12);
    for (auto& v : d) v = std::pow(10.0, ex(rng));
    std::sort(d.begin(), d.end(), std::greater<>());
    int prev = 0;
    for (int t = 0; t <= 16; ++t) {
      const int r = truncation_rank(d, {t});
      EXPECT_GE(r, prev);
      prev = r;
    }
  }
}

TEST(Fit, DiagonalMapWithGenericInitialVector) {
  // Oracle: eigenvalues of A computed by a brute-force dense eigensolver.
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(3, 3);
  A(0, 0) = std::polar(1.0, 0.1);
  A(1, 1) = std::polar(1.0, -0.2);
  A(2, 2) = 0.5;
  const Eigen::VectorXcd oracle = Eigen::ComplexEigenSolver<Eigen::MatrixXcd>(A).eigenvalues();

  Eigen::MatrixXcd g(3, 30);
  g.col(0) << cplx(0.7, 0.2), cplx(-1.1, 0.4), cplx(0.9, -0.3);
  for (int n = 1; n < 30; ++n) g.col(n) = A * g.col(n - 1);
  const auto res = fit(split_snapshots(g), {12}, 0.1);
  ASSERT_EQ(res.rank, 3);
  EXPECT_LT(spectrum_mismatch(res.eigenvalues, oracle), 1e-8);
}

TEST(Fit, ConstantColumnsGiveIdentityDynamics) {
  Eigen::VectorXcd c(4);
  c << 1.0, cplx(0.0, 2.0), -0.5, 3.0;
  Eigen::MatrixXcd g = c.replicate(1, 10);
  const auto res = fit(split_snapshots(g), {10}, 0.1);
  ASSERT_EQ(res.rank, 1);
  EXPECT_NEAR(std::abs(res.eigenvalues[0] - 1.0), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(res.modes.col(0).dot(c.normalized())), 1.0, 1e-12);
  for (double t : {0.0, 0.3, 2.5}) EXPECT_LT((reconstruct(res, t) - c).norm(), 1e-12);
}

TEST(Fit, ModesHaveUnitNorm) {
  std::mt19937_64 rng(2);
  const auto sys = linear_trajectory(random_spectrum(5, 0.8, 1.0, 0.1, rng), 8, 30, rng);
  const auto res = fit(split_snapshots(sys.snapshots), {12}, 0.1);
  for (int j = 0; j < res.rank; ++j) EXPECT_NEAR(res.modes.col(j).norm(), 1.0, 1e-12);
}

TEST(Fit, RejectsBadInput) {
  EXPECT_THROW(fit(split_snapshots(Eigen::MatrixXcd::Zero(3, 5)), {5}, 0.1), DegenerateDataError);
  SnapshotPair bad{Eigen::MatrixXcd::Ones(3, 4), Eigen::MatrixXcd::Ones(3, 5)};
  EXPECT_THROW(fit(bad, {5}, 0.1), StructuralError);
  EXPECT_THROW(fit(split_snapshots(Eigen::MatrixXcd::Ones(3, 5)), {5}, 0.0), ConfigError);
}

TEST(Fit, UnperturbedSolitonHasKoopmanEigenvalueI) {
  const auto g = build_grid(32.0, 256);
  const auto s = simulate({0.0, 5.0, 0}, g, make_time_grid(0.1, 30.0));
  ObservableConfig cfg;
  cfg.mode = ObservableMode::DMD;
  const auto obs = stack(cfg, s);
  const auto res = fit(split_snapshots(obs), {6}, 0.1);
  ASSERT_EQ(res.rank, 1);
  EXPECT_LE(std::abs(res.eigenvalues[0] - std::polar(1.0, 0.1)), 1e-6);
  EXPECT_LE(std::abs(res.continuous_eigenvalues()[0] - cplx(0.0, 1.0)), 1e-5);

  const Eigen::VectorXcd truth = obs.values.col(300);
  EXPECT_LE((reconstruct(res, 30.0) - truth).norm() / truth.norm(), 1e-4);
}

TEST(Reconstruct, InitialTimeIsLeastSquaresProjection) {
  std::mt19937_64 rng(4);
  const auto sys = linear_trajectory(random_spectrum(4, 0.9, 1.0, 0.1, rng), 6, 20, rng);
  const auto res = fit(split_snapshots(sys.snapshots), {12}, 0.1);
  EXPECT_LT((reconstruct(res, 0.0) - res.modes * res.amplitudes).norm(), 1e-12);
  EXPECT_LT((reconstruct(res, 0.0) - sys.snapshots.col(0)).norm(), 1e-9 * sys.snapshots.col(0).norm());
}

TEST(Reconstruct, SingleModeOneStep) {
  DMDResult r;
  r.rank = 1;
  r.dt = 0.1;
  r.eigenvalues = Eigen::VectorXcd::Constant(1, cplx(0.6, 0.7));
  r.modes = Eigen::MatrixXcd::Zero(2, 1);
  r.modes(0, 0) = 1.0;
  r.amplitudes = Eigen::VectorXcd::Constant(1, cplx(2.0, -1.0));
  const auto v = reconstruct(r, 0.1);
  EXPECT_LT(std::abs(v[0] - cplx(0.6, 0.7) * cplx(2.0, -1.0)), 1e-14);
  EXPECT_EQ(v[1], cplx(0.0));
}

TEST(Reconstruct, ZeroEigenvalueExcluded) {
  DMDResult r;
  r.rank = 2;
  r.dt = 1.0;
  r.eigenvalues.resize(2);
  r.eigenvalues << 0.0, 0.5;
  r.modes = Eigen::MatrixXcd::Identity(2, 2);
  r.amplitudes = Eigen::VectorXcd::Ones(2);
  const auto v = reconstruct(r, 1.0);
  EXPECT_EQ(v[0], cplx(0.0));
  EXPECT_NEAR(v[1].real(), 0.5, 1e-15);
  EXPECT_TRUE(std::isnan(r.continuous_eigenvalues()[0].real()));
}

TEST(DmdProperties, ExactLinearRecovery) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 7;
    const auto mu = random_spectrum(n, 0.8, 1.02, 0.1, rng);
    const auto sys = linear_trajectory(mu, n + trial % 4, 3 * n + 5, rng);
    for (int tl : {10, 12}) {
      const auto res = fit(split_snapshots(sys.snapshots), {tl}, 0.1);
      EXPECT_LT(spectrum_mismatch(res.eigenvalues, mu), 1e-8) << "trial " << trial;
      for (Eigen::Index k = 0; k < sys.snapshots.cols(); ++k) {
        const Eigen::VectorXcd want = sys.snapshots.col(k);
        EXPECT_LT((reconstruct(res, 0.1 * k) - want).norm(), 1e-8 * want.norm());
      }
    }
  }
}

TEST(DmdProperties, ProjectedMatchesFullPseudoinverseOperator) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const int M = 3 + trial % 10;
    const int N = 2 + (trial * 7) % 12;
    const Eigen::MatrixXcd minus = testing::random_matrix(M, N, rng);
    const Eigen::MatrixXcd plus = testing::random_matrix(M, N, rng);
    const auto res = fit(SnapshotPair{minus, plus}, {14}, 1.0);
    ASSERT_EQ(res.rank, std::min(M, N));

    const Eigen::MatrixXcd full = plus * minus.completeOrthogonalDecomposition().pseudoInverse();
    const Eigen::VectorXcd all = Eigen::ComplexEigenSolver<Eigen::MatrixXcd>(full).eigenvalues();
    std::vector<cplx> nonzero;
    for (const auto& v : all) {
      if (std::abs(v) > 1e-9) nonzero.push_back(v);
    }
    const Eigen::VectorXcd want = Eigen::Map<const Eigen::VectorXcd>(nonzero.data(), nonzero.size());
    EXPECT_LT(spectrum_mismatch(res.eigenvalues, want), 1e-8) << "M=" << M << " N=" << N;
  }
}

TEST(DmdProperties, UnitaryTrajectoryHasUnitSpectrum) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 3 + trial % 6;
    const Eigen::MatrixXcd Q = testing::random_matrix(n, n, rng).householderQr().householderQ();
    Eigen::VectorXcd phases(n);
    std::uniform_real_distribution<double> ph(-3.0, 3.0);
    for (auto& p : phases) p = std::polar(1.0, ph(rng));
    const Eigen::MatrixXcd U = Q * phases.asDiagonal() * Q.adjoint();
    Eigen::MatrixXcd g(n, 4 * n);
    g.col(0) = testing::random_signal(n, rng);
    for (int k = 1; k < 4 * n; ++k) g.col(k) = U * g.col(k - 1);
    const auto res = fit(split_snapshots(g), {12}, 0.1);
    for (const auto& mu : res.eigenvalues) EXPECT_NEAR(std::abs(mu), 1.0, 1e-8);
  }
}

TEST(DmdFitterTest, SharedSvdMatchesFreshFit) {
  std::mt19937_64 rng(5);
  const auto sys = linear_trajectory(random_spectrum(6, 0.5, 1.0, 0.1, rng), 10, 25, rng);
  const DmdFitter fitter(split_snapshots(sys.snapshots), 0.1);
  for (int tl : {1, 3, 12}) {
    const auto a = fitter.fit({tl});
    const auto b = fit(split_snapshots(sys.snapshots), {tl}, 0.1);
    EXPECT_EQ(a.rank, b.rank);
    EXPECT_TRUE(a.eigenvalues == b.eigenvalues);
  }
}

}  // namespace
}  // namespace mdmd
