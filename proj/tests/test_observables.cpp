#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mdmd/observables.hpp"
#include "test_support.hpp"

namespace mdmd {
namespace {

SnapshotSeries series_of(const GridConfig& g, std::vector<Eigen::VectorXcd> fields, double dt = 0.1) {
  SnapshotSeries s;
  s.grid = g;
  s.times = {dt, dt * (fields.size() - 1), static_cast<int>(fields.size()) - 1};
  for (std::size_t n = 0; n < fields.size(); ++n) s.states.push_back({std::move(fields[n]), n * dt});
  return s;
}

ObservableConfig mdmd_config(int levels) {
  ObservableConfig c;
  c.mode = ObservableMode::MDMD;
  c.levels = levels;
  return c;
}

TEST(Canonical, SingleSnapshotIsTheField) {
  const auto g = build_grid(8.0, 32);
  std::mt19937_64 rng(1);
  const auto f = testing::random_signal(32, rng);
  const auto m = canonical_observables(series_of(g, {f}));
  ASSERT_EQ(m.rows(), 32);
  ASSERT_EQ(m.cols(), 1);
  EXPECT_TRUE(m.values.col(0) == f);
  EXPECT_EQ(m.block(kCanonicalBlock).rows, 32);
}

TEST(Canonical, ZeroFieldAndEmptySeries) {
  const auto g = build_grid(8.0, 32);
  const auto m = canonical_observables(series_of(g, {Eigen::VectorXcd::Zero(32), Eigen::VectorXcd::Zero(32)}));
  EXPECT_EQ(m.values.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_THROW(canonical_observables(SnapshotSeries{}), StructuralError);
}

TEST(Canonical, UnperturbedSolitonColumns) {
  const auto g = build_grid(32.0, 256);
  const auto s = simulate({0.0, 5.0, 0}, g, make_time_grid(0.1, 3.0));
  const auto m = canonical_observables(s);
  for (int n = 0; n <= 30; ++n) {
    double dev = 0.0;
    for (int l = 0; l < 256; ++l) {
      dev = std::max(dev, std::abs(m.values(l, n) - std::numbers::sqrt2 * sech(g.x[l]) * std::polar(1.0, 0.1 * n)));
    }
    EXPECT_LT(dev, 1e-6) << "n=" << n;
  }
}

TEST(Multiscale, RowCountsAndLabels) {
  const auto g = build_grid(32.0, 256);
  const auto s = series_of(g, {Eigen::VectorXcd::Ones(256)});
  const auto m = multiscale_observables(s, mdmd_config(7));
  EXPECT_EQ(m.rows(), 24);
  ASSERT_EQ(m.blocks.size(), 3u);
  EXPECT_EQ(m.blocks[0].label, "g2");
  EXPECT_EQ(m.blocks[1].label, "besov(1,2,2)");
  EXPECT_EQ(m.blocks[2].label, "besov(0,2,4)");
  for (const auto& b : m.blocks) EXPECT_EQ(b.rows, 8);
}

TEST(Multiscale, L2BlockSumsToDiscreteNorm) {
  const auto g = build_grid(32.0, 256);
  std::mt19937_64 rng(4);
  std::vector<Eigen::VectorXcd> fields;
  for (int n = 0; n < 5; ++n) fields.push_back(testing::random_signal(256, rng));
  const auto s = series_of(g, fields);
  for (int lv : {1, 4, 7}) {
    const auto m = multiscale_observables(s, mdmd_config(lv));
    for (int n = 0; n < 5; ++n) {
      const double expect = g.dx * fields[n].squaredNorm();
      const double got = m.rows_of("g2").col(n).real().sum();
      EXPECT_NEAR(got, expect, 1e-10 * expect);
    }
  }
}

TEST(Multiscale, ZeroFieldGivesZeroRows) {
  const auto g = build_grid(32.0, 64);
  const auto m = multiscale_observables(series_of(g, {Eigen::VectorXcd::Zero(64)}), mdmd_config(3));
  EXPECT_EQ(m.values.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Multiscale, ConfigErrors) {
  const auto g = build_grid(32.0, 64);
  const auto s = series_of(g, {Eigen::VectorXcd::Ones(64)});
  EXPECT_THROW(multiscale_observables(s, mdmd_config(6)), ConfigError);
  EXPECT_THROW(multiscale_observables(s, mdmd_config(0)), ConfigError);
  ObservableConfig dmd;
  dmd.mode = ObservableMode::DMD;
  EXPECT_THROW(multiscale_observables(s, dmd), ConfigError);
}

TEST(Stack, ObservableCounts) {
  const auto g = build_grid(32.0, 256);
  const auto s = series_of(g, {Eigen::VectorXcd::Ones(256), Eigen::VectorXcd::Ones(256)});
  EXPECT_EQ(stack(mdmd_config(7), s).rows(), 280);
  EXPECT_EQ(stack(mdmd_config(1), s).rows(), 256 + 6);
  ObservableConfig dmd;
  dmd.mode = ObservableMode::DMD;
  const auto m = stack(dmd, s);
  EXPECT_EQ(m.rows(), 256);
  ASSERT_EQ(m.blocks.size(), 1u);
  EXPECT_EQ(m.blocks[0].label, kCanonicalBlock);
}

TEST(Stack, CustomBesovList) {
  const auto g = build_grid(32.0, 64);
  auto cfg = mdmd_config(2);
  cfg.besov_specs = {{0.5, 3.0, 1.0}};
  const auto m = stack(cfg, series_of(g, {Eigen::VectorXcd::Ones(64)}));
  EXPECT_EQ(m.rows(), 64 + 2 * 3);
  EXPECT_NE(m.find("besov(0.5,3,1)"), nullptr);
}

TEST(Stack, CanonicalExtractRestackIsIdentity) {
  const auto g = build_grid(32.0, 64);
  std::mt19937_64 rng(6);
  const auto s = series_of(g, {testing::random_signal(64, rng), testing::random_signal(64, rng)});
  const auto full = stack(mdmd_config(3), s);
  const auto canon = select_block(full, kCanonicalBlock);
  ObservableMatrix rest{full.values.bottomRows(full.rows() - 64), {}};
  for (const auto& b : full.blocks) {
    if (b.label != kCanonicalBlock) rest.blocks.push_back({b.label, b.offset - 64, b.rows});
  }
  const auto again = vstack(canon, rest);
  EXPECT_TRUE(again.values == full.values);
  ASSERT_EQ(again.blocks.size(), full.blocks.size());
  for (std::size_t i = 0; i < full.blocks.size(); ++i) {
    EXPECT_EQ(again.blocks[i].label, full.blocks[i].label);
    EXPECT_EQ(again.blocks[i].offset, full.blocks[i].offset);
  }
  EXPECT_THROW(full.block("nope"), StructuralError);
  EXPECT_THROW(vstack(full, canon), StructuralError);  // duplicate label
}

TEST(ObservableProperties, NormRowsRealNonNegativeAndPhaseInvariant) {
  const auto g = build_grid(32.0, 128);
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 5; ++trial) {
    const auto f = testing::random_signal(128, rng);
    const double theta = 0.7 + trial;
    const auto rotated = (f * std::polar(1.0, theta)).eval();
    const auto a = stack(mdmd_config(5), series_of(g, {f}));
    const auto b = stack(mdmd_config(5), series_of(g, {rotated}));
    const auto na = a.values.bottomRows(a.rows() - 128);
    const auto nb = b.values.bottomRows(b.rows() - 128);
    EXPECT_EQ(na.imag().cwiseAbs().maxCoeff(), 0.0);
    EXPECT_GE(na.real().minCoeff(), 0.0);
    for (Eigen::Index r = 0; r < na.rows(); ++r) {
      EXPECT_NEAR(nb(r, 0).real(), na(r, 0).real(), 1e-10 * std::abs(na(r, 0)));
    }
    EXPECT_LE((b.values.topRows(128) - a.values.topRows(128) * std::polar(1.0, theta)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(ObservableProperties, L2ColumnSumsConservedAlongTrajectory) {
  const auto g = build_grid(32.0, 256);
  const auto s = simulate({0.05, 5.0, 2}, g, make_time_grid(0.1, 30.0));
  const auto m = multiscale_observables(s, mdmd_config(5));
  const double m0 = m.rows_of("g2").col(0).real().sum();
  for (Eigen::Index n = 0; n < m.cols(); ++n) {
    EXPECT_NEAR(m.rows_of("g2").col(n).real().sum(), m0, 1e-8 * m0);
  }
}

}  // namespace
}  // namespace mdmd
