#pragma once

// Error functionals for a DMD fit and the (T_l, N_lvl) sweep that minimizes
//   E = E_rc + w * E_sp,   w in [0, 2].

#include <Eigen/Core>

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "mdmd/dmd.hpp"
#include "mdmd/error.hpp"
#include "mdmd/observables.hpp"
#include "mdmd/solver.hpp"
#include "mdmd/wavelet.hpp"

namespace mdmd {

inline constexpr int kNoLevels = 0;  // N_lvl sentinel for canonical-only sweeps

struct ErrorReport {
  double E_rc = 0.0;
  double E_sp = 0.0;
  double E = 0.0;
  double weight = 0.0;
  int T_l = 0;
  int N_lvl = kNoLevels;
  int rank = 0;
  std::string status = "ok";

  bool ok() const { return status == "ok"; }
};

// l2 misfit of the canonical rows at the final sampled column.
inline double reconstruction_error(const ObservableMatrix& truth, const DMDResult& result,
                                   double t_f) {
  const auto& canon = truth.block(kCanonicalBlock);
  if (truth.cols() < 1) throw StructuralError("truth matrix has no columns");
  if (result.modes.rows() != truth.rows()) {
    throw StructuralError("DMD result and truth matrix have different observable counts");
  }
  const Eigen::VectorXcd approx = reconstruct(result, t_f);
  return (truth.values.col(truth.cols() - 1).segment(canon.offset, canon.rows) -
          approx.segment(canon.offset, canon.rows))
      .norm();
}

// RMS of |mu_j| - 1 over retained nonzero eigenvalues.
inline double spectral_error(const DMDResult& result) {
  double acc = 0.0;
  int count = 0;
  for (const auto& mu : result.eigenvalues) {
    if (mu == cplx(0.0)) continue;
    const double dev = std::abs(mu) - 1.0;
    acc += dev * dev;
    ++count;
  }
  return count == 0 ? 0.0 : std::sqrt(acc / count);
}

inline void check_weight(double weight) {
  if (!(weight >= 0.0 && weight <= 2.0)) throw ConfigError("error weight must lie in [0, 2]");
}

inline double combined_error(double E_rc, double E_sp, double weight) {
  check_weight(weight);
  return E_rc + weight * E_sp;
}

struct SweepGrid {
  std::vector<int> T_l;
  std::vector<int> N_lvl;
};

inline std::vector<int> int_range(int lo, int hi) {
  std::vector<int> out;
  for (int v = lo; v <= hi; ++v) out.push_back(v);
  return out;
}

// 2 <= T_l <= 10, 1 <= N_lvl <= log2(K_T) - 1.
inline SweepGrid default_sweep_grid(int K_T) { return {int_range(2, 10), int_range(1, max_levels(K_T))}; }

struct SweepResult {
  ObservableMode mode = ObservableMode::MDMD;
  double weight = 0.0;
  std::vector<ErrorReport> table;  // ordered by (N_lvl, T_l) of evaluation
  ErrorReport best;
};

// Arg-min of E over successful entries; ties go to the smallest T_l, then the
// smallest N_lvl. Throws if no entry succeeded.
inline ErrorReport select_best(const std::vector<ErrorReport>& table, double weight) {
  check_weight(weight);
  std::optional<ErrorReport> best;
  for (auto r : table) {
    if (!r.ok()) continue;
    r.weight = weight;
    r.E = combined_error(r.E_rc, r.E_sp, weight);
    if (!best || r.E < best->E ||
        (r.E == best->E && (r.T_l < best->T_l || (r.T_l == best->T_l && r.N_lvl < best->N_lvl)))) {
      best = r;
    }
  }
  if (!best) throw NumericalError("no sweep grid point produced a valid DMD fit");
  return *best;
}

// Re-weights an existing table; errors per grid point do not depend on w.
inline SweepResult reweight(const SweepResult& sweep, double weight) {
  SweepResult out = sweep;
  out.weight = weight;
  for (auto& r : out.table) {
    r.weight = weight;
    if (r.ok()) r.E = combined_error(r.E_rc, r.E_sp, weight);
  }
  out.best = select_best(out.table, weight);
  return out;
}

namespace detail {

inline void evaluate_truncations(const ObservableMatrix& obs, double dt, int levels,
                                 const std::vector<int>& tols, double weight,
                                 std::vector<ErrorReport>& table) {
  const double t_f = (obs.cols() - 1) * dt;
  std::optional<DmdFitter> fitter;
  std::string setup_error;
  try {
    fitter.emplace(split_snapshots(obs), dt);
  } catch (const std::exception& e) {
    setup_error = e.what();
  }
  for (int tol : tols) {
    ErrorReport r;
    r.weight = weight;
    r.T_l = tol;
    r.N_lvl = levels;
    if (!fitter) {
      r.status = setup_error;
      table.push_back(r);
      continue;
    }
    try {
      const auto res = fitter->fit({tol});
      r.rank = res.rank;
      r.E_rc = reconstruction_error(obs, res, t_f);
      r.E_sp = spectral_error(res);
      r.E = combined_error(r.E_rc, r.E_sp, weight);
      if (!std::isfinite(r.E)) r.status = "non-finite error";
    } catch (const std::exception& e) {
      r.status = e.what();
    }
    table.push_back(r);
  }
}

}  // namespace detail

// Fits DMD at every grid point and returns the full error table with its
// optimum. In DMD mode only T_l is swept (N_lvl = kNoLevels). The SVD of G-
// is shared across all T_l of one observable stack.
inline SweepResult sweep(const SnapshotSeries& series, ObservableMode mode, const SweepGrid& grid,
                         double weight, const WaveletFamily& family = daubechies4()) {
  check_weight(weight);
  if (series.states.size() < 2) throw StructuralError("sweep needs at least two snapshots");
  if (grid.T_l.empty()) throw ConfigError("sweep grid has no T_l values");
  for (int t : grid.T_l) {
    if (t < 0) throw ConfigError("sweep grid contains a negative T_l");
  }
  SweepResult out;
  out.mode = mode;
  out.weight = weight;
  const double dt = series.times.dt;

  if (mode == ObservableMode::DMD) {
    const auto obs = canonical_observables(series);
    detail::evaluate_truncations(obs, dt, kNoLevels, grid.T_l, weight, out.table);
  } else {
    if (grid.N_lvl.empty()) throw ConfigError("sweep grid has no N_lvl values");
    for (int lv : grid.N_lvl) check_levels(series.grid.K_T, lv);
    for (int lv : grid.N_lvl) {
      ObservableConfig cfg;
      cfg.mode = ObservableMode::MDMD;
      cfg.levels = lv;
      cfg.family = family;
      const auto obs = stack(cfg, series);
      detail::evaluate_truncations(obs, dt, lv, grid.T_l, weight, out.table);
    }
  }
  out.best = select_best(out.table, weight);
  return out;
}

}  // namespace mdmd
