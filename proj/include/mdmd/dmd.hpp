#pragma once

// Truncated-SVD dynamic mode decomposition.
//
// With G- = U S V^H truncated to rank r, the projected operator
//   A = U_r^H G+ V_r S_r^{-1}     (r x r)
// shares its nonzero spectrum with the full least-squares operator
// G+ V_r S_r^{-1} U_r^H. Modes are lifted as Phi = U_r y and normalized;
// amplitudes solve min ||Phi b - g(a_0)||_2.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <complex>
#include <sstream>

#include "mdmd/error.hpp"
#include "mdmd/observables.hpp"

namespace mdmd {

struct SnapshotPair {
  Eigen::MatrixXcd minus;  // g(a_0) ... g(a_{N_T-1})
  Eigen::MatrixXcd plus;   // g(a_1) ... g(a_{N_T})
};

inline SnapshotPair split_snapshots(const Eigen::Ref<const Eigen::MatrixXcd>& data) {
  if (data.cols() < 2) throw StructuralError("DMD needs at least two snapshot columns");
  const Eigen::Index n = data.cols() - 1;
  return SnapshotPair{data.leftCols(n), data.rightCols(n)};
}

inline SnapshotPair split_snapshots(const ObservableMatrix& observables) {
  return split_snapshots(observables.values);
}

struct TruncationRule {
  int T_l = 10;
};

// Largest index i (1-based) with log10(s_i / s_1) > -T_l.
inline int truncation_rank(const Eigen::Ref<const Eigen::VectorXd>& singular_values,
                           TruncationRule rule) {
  if (rule.T_l < 0) throw ConfigError("truncation tolerance T_l must be non-negative");
  if (singular_values.size() == 0 || !(singular_values[0] > 0.0)) {
    throw DegenerateDataError("snapshot matrix has no nonzero singular value");
  }
  const double s1 = singular_values[0];
  int rank = 1;
  for (Eigen::Index i = 1; i < singular_values.size(); ++i) {
    if (singular_values[i] > 0.0 && std::log10(singular_values[i] / s1) > -rule.T_l) {
      rank = static_cast<int>(i) + 1;
    }
  }
  return rank;
}

struct DMDResult {
  Eigen::VectorXcd eigenvalues;  // mu_j
  Eigen::MatrixXcd modes;        // Phi_j, unit 2-norm columns
  Eigen::VectorXcd amplitudes;   // b_j
  int rank = 0;
  double dt = 1.0;
  int zero_eigenvalues = 0;      // excluded from reconstruction

  // lambda_j = log(mu_j) / dt on the principal branch; NaN for mu_j = 0.
  Eigen::VectorXcd continuous_eigenvalues() const {
    Eigen::VectorXcd out(eigenvalues.size());
    for (Eigen::Index j = 0; j < eigenvalues.size(); ++j) {
      out[j] = eigenvalues[j] == cplx(0.0) ? cplx(std::nan(""), std::nan(""))
                                           : std::log(eigenvalues[j]) / dt;
    }
    return out;
  }
};

// Holds the SVD of G- so that several truncation levels can be fitted
// without refactorizing.
class DmdFitter {
 public:
  DmdFitter(SnapshotPair pair, double dt) : pair_(std::move(pair)), dt_(dt) {
    if (pair_.minus.rows() != pair_.plus.rows() || pair_.minus.cols() != pair_.plus.cols()) {
      throw StructuralError("G- and G+ must have equal shapes");
    }
    if (pair_.minus.cols() < 1) throw StructuralError("snapshot pair has no columns");
    if (!(dt > 0.0)) throw ConfigError("DMD time step must be positive");
    if (!pair_.minus.allFinite() || !pair_.plus.allFinite()) {
      throw NumericalError("snapshot data contains non-finite entries");
    }
    svd_.compute(pair_.minus, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd_.info() != Eigen::Success) throw NumericalError("SVD of G- failed to converge");
  }

  const Eigen::VectorXd& singular_values() const { return svd_.singularValues(); }
  int rank_for(TruncationRule rule) const { return truncation_rank(singular_values(), rule); }

  DMDResult fit(TruncationRule rule) const { return fit_rank(rank_for(rule)); }

  DMDResult fit_rank(int r) const {
    if (r < 1 || r > singular_values().size()) throw ConfigError("DMD rank out of range");
    const auto U = svd_.matrixU().leftCols(r);
    const auto V = svd_.matrixV().leftCols(r);
    const Eigen::VectorXd inv_s = singular_values().head(r).cwiseInverse();

    const Eigen::MatrixXcd projected =
        (U.adjoint() * pair_.plus * V) * inv_s.cast<cplx>().asDiagonal();
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> eig(projected, true);
    if (eig.info() != Eigen::Success) {
      std::ostringstream msg;
      msg << "eigendecomposition of the " << r << "x" << r << " projected DMD operator failed";
      throw NumericalError(msg.str());
    }

    DMDResult res;
    res.rank = r;
    res.dt = dt_;
    res.eigenvalues = eig.eigenvalues();
    res.modes = U * eig.eigenvectors();
    for (Eigen::Index j = 0; j < r; ++j) {
      const double nrm = res.modes.col(j).norm();
      if (nrm > 0.0) res.modes.col(j) /= nrm;
      if (res.eigenvalues[j] == cplx(0.0)) ++res.zero_eigenvalues;
    }
    res.amplitudes = res.modes.colPivHouseholderQr().solve(pair_.minus.col(0));
    if (!res.amplitudes.allFinite()) throw NumericalError("DMD amplitude solve produced non-finite values");
    return res;
  }

 private:
  SnapshotPair pair_;
  double dt_;
  Eigen::BDCSVD<Eigen::MatrixXcd> svd_;
};

inline DMDResult fit(const SnapshotPair& pair, TruncationRule rule, double dt) {
  return DmdFitter(pair, dt).fit(rule);
}

// g(t) ~ sum_j b_j Phi_j exp((t/dt) log mu_j) over retained modes with mu_j != 0.
inline Eigen::VectorXcd reconstruct(const DMDResult& result, double t) {
  Eigen::VectorXcd weights = Eigen::VectorXcd::Zero(result.rank);
  const double steps = t / result.dt;
  for (int j = 0; j < result.rank; ++j) {
    const cplx mu = result.eigenvalues[j];
    if (mu == cplx(0.0)) continue;
    weights[j] = result.amplitudes[j] * std::exp(steps * std::log(mu));
  }
  return result.modes * weights;
}

}  // namespace mdmd
