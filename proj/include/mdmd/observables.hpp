#pragma once

// Observable time series fed to DMD. Columns are sample times t_n, rows are
// observables grouped into labelled blocks:
//   canonical            u(x_l, t_n), K_T rows
//   g2                   per-scale L2 energies, N_lvl + 1 rows
//   besov(a,p,q) ...     per-scale Besov blocks, N_lvl + 1 rows each
// Norm-based rows carry the quadrature weight dx and a zero imaginary part.

#include <Eigen/Core>

#include <algorithm>
#include <sstream>
#include <string>
#include <vector>

#include "mdmd/error.hpp"
#include "mdmd/solver.hpp"
#include "mdmd/wavelet.hpp"

namespace mdmd {

enum class ObservableMode { DMD, MDMD };

inline std::string to_string(ObservableMode m) { return m == ObservableMode::DMD ? "dmd" : "mdmd"; }

struct BesovSpec {
  double alpha;
  double p;
  double q;
};

inline std::string besov_label(const BesovSpec& s) {
  std::ostringstream os;
  os << "besov(" << s.alpha << ',' << s.p << ',' << s.q << ')';
  return os.str();
}

inline constexpr const char* kCanonicalBlock = "canonical";
inline constexpr const char* kL2Block = "g2";

struct ObservableConfig {
  ObservableMode mode = ObservableMode::MDMD;
  int levels = 1;
  WaveletFamily family = daubechies4();
  // Dispersion-like (1,2,2) then nonlinearity-like (0,2,4).
  std::vector<BesovSpec> besov_specs = {{1.0, 2.0, 2.0}, {0.0, 2.0, 4.0}};

  int multiscale_rows() const {
    return static_cast<int>(1 + besov_specs.size()) * (levels + 1);
  }
};

struct RowBlock {
  std::string label;
  Eigen::Index offset = 0;
  Eigen::Index rows = 0;
};

struct ObservableMatrix {
  Eigen::MatrixXcd values;
  std::vector<RowBlock> blocks;

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }

  const RowBlock* find(const std::string& label) const {
    auto it = std::find_if(blocks.begin(), blocks.end(),
                           [&](const RowBlock& b) { return b.label == label; });
    return it == blocks.end() ? nullptr : &*it;
  }

  const RowBlock& block(const std::string& label) const {
    if (const auto* b = find(label)) return *b;
    throw StructuralError("observable matrix has no '" + label + "' block");
  }

  auto rows_of(const std::string& label) const {
    const auto& b = block(label);
    return values.middleRows(b.offset, b.rows);
  }
};

// Sub-matrix holding a single labelled block.
inline ObservableMatrix select_block(const ObservableMatrix& m, const std::string& label) {
  const auto& b = m.block(label);
  return ObservableMatrix{m.values.middleRows(b.offset, b.rows), {RowBlock{b.label, 0, b.rows}}};
}

// Vertical concatenation; blocks of `bottom` are re-offset.
inline ObservableMatrix vstack(const ObservableMatrix& top, const ObservableMatrix& bottom) {
  if (top.rows() == 0) return bottom;
  if (bottom.rows() == 0) return top;
  if (top.cols() != bottom.cols()) {
    throw StructuralError("cannot stack observable matrices with different column counts");
  }
  ObservableMatrix out;
  out.values.resize(top.rows() + bottom.rows(), top.cols());
  out.values << top.values, bottom.values;
  out.blocks = top.blocks;
  for (auto b : bottom.blocks) {
    if (top.find(b.label)) throw StructuralError("duplicate observable block '" + b.label + "'");
    b.offset += top.rows();
    out.blocks.push_back(std::move(b));
  }
  return out;
}

inline ObservableMatrix canonical_observables(const SnapshotSeries& series) {
  if (series.states.empty()) throw StructuralError("snapshot series is empty");
  const Eigen::Index rows = series.states.front().values.size();
  ObservableMatrix out;
  out.values.resize(rows, static_cast<Eigen::Index>(series.states.size()));
  for (std::size_t n = 0; n < series.states.size(); ++n) {
    if (series.states[n].values.size() != rows) {
      throw StructuralError("snapshot series has states of differing length");
    }
    out.values.col(static_cast<Eigen::Index>(n)) = series.states[n].values;
  }
  out.blocks.push_back({kCanonicalBlock, 0, rows});
  return out;
}

// Norm-based rows for one field sample, in block order g2, besov...
inline Eigen::VectorXd multiscale_column(const Eigen::Ref<const Eigen::VectorXcd>& field,
                                         const ObservableConfig& config, double dx) {
  const auto coeffs = dwt_periodic(field, config.family, config.levels);
  const Eigen::Index per = config.levels + 1;
  Eigen::VectorXd col(config.multiscale_rows());
  col.head(per) = scale_energies(coeffs);
  for (std::size_t s = 0; s < config.besov_specs.size(); ++s) {
    const auto& b = config.besov_specs[s];
    col.segment(static_cast<Eigen::Index>(s + 1) * per, per) = besov_blocks(coeffs, b.alpha, b.p, b.q);
  }
  return dx * col;
}

inline ObservableMatrix multiscale_observables(const SnapshotSeries& series,
                                               const ObservableConfig& config) {
  if (config.mode != ObservableMode::MDMD) {
    throw ConfigError("multiscale observables requested for a canonical-only configuration");
  }
  if (series.states.empty()) throw StructuralError("snapshot series is empty");
  check_levels(series.grid.K_T, config.levels);

  const Eigen::Index per = config.levels + 1;
  ObservableMatrix out;
  out.values.resize(config.multiscale_rows(), static_cast<Eigen::Index>(series.states.size()));
  for (std::size_t n = 0; n < series.states.size(); ++n) {
    out.values.col(static_cast<Eigen::Index>(n)) =
        multiscale_column(series.states[n].values, config, series.grid.dx).cast<cplx>();
  }
  out.blocks.push_back({kL2Block, 0, per});
  for (std::size_t s = 0; s < config.besov_specs.size(); ++s) {
    out.blocks.push_back({besov_label(config.besov_specs[s]), static_cast<Eigen::Index>(s + 1) * per, per});
  }
  return out;
}

// Full observable stack g = [canonical; g2; besov...] (canonical only in DMD mode).
inline ObservableMatrix stack(const ObservableConfig& config, const SnapshotSeries& series) {
  auto canonical = canonical_observables(series);
  if (config.mode == ObservableMode::DMD) return canonical;
  return vstack(canonical, multiscale_observables(series, config));
}

}  // namespace mdmd
