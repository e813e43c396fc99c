#pragma once

// Text serialization. Floats are written in shortest round-trip form, so a
// write/read cycle reproduces every double bit for bit.
//
// Snapshot series (columnar CSV):
//   mdmd-snapshots-v1
//   L,K_T,dt,N_T,epsilon,x_s,seed
//   <values>
//   t,re_0,im_0,...,re_{K_T-1},im_{K_T-1}
//   one row per sample time t_0 ... t_{N_T}
//
// Observable matrix (same layout, one column pair per observable):
//   mdmd-observables-v1
//   t,<label>:<i>:re,<label>:<i>:im,...     (block-label header row; commas
//                                            inside a label are stored as ';')
//   one row per sample time
//
// DMD result:
//   mdmd-dmd-v1
//   rank,dt,zero_eigenvalues
//   <values>
//   re_mu,im_mu,abs_mu,re_lambda,im_lambda,abs_b
//   one line per retained mode
//   modes
//   mode,re_0,im_0,...                       (one row per mode, M entries)
//
// Sweep table:
//   T_l,N_lvl,E_rc,E_sp,E,rank,status

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "mdmd/dmd.hpp"
#include "mdmd/error.hpp"
#include "mdmd/metrics.hpp"
#include "mdmd/observables.hpp"
#include "mdmd/solver.hpp"

namespace mdmd::io {

inline std::string format_double(double v) {
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) throw NumericalError("cannot format floating-point value");
  return std::string(buf.data(), end);
}

inline double parse_double(std::string_view s) {
  double v = 0.0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || end != s.data() + s.size()) {
    throw StructuralError("malformed number '" + std::string(s) + "'");
  }
  return v;
}

template <class Int>
Int parse_int(std::string_view s) {
  Int v{};
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || end != s.data() + s.size()) {
    throw StructuralError("malformed integer '" + std::string(s) + "'");
  }
  return v;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

// Commas and line breaks would corrupt a CSV cell.
inline std::string csv_safe(std::string s) {
  for (auto& c : s) {
    if (c == ',') c = ';';
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

inline std::string expect_line(std::istream& in, const char* what) {
  std::string line;
  if (!std::getline(in, line)) throw StructuralError(std::string("unexpected end of input reading ") + what);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

inline void write_snapshots(std::ostream& os, const SnapshotSeries& series) {
  os << "mdmd-snapshots-v1\n";
  os << "L,K_T,dt,N_T,epsilon,x_s,seed\n";
  os << format_double(series.grid.L) << ',' << series.grid.K_T << ','
     << format_double(series.times.dt) << ',' << series.times.N_T << ','
     << format_double(series.ic.epsilon) << ',' << format_double(series.ic.x_s) << ','
     << series.ic.seed << '\n';
  os << 't';
  for (int l = 0; l < series.grid.K_T; ++l) os << ",re_" << l << ",im_" << l;
  os << '\n';
  for (const auto& s : series.states) {
    os << format_double(s.time);
    for (const auto& v : s.values) os << ',' << format_double(v.real()) << ',' << format_double(v.imag());
    os << '\n';
  }
}

inline SnapshotSeries read_snapshots(std::istream& in) {
  if (expect_line(in, "snapshot magic") != "mdmd-snapshots-v1") {
    throw StructuralError("not an mdmd snapshot file");
  }
  expect_line(in, "snapshot header names");
  const auto head = split_csv_line(expect_line(in, "snapshot header"));
  if (head.size() != 7) throw StructuralError("snapshot header must have 7 fields");
  SnapshotSeries series;
  series.grid = build_grid(parse_double(head[0]), parse_int<int>(head[1]));
  series.times.dt = parse_double(head[2]);
  series.times.N_T = parse_int<int>(head[3]);
  series.times.t_f = series.times.N_T * series.times.dt;
  series.ic.epsilon = parse_double(head[4]);
  series.ic.x_s = parse_double(head[5]);
  series.ic.seed = parse_int<std::uint64_t>(head[6]);
  expect_line(in, "snapshot column names");

  const int n = series.grid.K_T;
  for (int row = 0; row <= series.times.N_T; ++row) {
    const auto f = split_csv_line(expect_line(in, "snapshot row"));
    if (static_cast<int>(f.size()) != 1 + 2 * n) {
      throw StructuralError("snapshot row " + std::to_string(row) + " has wrong field count");
    }
    FieldState s;
    s.time = parse_double(f[0]);
    s.values.resize(n);
    for (int l = 0; l < n; ++l) s.values[l] = cplx(parse_double(f[1 + 2 * l]), parse_double(f[2 + 2 * l]));
    series.states.push_back(std::move(s));
  }
  return series;
}

inline void write_observables(std::ostream& os, const ObservableMatrix& m, double dt) {
  os << "mdmd-observables-v1\n";
  os << 't';
  for (const auto& b : m.blocks) {
    const auto label = csv_safe(b.label);
    for (Eigen::Index i = 0; i < b.rows; ++i) {
      os << ',' << label << ':' << i << ":re," << label << ':' << i << ":im";
    }
  }
  os << '\n';
  for (Eigen::Index n = 0; n < m.cols(); ++n) {
    os << format_double(n * dt);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      os << ',' << format_double(m.values(r, n).real()) << ',' << format_double(m.values(r, n).imag());
    }
    os << '\n';
  }
}

inline ObservableMatrix read_observables(std::istream& in) {
  if (expect_line(in, "observable magic") != "mdmd-observables-v1") {
    throw StructuralError("not an mdmd observable file");
  }
  const auto names = split_csv_line(expect_line(in, "observable labels"));
  if (names.empty() || (names.size() - 1) % 2 != 0) throw StructuralError("bad observable label row");
  ObservableMatrix m;
  const Eigen::Index rows = static_cast<Eigen::Index>(names.size() - 1) / 2;
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& name = names[1 + 2 * r];
    const auto colon = name.find(':');
    if (colon == std::string::npos) throw StructuralError("bad observable label '" + name + "'");
    auto label = name.substr(0, colon);
    std::replace(label.begin(), label.end(), ';', ',');
    if (m.blocks.empty() || m.blocks.back().label != label) m.blocks.push_back({label, r, 0});
    ++m.blocks.back().rows;
  }
  std::vector<Eigen::VectorXcd> cols;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (static_cast<Eigen::Index>(f.size()) != 1 + 2 * rows) throw StructuralError("bad observable row");
    Eigen::VectorXcd c(rows);
    for (Eigen::Index r = 0; r < rows; ++r) c[r] = cplx(parse_double(f[1 + 2 * r]), parse_double(f[2 + 2 * r]));
    cols.push_back(std::move(c));
  }
  m.values.resize(rows, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t n = 0; n < cols.size(); ++n) m.values.col(static_cast<Eigen::Index>(n)) = cols[n];
  return m;
}

inline void write_dmd_result(std::ostream& os, const DMDResult& res) {
  os << "mdmd-dmd-v1\n";
  os << "rank,dt,zero_eigenvalues\n";
  os << res.rank << ',' << format_double(res.dt) << ',' << res.zero_eigenvalues << '\n';
  os << "re_mu,im_mu,abs_mu,re_lambda,im_lambda,abs_b\n";
  const auto lambda = res.continuous_eigenvalues();
  for (int j = 0; j < res.rank; ++j) {
    os << format_double(res.eigenvalues[j].real()) << ',' << format_double(res.eigenvalues[j].imag())
       << ',' << format_double(std::abs(res.eigenvalues[j])) << ',' << format_double(lambda[j].real())
       << ',' << format_double(lambda[j].imag()) << ',' << format_double(std::abs(res.amplitudes[j]))
       << '\n';
  }
  os << "modes\n";
  os << "mode";
  for (Eigen::Index i = 0; i < res.modes.rows(); ++i) os << ",re_" << i << ",im_" << i;
  os << '\n';
  for (int j = 0; j < res.rank; ++j) {
    os << j;
    for (Eigen::Index i = 0; i < res.modes.rows(); ++i) {
      os << ',' << format_double(res.modes(i, j).real()) << ',' << format_double(res.modes(i, j).imag());
    }
    os << '\n';
  }
}

inline void write_sweep_csv(std::ostream& os, const SweepResult& sweep) {
  os << "T_l,N_lvl,E_rc,E_sp,E,rank,status\n";
  for (const auto& r : sweep.table) {
    os << r.T_l << ',' << r.N_lvl << ',' << format_double(r.E_rc) << ',' << format_double(r.E_sp)
       << ',' << format_double(r.E) << ',' << r.rank << ',' << csv_safe(r.status) << '\n';
  }
}

}  // namespace mdmd::io
