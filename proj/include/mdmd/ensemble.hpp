#pragma once

// Ensemble driver: N_e seeded noise realizations, each simulated once and
// swept under DMD and/or MDMD observables. Member m uses seed base_seed + m.

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "mdmd/error.hpp"
#include "mdmd/io.hpp"
#include "mdmd/metrics.hpp"
#include "mdmd/observables.hpp"
#include "mdmd/solver.hpp"
#include "mdmd/wavelet.hpp"

namespace mdmd {

enum class ModeSelection { DMD, MDMD, Both };

inline std::vector<ObservableMode> modes_of(ModeSelection s) {
  switch (s) {
    case ModeSelection::DMD:
      return {ObservableMode::DMD};
    case ModeSelection::MDMD:
      return {ObservableMode::MDMD};
    case ModeSelection::Both:
      break;
  }
  return {ObservableMode::DMD, ObservableMode::MDMD};
}

inline ObservableMode parse_mode(const std::string& s) {
  if (s == "dmd") return ObservableMode::DMD;
  if (s == "mdmd") return ObservableMode::MDMD;
  throw ConfigError("unknown observable mode '" + s + "'");
}

struct ExperimentConfig {
  double epsilon = 0.05;
  double weight = 0.01;
  ModeSelection mode = ModeSelection::Both;
  int members = 16;
  std::uint64_t base_seed = 1;
  double L = 32.0;
  int K_T = 256;
  double dt = 0.1;
  double t_f = 30.0;
  double x_s = 5.0;
  int substeps = kDefaultSubsteps;
  std::optional<SweepGrid> grid;  // default_sweep_grid(K_T) when unset
  WaveletFamily family = daubechies4();
  std::optional<std::filesystem::path> snapshot_dir;
  unsigned threads = 1;

  SweepGrid sweep_grid() const { return grid ? *grid : default_sweep_grid(K_T); }
};

inline void validate(const ExperimentConfig& c) {
  if (c.members < 1) throw ConfigError("ensemble needs at least one member");
  check_weight(c.weight);
  if (!(c.epsilon >= 0.0)) throw ConfigError("epsilon must be >= 0");
  build_grid(c.L, c.K_T);
  make_time_grid(c.dt, c.t_f);
  if (!(c.x_s > -c.L && c.x_s < c.L)) throw ConfigError("x_s must lie inside (-L, L)");
  if (c.substeps < 1) throw ConfigError("substep count must be >= 1");
  const auto g = c.sweep_grid();
  if (g.T_l.empty()) throw ConfigError("empty T_l range");
  for (int t : g.T_l) {
    if (t < 0) throw ConfigError("T_l values must be non-negative");
  }
  if (c.mode != ModeSelection::DMD) {
    if (g.N_lvl.empty()) throw ConfigError("empty N_lvl range");
    for (int lv : g.N_lvl) check_levels(c.K_T, lv);
  }
}

struct EnsembleRecord {
  int member = 0;
  ObservableMode mode = ObservableMode::DMD;
  std::uint64_t seed = 0;
  double E_rc = 0.0;
  double E_sp = 0.0;
  double E = 0.0;
  int best_T_l = 0;
  int best_N_lvl = kNoLevels;
  int rank = 0;
  std::string status = "ok";

  bool ok() const { return status == "ok"; }
  friend bool operator==(const EnsembleRecord&, const EnsembleRecord&) = default;
};

// Full sweep tables of one member; the optimum for any weight can be
// re-selected from them without refitting.
struct MemberOutcome {
  int member = 0;
  std::uint64_t seed = 0;
  std::string status = "ok";  // simulation status
  std::vector<SweepResult> sweeps;
  std::vector<std::string> sweep_status;  // per mode, parallel to modes_of()
};

inline MemberOutcome run_member(const ExperimentConfig& c, int member) {
  MemberOutcome out;
  out.member = member;
  out.seed = c.base_seed + static_cast<std::uint64_t>(member);
  const auto grid = build_grid(c.L, c.K_T);
  const auto times = make_time_grid(c.dt, c.t_f);
  SnapshotSeries series;
  try {
    StepOptions opts;
    opts.substeps = c.substeps;
    series = simulate({c.epsilon, c.x_s, out.seed}, grid, times, opts);
  } catch (const BlowUpError& e) {
    out.status = e.what();
    return out;
  }
  if (c.snapshot_dir) {
    std::filesystem::create_directories(*c.snapshot_dir);
    const auto path = *c.snapshot_dir / ("member_" + std::to_string(member) + ".csv");
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write snapshot file " + path.string());
    io::write_snapshots(f, series);
  }
  const auto sweep_grid = c.sweep_grid();
  for (auto mode : modes_of(c.mode)) {
    try {
      out.sweeps.push_back(sweep(series, mode, sweep_grid, c.weight, c.family));
      out.sweep_status.emplace_back("ok");
    } catch (const std::exception& e) {
      SweepResult failed;
      failed.mode = mode;
      failed.weight = c.weight;
      out.sweeps.push_back(std::move(failed));
      out.sweep_status.emplace_back(e.what());
    }
  }
  return out;
}

// Runs every member, `threads` at a time. Output order is by member index
// regardless of scheduling.
inline std::vector<MemberOutcome> run_members(const ExperimentConfig& c) {
  validate(c);
  std::vector<MemberOutcome> outcomes(c.members);
  std::atomic<int> next{0};
  std::vector<std::string> errors(c.members);
  auto worker = [&] {
    for (int m = next++; m < c.members; m = next++) {
      try {
        outcomes[m] = run_member(c, m);
      } catch (const std::exception& e) {
        errors[m] = e.what();
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(c.threads, static_cast<unsigned>(c.members)));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (!e.empty()) throw std::runtime_error(e);  // I/O failures abort the run
  }
  return outcomes;
}

inline std::vector<EnsembleRecord> records_for_weight(const ExperimentConfig& c,
                                                      const std::vector<MemberOutcome>& outcomes,
                                                      double weight) {
  std::vector<EnsembleRecord> records;
  const auto modes = modes_of(c.mode);
  for (const auto& o : outcomes) {
    for (std::size_t i = 0; i < modes.size(); ++i) {
      EnsembleRecord r;
      r.member = o.member;
      r.mode = modes[i];
      r.seed = o.seed;
      if (o.status != "ok") {
        r.status = o.status;
      } else if (o.sweep_status[i] != "ok") {
        r.status = o.sweep_status[i];
      } else {
        const auto best = select_best(o.sweeps[i].table, weight);
        r.E_rc = best.E_rc;
        r.E_sp = best.E_sp;
        r.E = best.E;
        r.best_T_l = best.T_l;
        r.best_N_lvl = best.N_lvl;
        r.rank = best.rank;
      }
      records.push_back(std::move(r));
    }
  }
  std::stable_sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
    return a.member != b.member ? a.member < b.member : a.mode < b.mode;
  });
  return records;
}

inline std::vector<EnsembleRecord> run_experiment(const ExperimentConfig& c) {
  return records_for_weight(c, run_members(c), c.weight);
}

// First header token is the schema version; its column holds the row index.
inline constexpr const char* kEnsembleSchema = "mdmd-ensemble-v1";
inline constexpr const char* kEnsembleColumns =
    "member,mode,seed,E_rc,E_sp,E,best_T_l,best_N_lvl,rank,status";

inline void emit_csv(const std::vector<EnsembleRecord>& records, std::ostream& os) {
  if (records.empty()) throw ConfigError("no ensemble records to write");
  os << kEnsembleSchema << ',' << kEnsembleColumns << '\n';
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    os << i << ',' << r.member << ',' << to_string(r.mode) << ',' << r.seed << ','
       << io::format_double(r.E_rc) << ',' << io::format_double(r.E_sp) << ','
       << io::format_double(r.E) << ',' << r.best_T_l << ',' << r.best_N_lvl << ',' << r.rank
       << ',' << io::csv_safe(r.status) << '\n';
  }
}

inline void emit_csv(const std::vector<EnsembleRecord>& records, const std::filesystem::path& path) {
  if (records.empty()) throw ConfigError("no ensemble records to write");
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  emit_csv(records, f);
  if (!f) throw std::runtime_error("write to " + path.string() + " failed");
}

inline std::vector<EnsembleRecord> parse_csv(std::istream& in) {
  const auto header = io::expect_line(in, "ensemble header");
  if (header != std::string(kEnsembleSchema) + ',' + kEnsembleColumns) {
    throw StructuralError("unrecognized ensemble CSV header");
  }
  std::vector<EnsembleRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = io::split_csv_line(line);
    if (f.size() != 11) throw StructuralError("ensemble CSV row has " + std::to_string(f.size()) + " fields");
    EnsembleRecord r;
    r.member = io::parse_int<int>(f[1]);
    r.mode = parse_mode(f[2]);
    r.seed = io::parse_int<std::uint64_t>(f[3]);
    r.E_rc = io::parse_double(f[4]);
    r.E_sp = io::parse_double(f[5]);
    r.E = io::parse_double(f[6]);
    r.best_T_l = io::parse_int<int>(f[7]);
    r.best_N_lvl = io::parse_int<int>(f[8]);
    r.rank = io::parse_int<int>(f[9]);
    r.status = f[10];
    out.push_back(std::move(r));
  }
  return out;
}

namespace detail {

inline double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline nlohmann::json stats(const std::vector<double>& v) {
  if (v.empty()) return nullptr;
  return {{"median", median(v)},
          {"min", *std::min_element(v.begin(), v.end())},
          {"max", *std::max_element(v.begin(), v.end())}};
}

}  // namespace detail

// Per-mode statistics of the successful records plus, when both modes are
// present, the fraction of paired members where MDMD E_rc <= DMD E_rc.
inline nlohmann::json emit_summary(const std::vector<EnsembleRecord>& records) {
  if (records.empty()) throw ConfigError("no ensemble records to summarize");
  nlohmann::json out;
  out["schema"] = "mdmd-summary-v1";
  std::map<int, std::map<ObservableMode, const EnsembleRecord*>> by_member;
  for (auto mode : {ObservableMode::DMD, ObservableMode::MDMD}) {
    std::vector<double> erc, esp, tl, nl;
    int total = 0;
    for (const auto& r : records) {
      if (r.mode != mode) continue;
      ++total;
      by_member[r.member][mode] = &r;
      if (!r.ok()) continue;
      erc.push_back(r.E_rc);
      esp.push_back(r.E_sp);
      tl.push_back(r.best_T_l);
      nl.push_back(r.best_N_lvl);
    }
    if (total == 0) continue;
    out["modes"][to_string(mode)] = {{"members", total},
                                     {"succeeded", erc.size()},
                                     {"E_rc", detail::stats(erc)},
                                     {"E_sp", detail::stats(esp)},
                                     {"best_T_l", detail::stats(tl)},
                                     {"best_N_lvl", detail::stats(nl)}};
  }
  if (out["modes"].size() == 2) {
    int paired = 0, wins = 0;
    for (const auto& [member, modes] : by_member) {
      auto d = modes.find(ObservableMode::DMD);
      auto m = modes.find(ObservableMode::MDMD);
      if (d == modes.end() || m == modes.end() || !d->second->ok() || !m->second->ok()) continue;
      ++paired;
      if (m->second->E_rc <= d->second->E_rc) ++wins;
    }
    out["paired_members"] = paired;
    out["win_rate"] = paired ? nlohmann::json(static_cast<double>(wins) / paired) : nlohmann::json(nullptr);
  }
  return out;
}

}  // namespace mdmd
