// Unperturbed soliton: canonical DMD recovers the single Koopman eigenvalue
// lambda = i. Prints the retained spectrum for each truncation tolerance.

#include <cstdio>

#include "mdmd/mdmd.hpp"

int main() {
  const auto grid = mdmd::build_grid(32.0, 256);
  const auto times = mdmd::make_time_grid(0.1, 30.0);
  const auto series = mdmd::simulate({0.0, 5.0, 0}, grid, times);

  mdmd::ObservableConfig cfg;
  cfg.mode = mdmd::ObservableMode::DMD;
  const auto obs = mdmd::stack(cfg, series);
  const mdmd::DmdFitter fitter(mdmd::split_snapshots(obs), times.dt);

  std::printf("%4s %5s %22s %12s\n", "T_l", "rank", "dominant lambda", "E_rc");
  for (int tl = 2; tl <= 10; ++tl) {
    const auto res = fitter.fit({tl});
    Eigen::Index j = 0;
    res.amplitudes.cwiseAbs().maxCoeff(&j);
    const auto lambda = res.continuous_eigenvalues()[j];
    std::printf("%4d %5d %10.3e%+.12fi %12.3e\n", tl, res.rank, lambda.real(), lambda.imag(),
                mdmd::reconstruction_error(obs, res, times.t_f));
  }
}
