#pragma once

// Periodic orthonormal discrete wavelet transform on complex signals.
//
// Level 1 is the finest detail block (length K_T/2), level N_lvl the coarsest.
// One analysis stage on a block s of even length n:
//   a_i = sum_j h_j s_{(2i+j) mod n},   d_i = sum_j g_j s_{(2i+j) mod n},
// with g_j = (-1)^j h_{N-1-j}. Filters are real, so complex signals are
// transformed componentwise.

#include <Eigen/Core>

#include <cmath>
#include <complex>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "mdmd/error.hpp"

namespace mdmd {

struct WaveletFamily {
  std::string name;
  std::vector<double> lowpass;
  std::vector<double> highpass;
};

namespace detail {

inline void check_orthonormal(const std::string& name, const std::vector<double>& h,
                              double tol = 1e-10) {
  const int n = static_cast<int>(h.size());
  if (n < 2 || n % 2 != 0) {
    throw ConfigError("wavelet '" + name + "': filter length must be even and >= 2");
  }
  for (int shift = 0; shift < n; shift += 2) {
    double acc = 0.0;
    for (int i = 0; i + shift < n; ++i) acc += h[i] * h[i + shift];
    const double expected = shift == 0 ? 1.0 : 0.0;
    if (std::abs(acc - expected) > tol) {
      std::ostringstream msg;
      msg << "wavelet '" << name << "': lowpass filter is not orthonormal (shift " << shift
          << " gives " << acc << ")";
      throw ConfigError(msg.str());
    }
  }
}

}  // namespace detail

// Builds the quadrature-mirror highpass and validates orthonormality.
inline WaveletFamily make_family(std::string name, std::vector<double> lowpass) {
  detail::check_orthonormal(name, lowpass);
  const int n = static_cast<int>(lowpass.size());
  std::vector<double> highpass(n);
  for (int j = 0; j < n; ++j) highpass[j] = (j % 2 == 0 ? 1.0 : -1.0) * lowpass[n - 1 - j];
  return WaveletFamily{std::move(name), std::move(lowpass), std::move(highpass)};
}

inline WaveletFamily haar() {
  const double r = std::sqrt(0.5);
  return make_family("haar", {r, r});
}

// Daubechies, two vanishing moments.
inline WaveletFamily daubechies4() {
  const double s3 = std::sqrt(3.0);
  const double d = 4.0 * std::sqrt(2.0);
  return make_family("d4", {(1.0 + s3) / d, (3.0 + s3) / d, (3.0 - s3) / d, (1.0 - s3) / d});
}

inline WaveletFamily daubechies6() {
  return make_family("d6", {0.33267055295008263, 0.8068915093110925, 0.45987750211849154,
                            -0.13501102001025458, -0.08544127388202666,
                            0.035226291885709536});
}

inline WaveletFamily daubechies8() {
  return make_family("d8", {0.2303778133088965, 0.7148465705529157, 0.6308807679298589,
                            -0.027983769416859854, -0.18703481171909309,
                            0.030841381835560764, 0.0328830116668852, -0.010597401785069032});
}

inline std::vector<WaveletFamily> builtin_families() {
  return {haar(), daubechies4(), daubechies6(), daubechies8()};
}

// Plain-text filter table: one family per line, "<name> h_0 h_1 ... h_{N-1}".
// Blank lines and text after '#' are ignored. Every family is validated.
inline std::vector<WaveletFamily> load_families(std::istream& in) {
  std::vector<WaveletFamily> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string name;
    if (!(fields >> name)) continue;
    std::vector<double> taps;
    std::string tok;
    while (fields >> tok) {
      try {
        std::size_t used = 0;
        taps.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw ConfigError("filter table line " + std::to_string(lineno) +
                          ": bad coefficient '" + tok + "'");
      }
    }
    out.push_back(make_family(name, std::move(taps)));
  }
  return out;
}

// Looks a family up by name among the built-ins and any extra table entries.
inline WaveletFamily find_family(const std::string& name,
                                 const std::vector<WaveletFamily>& extra = {}) {
  for (const auto& f : extra) {
    if (f.name == name) return f;
  }
  for (auto f : builtin_families()) {
    if (f.name == name) return f;
  }
  throw ConfigError("unknown wavelet family '" + name + "'");
}

struct MRACoefficients {
  std::vector<Eigen::VectorXcd> details;  // details[j-1] is level j, length K_T / 2^j
  Eigen::VectorXcd approximation;         // length K_T / 2^{N_lvl}

  int levels() const { return static_cast<int>(details.size()); }
  Eigen::Index signal_length() const {
    Eigen::Index n = approximation.size();
    for (const auto& d : details) n += d.size();
    return n;
  }
};

// log2(K_T) - 1: the coarsest admissible decomposition keeps two
// approximation coefficients.
inline int max_levels(Eigen::Index signal_length) {
  int lg = 0;
  while ((Eigen::Index{1} << (lg + 1)) <= signal_length) ++lg;
  return lg - 1;
}

inline void check_levels(Eigen::Index signal_length, int levels) {
  if (signal_length < 4 || (signal_length & (signal_length - 1)) != 0) {
    throw ConfigError("wavelet transform needs a power-of-two signal length >= 4");
  }
  const int hi = max_levels(signal_length);
  if (levels < 1 || levels > hi) {
    std::ostringstream msg;
    msg << "wavelet level count " << levels << " outside [1, " << hi << "] for length "
        << signal_length;
    throw ConfigError(msg.str());
  }
}

inline MRACoefficients dwt_periodic(const Eigen::Ref<const Eigen::VectorXcd>& signal,
                                    const WaveletFamily& family, int levels) {
  check_levels(signal.size(), levels);
  const auto& h = family.lowpass;
  const auto& g = family.highpass;
  const int taps = static_cast<int>(h.size());

  MRACoefficients out;
  out.details.reserve(levels);
  Eigen::VectorXcd current = signal;
  for (int level = 1; level <= levels; ++level) {
    const Eigen::Index n = current.size();
    const Eigen::Index half = n / 2;
    Eigen::VectorXcd approx = Eigen::VectorXcd::Zero(half);
    Eigen::VectorXcd detail = Eigen::VectorXcd::Zero(half);
    for (Eigen::Index i = 0; i < half; ++i) {
      for (int j = 0; j < taps; ++j) {
        const auto& v = current[(2 * i + j) % n];
        approx[i] += h[j] * v;
        detail[i] += g[j] * v;
      }
    }
    out.details.push_back(std::move(detail));
    current = std::move(approx);
  }
  out.approximation = std::move(current);
  return out;
}

inline Eigen::VectorXcd idwt_periodic(const MRACoefficients& coeffs, const WaveletFamily& family) {
  const int levels = coeffs.levels();
  if (levels < 1) throw StructuralError("MRA coefficients have no detail levels");
  Eigen::Index expect = coeffs.approximation.size();
  if (expect < 1) throw StructuralError("MRA approximation block is empty");
  for (int level = levels; level >= 1; --level) {
    if (coeffs.details[level - 1].size() != expect) {
      std::ostringstream msg;
      msg << "MRA detail block at level " << level << " has length "
          << coeffs.details[level - 1].size() << ", expected " << expect;
      throw StructuralError(msg.str());
    }
    expect *= 2;
  }

  const auto& h = family.lowpass;
  const auto& g = family.highpass;
  const int taps = static_cast<int>(h.size());
  Eigen::VectorXcd current = coeffs.approximation;
  for (int level = levels; level >= 1; --level) {
    const auto& detail = coeffs.details[level - 1];
    const Eigen::Index half = current.size();
    const Eigen::Index n = 2 * half;
    Eigen::VectorXcd finer = Eigen::VectorXcd::Zero(n);
    for (Eigen::Index i = 0; i < half; ++i) {
      for (int j = 0; j < taps; ++j) finer[(2 * i + j) % n] += h[j] * current[i] + g[j] * detail[i];
    }
    current = std::move(finer);
  }
  return current;
}

// g_2 observables: per-level coefficient energy, finest detail first, the
// terminal approximation last.
inline Eigen::VectorXd scale_energies(const MRACoefficients& coeffs) {
  const int levels = coeffs.levels();
  Eigen::VectorXd out(levels + 1);
  for (int l = 0; l < levels; ++l) out[l] = coeffs.details[l].squaredNorm();
  out[levels] = coeffs.approximation.squaredNorm();
  return out;
}

// Per-level Besov block 2^{m q (alpha + 1/2 - 1/p)} (sum_n |c_n|^p)^{q/p},
// octave m = N_lvl + 1 - l for detail level l and m = 0 for the approximation.
inline Eigen::VectorXd besov_blocks(const MRACoefficients& coeffs, double alpha, double p,
                                    double q) {
  if (!(p >= 1.0) || !(q >= 1.0)) throw ConfigError("Besov exponents p and q must be >= 1");
  if (!(alpha >= 0.0)) throw ConfigError("Besov regularity alpha must be >= 0");
  const int levels = coeffs.levels();
  const double expo = q * (alpha + 0.5 - 1.0 / p);
  auto block = [&](const Eigen::VectorXcd& c, int octave) {
    double sum = 0.0;
    for (const auto& v : c) sum += std::pow(std::abs(v), p);
    return std::exp2(octave * expo) * std::pow(sum, q / p);
  };
  Eigen::VectorXd out(levels + 1);
  for (int l = 1; l <= levels; ++l) out[l - 1] = block(coeffs.details[l - 1], levels + 1 - l);
  out[levels] = block(coeffs.approximation, 0);
  return out;
}

}  // namespace mdmd
