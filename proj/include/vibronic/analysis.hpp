#pragma once

#include "vibronic/sampler.hpp"
#include "vibronic/sos.hpp"
#include "vibronic/spectrum.hpp"

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace vibronic {

enum class FidelityNorm {
  l2,             // F = sum p_i q_i over L2-normalized vectors
  bhattacharyya,  // F = sum sqrt(p_i q_i) over L1-normalized vectors
};

/// Overlap of two stick spectra aligned on the union of their energy keys.
/// Result lies in [0, 1]; 1 iff the spectra are proportional.
double fidelity(const LineSpectrum& p, const LineSpectrum& q,
                FidelityNorm norm = FidelityNorm::l2);
double fidelity(const SampledSpectrum& p, const LineSpectrum& q,
                FidelityNorm norm = FidelityNorm::l2);

/// Intensities of each spectrum on the sorted union of their energy keys.
struct AlignedPair {
  Eigen::VectorXd energy;
  Eigen::VectorXd p;
  Eigen::VectorXd q;
};
AlignedPair align(const LineSpectrum& p, const LineSpectrum& q);

enum class KernelShape { lorentzian, gaussian };

struct BroadeningKernel {
  KernelShape shape = KernelShape::lorentzian;
  double fwhm = 30.0;  // cm^-1

  void validate() const;
};

/// Unit-area Lorentzian with half width gamma = fwhm / 2.
template <typename Scalar>
Scalar lorentzian(Scalar x, Scalar fwhm) {
  const Scalar gamma = fwhm / Scalar(2);
  return gamma / (std::numbers::pi_v<Scalar> * (x * x + gamma * gamma));
}

/// sigma of a Gaussian with the given full width at half maximum.
template <typename Scalar>
Scalar gaussian_sigma(Scalar fwhm) {
  using std::log;
  using std::sqrt;
  return fwhm / (Scalar(2) * sqrt(Scalar(2) * log(Scalar(2))));
}

/// Unit-area Gaussian.
template <typename Scalar>
Scalar gaussian(Scalar x, Scalar fwhm) {
  using std::exp;
  using std::sqrt;
  const Scalar sigma = gaussian_sigma(fwhm);
  return exp(-x * x / (Scalar(2) * sigma * sigma)) /
         (sigma * sqrt(Scalar(2) * std::numbers::pi_v<Scalar>));
}

/// Kernel evaluated elementwise over an array of offsets.
template <typename Derived>
Eigen::Array<typename Derived::Scalar, Eigen::Dynamic, 1> kernel_profile(
    const BroadeningKernel& k, const Eigen::ArrayBase<Derived>& offsets) {
  using Scalar = typename Derived::Scalar;
  const Scalar fwhm(k.fwhm);
  if (k.shape == KernelShape::lorentzian) {
    return offsets.unaryExpr([fwhm](Scalar x) { return lorentzian(x, fwhm); });
  }
  return offsets.unaryExpr([fwhm](Scalar x) { return gaussian(x, fwhm); });
}

/// Uniform grid start, start + step, ... up to stop (inclusive within 1e-9 step).
struct EnergyGrid {
  double start = 0.0;
  double stop = 0.0;
  double step = 1.0;

  static constexpr double kMaxPoints = 1e7;

  void validate() const;  // throws GridError
  Eigen::Index size() const;
  Eigen::ArrayXd points() const;

  /// Default grid: step fwhm / 20, margin 10 fwhm beyond the outermost sticks.
  static EnergyGrid covering(const LineSpectrum& s, const BroadeningKernel& k);
};

struct GriddedSpectrum {
  Eigen::ArrayXd energy;
  Eigen::ArrayXd intensity;
  /// False when some stick sits closer than 5 fwhm to a grid edge.
  bool margin_ok = true;

  /// Grid points as a LineSpectrum, for CSV emission.
  LineSpectrum to_line_spectrum() const;
};

/// Sum over sticks of intensity * kernel(x - energy) at every grid point.
GriddedSpectrum broaden(const LineSpectrum& s, const BroadeningKernel& k, const EnergyGrid& g);

/// Trapezoid-rule integral of a gridded spectrum.
double trapezoid_area(const GriddedSpectrum& g);

struct ConvergenceReport {
  std::vector<std::uint64_t> event_counts;
  std::vector<double> mean_fidelity;
  std::vector<double> std_fidelity;  // sample standard deviation, 0 for one run
  unsigned runs = 0;
};

/// Fidelity of sampled spectra against the exact reference, R runs per event
/// count. Run r at event count P uses seed stream_key(base.seed, P, r).
ConvergenceReport convergence_study(const Molecule& m, const SamplerConfig& base,
                                    const DetectorModel& d,
                                    const std::vector<std::uint64_t>& event_counts,
                                    unsigned runs, const SosConfig& sos,
                                    FidelityNorm norm = FidelityNorm::l2);

/// Same, against a precomputed reference.
ConvergenceReport convergence_study(const Molecule& m, const LineSpectrum& reference,
                                    const SamplerConfig& base, const DetectorModel& d,
                                    const std::vector<std::uint64_t>& event_counts,
                                    unsigned runs, FidelityNorm norm = FidelityNorm::l2);

const char* to_string(KernelShape shape) noexcept;

}  // namespace vibronic
