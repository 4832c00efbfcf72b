#pragma once

#include "vibronic/model.hpp"
#include "vibronic/poisson.hpp"
#include "vibronic/random.hpp"
#include "vibronic/spectrum.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

namespace vibronic {

/// Photon detector emulation: loss, dark counts, and click saturation.
struct DetectorModel {
  double efficiency = 1.0;  // in (0, 1]
  double dark_mean = 0.0;   // expected dark counts per pulse
  bool threshold_mode = false;

  static DetectorModel ideal() { return {}; }
  void validate() const;
};

enum class ThinningMethod {
  direct,      // draw Poisson(efficiency * S) in one step
  per_photon,  // draw Poisson(S), then keep each photon with probability efficiency
};

struct SamplerConfig {
  std::uint64_t events = 1;
  std::uint64_t seed = 0;
  /// Recorded counts are capped here; absent means unbounded.
  std::optional<unsigned> max_quanta;
  std::uint64_t chunk_size = std::uint64_t{1} << 16;
  /// Worker threads; 0 selects the hardware concurrency. Never affects results.
  unsigned threads = 1;
  ThinningMethod thinning = ThinningMethod::direct;

  void validate() const;
};

/// Event-count histogram keyed by transition energy (cm^-1, on the
/// canonical lattice).
struct SampledSpectrum {
  std::map<double, std::uint64_t> counts;
  std::uint64_t total_events = 0;
  double zero_zero = 0.0;
  Provenance provenance;

  /// Counts as stick intensities, optionally normalized.
  LineSpectrum to_line_spectrum(Normalization mode = Normalization::raw) const;
};

/// Detector response to j incident photons: per-photon loss, additive dark
/// counts, click saturation, then the optional cap at max_quanta.
unsigned apply_detector(unsigned photons, const DetectorModel& d, CounterRng& rng,
                        std::optional<unsigned> max_quanta = std::nullopt);

/// Draws recorded counts for one mode with fixed Huang–Rhys factor.
class ModeSampler {
 public:
  ModeSampler(double huang_rhys, const DetectorModel& d, std::optional<unsigned> max_quanta,
              ThinningMethod thinning);

  unsigned operator()(CounterRng& rng) const {
    unsigned n;
    if (per_photon_) {
      n = signal_(rng);
      unsigned kept = 0;
      for (unsigned i = 0; i < n; ++i) kept += rng.uniform() < efficiency_ ? 1u : 0u;
      n = kept;
    } else {
      n = signal_(rng);
    }
    if (has_dark_) n += dark_(rng);
    if (threshold_ && n > 1) n = 1;
    if (n > cap_) n = cap_;
    return n;
  }

  /// True when every draw is zero (S = 0 and no dark counts).
  bool always_zero() const noexcept { return signal_.mean() == 0.0 && !has_dark_; }

  /// Number of leading CDF thresholds that fully determine a capped draw,
  /// or 0 when the general path is needed. When nonzero, a draw equals the
  /// count of thresholds t < capped_thresholds() with u >= cdf[t].
  std::size_t capped_thresholds() const noexcept { return capped_; }
  const double* thresholds() const noexcept { return signal_.cdf_table().data(); }

 private:
  PoissonSampler signal_;
  PoissonSampler dark_;
  double efficiency_;
  bool per_photon_;
  bool has_dark_;
  bool threshold_;
  unsigned cap_;
  std::size_t capped_ = 0;
};

/// P recorded counts for one mode. Chunk c of mode `mode_index` always uses
/// the sub-stream stream_key(seed, mode_index, c).
std::vector<std::uint32_t> sample_mode(double huang_rhys, std::size_t mode_index,
                                       const SamplerConfig& cfg, const DetectorModel& d);

/// Per-event energies E00 +/- sum_i E_i j_i(p), accumulated into a histogram.
/// Cost is O(events x modes); the result is independent of cfg.threads.
SampledSpectrum sample_spectrum(const Molecule& m, const SamplerConfig& cfg,
                                const DetectorModel& d);

}  // namespace vibronic
