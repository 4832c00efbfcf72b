#pragma once

#include <Eigen/Core>

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace vibronic {

enum class Normalization { raw, unit_l1, unit_l2, max_one, zero_zero_one };

/// Energy resolution used to put transition energies on a shared lattice.
inline constexpr double kEnergyQuantum = 1e-6;

/// Rounds an energy (cm^-1) to the kEnergyQuantum lattice.
inline double canonical_energy(double energy) {
  return std::round(energy / kEnergyQuantum) * kEnergyQuantum;
}

/// Integer lattice key of an energy.
inline long long energy_key(double energy) {
  return std::llround(energy / kEnergyQuantum);
}

struct Stick {
  double energy = 0.0;
  double intensity = 0.0;

  bool operator==(const Stick&) const = default;
};

using Provenance = std::vector<std::pair<std::string, std::string>>;

/// Discrete stick spectrum, sorted by energy.
struct LineSpectrum {
  std::vector<Stick> sticks;
  Normalization normalization = Normalization::raw;
  /// Energy of the 0-0 line, when known.
  std::optional<double> zero_zero;
  Provenance provenance;

  std::size_t size() const noexcept { return sticks.size(); }
  bool empty() const noexcept { return sticks.empty(); }

  Eigen::ArrayXd energies() const;
  Eigen::ArrayXd intensities() const;
  double total_intensity() const;
};

/// Rescales a spectrum. Throws InvalidInput when every intensity is zero,
/// the spectrum is empty, or (for zero_zero_one) no stick sits at the 0-0 line.
LineSpectrum normalize(LineSpectrum spectrum, Normalization mode);

const char* to_string(Normalization mode) noexcept;
Normalization parse_normalization(const std::string& text);

}  // namespace vibronic
