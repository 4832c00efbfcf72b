#include "vibronic/spectrum.hpp"

#include "vibronic/errors.hpp"

#include <algorithm>
#include <cmath>

namespace vibronic {

Eigen::ArrayXd LineSpectrum::energies() const {
  Eigen::ArrayXd out(static_cast<Eigen::Index>(sticks.size()));
  for (std::size_t i = 0; i < sticks.size(); ++i) out[static_cast<Eigen::Index>(i)] = sticks[i].energy;
  return out;
}

Eigen::ArrayXd LineSpectrum::intensities() const {
  Eigen::ArrayXd out(static_cast<Eigen::Index>(sticks.size()));
  for (std::size_t i = 0; i < sticks.size(); ++i) out[static_cast<Eigen::Index>(i)] = sticks[i].intensity;
  return out;
}

double LineSpectrum::total_intensity() const {
  double total = 0.0;
  for (const auto& s : sticks) total += s.intensity;
  return total;
}

LineSpectrum normalize(LineSpectrum spectrum, Normalization mode) {
  if (spectrum.empty()) throw InvalidInput("cannot normalize an empty spectrum");
  const Eigen::ArrayXd intensity = spectrum.intensities();
  if ((intensity < 0.0).any() || !intensity.allFinite()) {
    throw InvalidInput("cannot normalize: intensities must be finite and >= 0");
  }
  if ((intensity == 0.0).all()) throw InvalidInput("cannot normalize: all intensities are zero");

  double scale = 1.0;
  switch (mode) {
    case Normalization::raw:
      break;
    case Normalization::unit_l1:
      scale = intensity.sum();
      break;
    case Normalization::unit_l2:
      scale = intensity.matrix().norm();
      break;
    case Normalization::max_one:
      scale = intensity.maxCoeff();
      break;
    case Normalization::zero_zero_one: {
      if (!spectrum.zero_zero) throw InvalidInput("cannot normalize to the 0-0 line: E00 unknown");
      const long long key = energy_key(*spectrum.zero_zero);
      auto it = std::find_if(spectrum.sticks.begin(), spectrum.sticks.end(),
                             [key](const Stick& s) { return energy_key(s.energy) == key; });
      if (it == spectrum.sticks.end() || it->intensity == 0.0) {
        throw InvalidInput("cannot normalize to the 0-0 line: no stick at E00");
      }
      scale = it->intensity;
      break;
    }
  }
  if (mode != Normalization::raw) {
    for (auto& s : spectrum.sticks) s.intensity /= scale;
  }
  spectrum.normalization = mode;
  return spectrum;
}

const char* to_string(Normalization mode) noexcept {
  switch (mode) {
    case Normalization::raw: return "raw";
    case Normalization::unit_l1: return "unit_l1";
    case Normalization::unit_l2: return "unit_l2";
    case Normalization::max_one: return "max_one";
    case Normalization::zero_zero_one: return "zero_zero_one";
  }
  return "raw";
}

Normalization parse_normalization(const std::string& text) {
  for (auto mode : {Normalization::raw, Normalization::unit_l1, Normalization::unit_l2,
                    Normalization::max_one, Normalization::zero_zero_one}) {
    if (text == to_string(mode)) return mode;
  }
  throw InvalidInput("unknown normalization '" + text + "'");
}

}  // namespace vibronic
