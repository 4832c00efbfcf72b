#pragma once

#include "vibronic/analysis.hpp"
#include "vibronic/model.hpp"
#include "vibronic/spectrum.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace vibronic::io {

/// Parses a molecule document:
///
///   { "name": "...", "e00_cm1": 17000, "transition": "absorption",
///     "atom_count": 36,
///     "modes": [ { "energy_cm1": 1180, "huang_rhys": 0.2 },
///                { "energy_cm1": 760, "omega": 0.0035, "gradient": 1e-4 } ] }
///
/// A mode gives either huang_rhys or both omega and gradient. Unknown keys
/// are rejected. Throws ParseError, naming the mode where relevant.
Molecule parse_molecule_json(std::string_view text);
Molecule read_molecule_file(const std::filesystem::path& path);

/// CSV with `#`-prefixed provenance lines, then the header
/// `energy_cm1,intensity`, then one row per stick. Numbers use the shortest
/// representation that round-trips.
std::string format_spectrum_csv(const LineSpectrum& s);
/// Inverse of format_spectrum_csv. Requires the exact header and strictly
/// increasing energies; throws ParseError otherwise.
LineSpectrum parse_spectrum_csv(std::string_view text);

LineSpectrum read_spectrum_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view contents);

/// Columns events,mean_fidelity,std_fidelity.
std::string format_convergence_csv(const ConvergenceReport& r, const Provenance& provenance);

/// Single-curve 800x500 SVG line plot with linear axes.
std::string format_svg(const GriddedSpectrum& g, std::string_view title);

/// Shortest round-trip decimal form of a double.
std::string format_number(double v);

}  // namespace vibronic::io
