#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace vibronic {

enum class TransitionKind { absorption, emission };

/// Mode pruning threshold on the Huang–Rhys factor used when none is given.
inline constexpr double kDefaultPruneThreshold = 1e-5;

/// One vibrational normal mode. Energies are in cm^-1.
struct Mode {
  std::size_t index = 0;  // 1-based
  double energy = 0.0;
  double huang_rhys = 0.0;

  bool operator==(const Mode&) const = default;
};

/// Frequency and excited-state gradient along one normal mode, in a
/// consistent unit system with hbar = 1 (atomic units are the usual choice).
struct GradientInput {
  double omega = 0.0;
  double gradient = 0.0;
};

/// Quantum numbers (j_1, ..., j_N), one per mode.
using VibrationalConfiguration = std::vector<unsigned>;

/// Named set of modes plus the zero-phonon line. Immutable once built.
class Molecule {
 public:
  Molecule() = default;
  /// Modes whose index is 0 are numbered by position (1-based).
  Molecule(std::string name, double e00, TransitionKind transition,
           std::vector<Mode> modes,
           std::optional<int> atom_count = std::nullopt);

  const std::string& name() const noexcept { return name_; }
  double e00() const noexcept { return e00_; }
  TransitionKind transition() const noexcept { return transition_; }
  const std::vector<Mode>& modes() const noexcept { return modes_; }
  std::size_t mode_count() const noexcept { return modes_.size(); }
  std::optional<int> atom_count() const noexcept { return atom_count_; }

  /// +1 for absorption, -1 for emission.
  double sign() const noexcept {
    return transition_ == TransitionKind::absorption ? 1.0 : -1.0;
  }

  Eigen::ArrayXd energies() const;
  Eigen::ArrayXd huang_rhys() const;

  /// Builds a molecule directly from energy and Huang–Rhys arrays.
  static Molecule from_arrays(std::string name, double e00,
                              TransitionKind transition,
                              const Eigen::Ref<const Eigen::ArrayXd>& energies,
                              const Eigen::Ref<const Eigen::ArrayXd>& huang_rhys);

 private:
  std::string name_;
  double e00_ = 0.0;
  TransitionKind transition_ = TransitionKind::absorption;
  std::vector<Mode> modes_;
  std::optional<int> atom_count_;
};

/// Huang–Rhys factor from a gradient with displacement dQ = G / omega and
/// S = omega dQ^2 / 2, i.e. S = G^2 / (2 omega).
double hr_from_gradient(const GradientInput& g);

struct ValidationIssue {
  std::size_t mode_index = 0;  // 0 for molecule-level issues
  std::string field;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> errors;
  /// Non-fatal flags: modes below the pruning threshold, empty mode list.
  std::vector<ValidationIssue> warnings;

  bool ok() const noexcept { return errors.empty(); }
  std::string describe() const;
};

ValidationReport validate_molecule(const Molecule& m,
                                   double prune_threshold = kDefaultPruneThreshold);

/// Throws InvalidInput carrying the report when the molecule is invalid.
void require_valid(const Molecule& m);

/// Keeps modes with S > threshold in their original order.
Molecule prune_modes(const Molecule& m, double threshold = kDefaultPruneThreshold);

const char* to_string(TransitionKind kind) noexcept;

}  // namespace vibronic
