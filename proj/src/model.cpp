#include "vibronic/model.hpp"

#include "vibronic/errors.hpp"

#include <cmath>
#include <sstream>
#include <utility>

namespace vibronic {

Molecule::Molecule(std::string name, double e00, TransitionKind transition,
                   std::vector<Mode> modes, std::optional<int> atom_count)
    : name_(std::move(name)),
      e00_(e00),
      transition_(transition),
      modes_(std::move(modes)),
      atom_count_(atom_count) {
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    if (modes_[i].index == 0) modes_[i].index = i + 1;
  }
}

Eigen::ArrayXd Molecule::energies() const {
  Eigen::ArrayXd out(static_cast<Eigen::Index>(modes_.size()));
  for (std::size_t i = 0; i < modes_.size(); ++i) out[static_cast<Eigen::Index>(i)] = modes_[i].energy;
  return out;
}

Eigen::ArrayXd Molecule::huang_rhys() const {
  Eigen::ArrayXd out(static_cast<Eigen::Index>(modes_.size()));
  for (std::size_t i = 0; i < modes_.size(); ++i) out[static_cast<Eigen::Index>(i)] = modes_[i].huang_rhys;
  return out;
}

Molecule Molecule::from_arrays(std::string name, double e00, TransitionKind transition,
                               const Eigen::Ref<const Eigen::ArrayXd>& energies,
                               const Eigen::Ref<const Eigen::ArrayXd>& huang_rhys) {
  if (energies.size() != huang_rhys.size()) {
    throw InvalidInput("energy and Huang-Rhys arrays differ in length");
  }
  std::vector<Mode> modes;
  modes.reserve(static_cast<std::size_t>(energies.size()));
  for (Eigen::Index i = 0; i < energies.size(); ++i) {
    modes.push_back({static_cast<std::size_t>(i) + 1, energies[i], huang_rhys[i]});
  }
  return Molecule(std::move(name), e00, transition, std::move(modes));
}

double hr_from_gradient(const GradientInput& g) {
  if (!std::isfinite(g.omega) || g.omega <= 0.0) {
    throw InvalidInput("hr_from_gradient: omega must be finite and > 0");
  }
  if (!std::isfinite(g.gradient)) {
    throw InvalidInput("hr_from_gradient: gradient must be finite");
  }
  // Kept as two steps so the displacement convention is a one-line change.
  const double displacement = g.gradient / g.omega;
  return g.omega * displacement * displacement / 2.0;
}

std::string ValidationReport::describe() const {
  std::ostringstream os;
  auto emit = [&os](const char* level, const ValidationIssue& issue) {
    os << level << ": ";
    if (issue.mode_index != 0) os << "mode " << issue.mode_index << ": ";
    os << issue.field << ": " << issue.message << '\n';
  };
  for (const auto& e : errors) emit("error", e);
  for (const auto& w : warnings) emit("warning", w);
  return os.str();
}

ValidationReport validate_molecule(const Molecule& m, double prune_threshold) {
  ValidationReport report;
  if (!std::isfinite(m.e00()) || m.e00() < 0.0) {
    report.errors.push_back({0, "e00", "e00 >= 0 and finite required"});
  }
  if (auto atoms = m.atom_count()) {
    if (*atoms <= 0) {
      report.errors.push_back({0, "atom_count", "atom_count must be positive"});
    } else if (static_cast<long>(m.mode_count()) > 3L * *atoms - 5L) {
      report.errors.push_back(
          {0, "atom_count", "number of modes exceeds 3M - 5 for M = " + std::to_string(*atoms)});
    }
  }
  if (m.modes().empty()) {
    report.warnings.push_back({0, "modes", "no modes: spectrum is the 0-0 line only"});
  }
  for (std::size_t i = 0; i < m.modes().size(); ++i) {
    const Mode& mode = m.modes()[i];
    const std::size_t label = mode.index != 0 ? mode.index : i + 1;
    if (mode.index != i + 1) {
      report.errors.push_back(
          {label, "index", "mode indices must be unique and contiguous from 1"});
    }
    if (!std::isfinite(mode.energy) || mode.energy <= 0.0) {
      report.errors.push_back({label, "energy", "energy > 0 required"});
    }
    if (!std::isfinite(mode.huang_rhys) || mode.huang_rhys < 0.0) {
      report.errors.push_back({label, "huang_rhys", "huang_rhys >= 0 and finite required"});
    } else if (mode.huang_rhys <= prune_threshold) {
      report.warnings.push_back({label, "huang_rhys", "at or below pruning threshold"});
    }
  }
  return report;
}

void require_valid(const Molecule& m) {
  auto report = validate_molecule(m);
  if (!report.ok()) {
    throw InvalidInput("invalid molecule '" + m.name() + "':\n" + report.describe());
  }
}

Molecule prune_modes(const Molecule& m, double threshold) {
  if (!(threshold >= 0.0)) throw InvalidInput("prune_modes: threshold must be >= 0");
  if (threshold == 0.0) return m;  // no-op, S = 0 modes included
  std::vector<Mode> kept;
  for (const Mode& mode : m.modes()) {
    if (mode.huang_rhys > threshold) kept.push_back({kept.size() + 1, mode.energy, mode.huang_rhys});
  }
  return Molecule(m.name(), m.e00(), m.transition(), std::move(kept), m.atom_count());
}

const char* to_string(TransitionKind kind) noexcept {
  return kind == TransitionKind::absorption ? "absorption" : "emission";
}

}  // namespace vibronic
