#pragma once

#include "vibronic/errors.hpp"
#include "vibronic/model.hpp"
#include "vibronic/spectrum.hpp"

#include <cmath>
#include <cstdint>
#include <optional>

namespace vibronic {

/// Refuse to enumerate more configurations than this unless told otherwise.
inline constexpr std::uint64_t kDefaultEnumerationBudget = 100'000'000;

/// How the per-mode distribution is cut at the maximal quantum number K.
///  - truncate: quanta above K are discarded (classic sum-over-states).
///  - clip: the probability of j >= K is lumped onto j = K, which is what a
///    sampler capping its draws at K converges to.
enum class TailRule { truncate, clip };

struct SosConfig {
  unsigned max_quanta = 1;
  /// Partial-product cutoff; subtrees below it are skipped.
  std::optional<double> fc_prune;
  double merge_tolerance = 1e-6;
  std::uint64_t budget = kDefaultEnumerationBudget;
  TailRule tail = TailRule::truncate;
  Normalization normalization = Normalization::raw;
};

/// One-dimensional Franck–Condon factor |<0|j>|^2 = s^j e^-s / j!.
///
/// Evaluated by a running product for small j and in log space above
/// j = 20, where s^j and j! overflow independently.
template <typename Scalar>
Scalar fc_factor_1d(Scalar s, unsigned j) {
  using std::exp;
  using std::isfinite;
  using std::lgamma;
  using std::log;
  if (!(s >= Scalar(0)) || !isfinite(s)) {
    throw InvalidInput("fc_factor_1d: Huang-Rhys factor must be finite and >= 0");
  }
  if (j == 0) return exp(-s);
  if (s == Scalar(0)) return Scalar(0);
  if (j <= 20) {
    Scalar term(1);
    for (unsigned k = 1; k <= j; ++k) term *= s / Scalar(k);
    return term * exp(-s);
  }
  return exp(Scalar(j) * log(s) - s - lgamma(Scalar(j) + Scalar(1)));
}

/// Probability that a Poisson(s) variable is >= k.
template <typename Scalar>
Scalar poisson_upper_tail(Scalar s, unsigned k) {
  if (k == 0) return Scalar(1);
  if (s == Scalar(0)) return Scalar(0);
  // Summed upward from k so small tails keep full relative precision.
  Scalar term = fc_factor_1d(s, k);
  Scalar sum(0);
  for (unsigned j = k;; ++j) {
    sum += term;
    term *= s / Scalar(j + 1);
    if (Scalar(j) > s && term <= sum * Scalar(1e-18)) break;
  }
  return sum > Scalar(1) ? Scalar(1) : sum;
}

/// Per-mode weight of quantum number j under a cutoff and tail rule.
double mode_weight(double s, unsigned j, unsigned max_quanta, TailRule tail);

/// Product of one-dimensional factors over every mode.
double fc_factor_config(const Molecule& m, const VibrationalConfiguration& c);

/// E00 +/- sum_i E_i j_i, with the sign set by the transition kind.
double transition_energy(const Molecule& m, const VibrationalConfiguration& c);

/// (1 + k)^n, or nullopt when it does not fit in 64 bits.
std::optional<std::uint64_t> exact_state_count(std::size_t n_modes, unsigned k);

/// (1 + k)^n; throws BudgetExceeded above the budget.
std::uint64_t state_count(std::size_t n_modes, unsigned k,
                          std::uint64_t budget = kDefaultEnumerationBudget);

/// Pull-style stream over {0..K}^N in mixed-radix order, last mode fastest.
///
///   ConfigurationEnumerator it(molecule, cfg);
///   while (it.next()) use(it.configuration(), it.fc(), it.energy());
///
/// With cfg.fc_prune set, any prefix whose partial product falls below the
/// cutoff is skipped together with all of its completions.
class ConfigurationEnumerator {
 public:
  ConfigurationEnumerator(const Molecule& m, const SosConfig& cfg);

  bool next();

  const VibrationalConfiguration& configuration() const noexcept { return quanta_; }
  double fc() const noexcept { return prefix_fc_.back(); }
  double energy() const noexcept { return e00_ + sign_ * prefix_energy_.back(); }

 private:
  std::size_t n_;
  unsigned k_;
  double cutoff_;
  bool prune_;
  double e00_;
  double sign_;
  std::vector<double> mode_energy_;
  std::vector<double> weights_;  // n_ x (k_ + 1), row per mode
  VibrationalConfiguration quanta_;
  std::vector<double> prefix_fc_;
  std::vector<double> prefix_energy_;
  bool started_ = false;
  bool done_ = false;
};

/// Exact stick spectrum from full enumeration. Degenerate energies within
/// merge_tolerance are summed; zero-intensity configurations are dropped.
LineSpectrum build_reference_spectrum(const Molecule& m, const SosConfig& cfg);

const char* to_string(TailRule rule) noexcept;

}  // namespace vibronic
