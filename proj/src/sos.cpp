#include "vibronic/sos.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <numeric>
#include <string>

namespace vibronic {

namespace {

void require_compatible(const Molecule& m, const VibrationalConfiguration& c) {
  if (c.size() != m.mode_count()) {
    throw InvalidInput("configuration has " + std::to_string(c.size()) + " entries, molecule has " +
                       std::to_string(m.mode_count()) + " modes");
  }
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Sorts by energy (stable) and sums runs of bit-equal energies.
void compact_exact(std::vector<Stick>& sticks) {
  std::stable_sort(sticks.begin(), sticks.end(),
                   [](const Stick& a, const Stick& b) { return a.energy < b.energy; });
  std::size_t out = 0;
  for (std::size_t i = 0; i < sticks.size(); ++i) {
    if (out > 0 && sticks[out - 1].energy == sticks[i].energy) {
      sticks[out - 1].intensity += sticks[i].intensity;
    } else {
      sticks[out++] = sticks[i];
    }
  }
  sticks.resize(out);
}

}  // namespace

double mode_weight(double s, unsigned j, unsigned max_quanta, TailRule tail) {
  if (j > max_quanta) return 0.0;
  if (tail == TailRule::clip && j == max_quanta) return poisson_upper_tail(s, j);
  return fc_factor_1d(s, j);
}

double fc_factor_config(const Molecule& m, const VibrationalConfiguration& c) {
  require_compatible(m, c);
  double product = 1.0;
  for (std::size_t i = 0; i < c.size(); ++i) product *= fc_factor_1d(m.modes()[i].huang_rhys, c[i]);
  return product;
}

double transition_energy(const Molecule& m, const VibrationalConfiguration& c) {
  require_compatible(m, c);
  double shift = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) shift += m.modes()[i].energy * c[i];
  return m.e00() + m.sign() * shift;
}

std::optional<std::uint64_t> exact_state_count(std::size_t n_modes, unsigned k) {
  const std::uint64_t base = std::uint64_t{k} + 1;
  std::uint64_t count = 1;
  for (std::size_t i = 0; i < n_modes; ++i) {
    if (count > std::numeric_limits<std::uint64_t>::max() / base) return std::nullopt;
    count *= base;
  }
  return count;
}

std::uint64_t state_count(std::size_t n_modes, unsigned k, std::uint64_t budget) {
  auto count = exact_state_count(n_modes, k);
  if (!count) throw BudgetExceeded(std::numeric_limits<std::uint64_t>::max(), true, budget);
  if (*count > budget) throw BudgetExceeded(*count, false, budget);
  return *count;
}

BudgetExceeded::BudgetExceeded(std::uint64_t count, bool saturated, std::uint64_t budget)
    : std::runtime_error(
          saturated ? "state count (1+K)^N overflows 64 bits; exceeds enumeration budget " +
                          std::to_string(budget) + "; use the sampler instead"
                    : "state count " + std::to_string(count) + " exceeds enumeration budget " +
                          std::to_string(budget) + "; use the sampler instead"),
      count_(count),
      saturated_(saturated),
      budget_(budget) {}

ConfigurationEnumerator::ConfigurationEnumerator(const Molecule& m, const SosConfig& cfg)
    : n_(m.mode_count()),
      k_(cfg.max_quanta),
      cutoff_(cfg.fc_prune.value_or(0.0)),
      prune_(cfg.fc_prune.has_value() && *cfg.fc_prune > 0.0),
      e00_(m.e00()),
      sign_(m.sign()),
      quanta_(n_, 0),
      prefix_fc_(n_ + 1, 1.0),
      prefix_energy_(n_ + 1, 0.0) {
  if (cfg.fc_prune && !(*cfg.fc_prune >= 0.0)) throw InvalidInput("fc_prune must be >= 0");
  state_count(n_, k_, cfg.budget);
  mode_energy_.reserve(n_);
  weights_.reserve(n_ * (k_ + 1));
  for (const Mode& mode : m.modes()) {
    mode_energy_.push_back(mode.energy);
    for (unsigned j = 0; j <= k_; ++j) weights_.push_back(mode_weight(mode.huang_rhys, j, k_, cfg.tail));
  }
}

bool ConfigurationEnumerator::next() {
  if (done_) return false;
  if (n_ == 0) {
    done_ = started_;
    started_ = true;
    return !done_;
  }

  std::ptrdiff_t level;
  if (!started_) {
    started_ = true;
    level = 0;
    quanta_[0] = 0;
  } else {
    level = static_cast<std::ptrdiff_t>(n_) - 1;
    ++quanta_[static_cast<std::size_t>(level)];
  }

  const std::size_t stride = k_ + 1;
  while (true) {
    auto lv = static_cast<std::size_t>(level);
    if (quanta_[lv] > k_) {
      quanta_[lv] = 0;
      if (level == 0) {
        done_ = true;
        return false;
      }
      --level;
      ++quanta_[static_cast<std::size_t>(level)];
      continue;
    }
    const double partial = prefix_fc_[lv] * weights_[lv * stride + quanta_[lv]];
    if (prune_ && partial < cutoff_) {
      ++quanta_[lv];
      continue;
    }
    prefix_fc_[lv + 1] = partial;
    prefix_energy_[lv + 1] = prefix_energy_[lv] + mode_energy_[lv] * quanta_[lv];
    if (lv + 1 == n_) return true;
    ++level;
    quanta_[lv + 1] = 0;
  }
}

LineSpectrum build_reference_spectrum(const Molecule& m, const SosConfig& cfg) {
  require_valid(m);
  if (!(cfg.merge_tolerance >= 0.0)) throw InvalidInput("merge_tolerance must be >= 0");
  state_count(m.mode_count(), cfg.max_quanta, cfg.budget);

  // Canonical mode order makes the result independent of input ordering.
  // Modes with S = 0 only ever contribute a factor of exactly 1.
  std::vector<Mode> modes;
  for (const Mode& mode : m.modes()) {
    if (mode.huang_rhys > 0.0) modes.push_back(mode);
  }
  std::stable_sort(modes.begin(), modes.end(), [](const Mode& a, const Mode& b) {
    if (a.energy != b.energy) return a.energy < b.energy;
    return a.huang_rhys < b.huang_rhys;
  });
  for (std::size_t i = 0; i < modes.size(); ++i) modes[i].index = i + 1;
  const Molecule canonical(m.name(), m.e00(), m.transition(), std::move(modes));

  constexpr std::size_t kCompactEvery = std::size_t{1} << 22;
  std::size_t next_compact = kCompactEvery;
  std::vector<Stick> sticks;
  std::uint64_t enumerated = 0;
  ConfigurationEnumerator it(canonical, cfg);
  while (it.next()) {
    ++enumerated;
    if (it.fc() == 0.0) continue;
    sticks.push_back({it.energy(), it.fc()});
    if (sticks.size() >= next_compact) {
      compact_exact(sticks);
      next_compact = std::max(kCompactEvery, 2 * sticks.size());
    }
  }
  compact_exact(sticks);

  // Chain-merge neighbours within the tolerance.
  std::vector<Stick> merged;
  merged.reserve(sticks.size());
  double run_last = 0.0;
  for (const Stick& s : sticks) {
    if (!merged.empty() && s.energy - run_last <= cfg.merge_tolerance) {
      merged.back().intensity += s.intensity;
    } else {
      merged.push_back(s);
    }
    run_last = s.energy;
  }
  for (auto& s : merged) s.energy = canonical_energy(s.energy);

  LineSpectrum out;
  out.sticks = std::move(merged);
  out.zero_zero = canonical_energy(m.e00());
  const double raw_total = out.total_intensity();
  out.provenance = {
      {"source", "sum-over-states"},
      {"molecule", m.name()},
      {"modes", std::to_string(m.mode_count())},
      {"e00_cm1", format_double(m.e00())},
      {"max_quanta", std::to_string(cfg.max_quanta)},
      {"tail", to_string(cfg.tail)},
      {"fc_prune", cfg.fc_prune ? format_double(*cfg.fc_prune) : "off"},
      {"configurations", std::to_string(enumerated)},
      {"raw_total", format_double(raw_total)},
  };
  if (cfg.normalization != Normalization::raw) {
    out = normalize(std::move(out), cfg.normalization);
  }
  out.provenance.push_back({"normalization", to_string(cfg.normalization)});
  return out;
}

const char* to_string(TailRule rule) noexcept {
  return rule == TailRule::truncate ? "truncate" : "clip";
}

}  // namespace vibronic
