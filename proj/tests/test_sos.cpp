#include "oracles.hpp"
#include "vibronic/sos.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

namespace vibronic {
namespace {

Molecule make(std::vector<double> energies, std::vector<double> s, double e00 = 0.0,
              TransitionKind kind = TransitionKind::absorption) {
  std::vector<Mode> modes;
  for (std::size_t i = 0; i < energies.size(); ++i) modes.push_back({0, energies[i], s[i]});
  return Molecule("test", e00, kind, std::move(modes));
}

Molecule random_molecule(std::mt19937_64& gen, std::size_t max_modes, double max_s) {
  std::uniform_int_distribution<std::size_t> n(1, max_modes);
  std::uniform_real_distribution<double> e(100.0, 3000.0), s(0.0, max_s);
  std::vector<double> energies, hr;
  for (std::size_t i = n(gen); i > 0; --i) {
    energies.push_back(std::round(e(gen) * 10.0) / 10.0);
    hr.push_back(s(gen));
  }
  return make(energies, hr, 15000.0);
}

TEST(FcFactor1d, Examples) {
  EXPECT_EQ(fc_factor_1d(0.0, 0), 1.0);
  EXPECT_EQ(fc_factor_1d(0.0, 3), 0.0);
  EXPECT_NEAR(fc_factor_1d(0.25, 1), 0.25 * std::exp(-0.25), 1e-15);
  EXPECT_NEAR(fc_factor_1d(0.25, 1), 0.194700, 5e-7);
  EXPECT_NEAR(fc_factor_1d(1.0, 1), std::exp(-1.0), 1e-15);
  EXPECT_THROW(fc_factor_1d(-0.1, 0), InvalidInput);
}

TEST(FcFactor1d, LogSpaceBranchIsContinuousAndFinite) {
  for (double s : {0.5, 5.0, 25.0, 80.0}) {
    for (unsigned j = 15; j <= 200; ++j) {
      const double f = fc_factor_1d(s, j);
      EXPECT_TRUE(std::isfinite(f));
      EXPECT_GE(f, 0.0);
      EXPECT_LE(f, 1.0);
      const double ref = test::poisson_pmf_lgamma(s, j);
      if (ref > 1e-300) {
        EXPECT_NEAR(f / ref, 1.0, 1e-11);
      }
    }
  }
}

TEST(FcFactor1d, FloatInstantiation) {
  EXPECT_NEAR(fc_factor_1d(0.25f, 1u), 0.194700f, 1e-6f);
}

TEST(FcFactorConfig, Examples) {
  const Molecule m = make({500.0, 1000.0, 1500.0}, {0.1, 0.2, 0.3});
  EXPECT_NEAR(fc_factor_config(m, {0, 0, 0}), std::exp(-0.6), 1e-15);
  EXPECT_EQ(fc_factor_config(make({500.0, 700.0}, {0.3, 0.0}), {1, 1}), 0.0);
  const double half = 0.5 * std::exp(-0.5);
  EXPECT_NEAR(fc_factor_config(make({500.0, 700.0}, {0.5, 0.5}), {1, 1}), half * half, 1e-15);
  EXPECT_NEAR(half * half, 0.091970, 5e-7);
  EXPECT_THROW(fc_factor_config(m, {0, 0}), InvalidInput);
}

TEST(TransitionEnergy, Examples) {
  const Molecule abs = make({500.0, 1000.0}, {0.1, 0.1}, 10000.0);
  EXPECT_EQ(transition_energy(abs, {1, 2}), 12500.0);
  EXPECT_EQ(transition_energy(abs, {0, 0}), 10000.0);
  const Molecule em = make({500.0}, {0.1}, 10000.0, TransitionKind::emission);
  EXPECT_EQ(transition_energy(em, {2}), 9000.0);
  EXPECT_THROW(transition_energy(abs, {1}), InvalidInput);
}

TEST(StateCount, Examples) {
  EXPECT_EQ(state_count(8, 1), 256u);
  EXPECT_EQ(state_count(18, 1), 262144u);
  EXPECT_EQ(state_count(0, 3), 1u);
  try {
    state_count(30, 3);
    FAIL() << "expected BudgetExceeded";
  } catch (const BudgetExceeded& e) {
    EXPECT_EQ(e.count(), std::uint64_t{1} << 60);
    EXPECT_FALSE(e.saturated());
  }
  EXPECT_FALSE(exact_state_count(200, 3).has_value());
  EXPECT_THROW(state_count(200, 3), BudgetExceeded);
  EXPECT_EQ(state_count(30, 3, std::uint64_t{1} << 60), std::uint64_t{1} << 60);
}

TEST(Enumerate, TwoModesK1InMixedRadixOrder) {
  SosConfig cfg;
  cfg.max_quanta = 1;
  ConfigurationEnumerator it(make({500.0, 700.0}, {0.1, 0.2}), cfg);
  std::vector<VibrationalConfiguration> seen;
  while (it.next()) seen.push_back(it.configuration());
  const std::vector<VibrationalConfiguration> expected{{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  EXPECT_EQ(seen, expected);
  EXPECT_FALSE(it.next());
}

TEST(Enumerate, StreamValuesMatchDirectEvaluation) {
  const Molecule m = make({500.0, 700.0, 1100.0}, {0.1, 0.6, 0.3}, 2000.0, TransitionKind::emission);
  SosConfig cfg;
  cfg.max_quanta = 3;
  ConfigurationEnumerator it(m, cfg);
  std::size_t n = 0;
  while (it.next()) {
    ++n;
    EXPECT_NEAR(it.fc(), fc_factor_config(m, it.configuration()), 1e-15);
    EXPECT_DOUBLE_EQ(it.energy(), transition_energy(m, it.configuration()));
  }
  EXPECT_EQ(n, 64u);
}

TEST(Enumerate, ZeroPruneDoesNotSkip) {
  SosConfig cfg;
  cfg.max_quanta = 2;
  cfg.fc_prune = 0.0;
  ConfigurationEnumerator it(make({500.0, 700.0, 900.0}, {0.1, 0.0, 0.3}), cfg);
  std::size_t n = 0;
  while (it.next()) ++n;
  EXPECT_EQ(n, state_count(3, 2));
}

TEST(Enumerate, PruneSkipsSmallSubtree) {
  SosConfig cfg;
  cfg.max_quanta = 1;
  cfg.fc_prune = 0.2;
  ConfigurationEnumerator it(make({500.0}, {0.25}), cfg);
  std::vector<VibrationalConfiguration> seen;
  while (it.next()) seen.push_back(it.configuration());
  ASSERT_EQ(seen.size(), 1u);
  EXPECT_EQ(seen[0], VibrationalConfiguration{0});
}

TEST(Enumerate, EmptyMoleculeYieldsOnce) {
  ConfigurationEnumerator it(make({}, {}, 123.0), SosConfig{});
  ASSERT_TRUE(it.next());
  EXPECT_EQ(it.fc(), 1.0);
  EXPECT_EQ(it.energy(), 123.0);
  EXPECT_FALSE(it.next());
}

TEST(Enumerate, RefusesOverBudget) {
  std::vector<double> e(30, 1000.0), s(30, 0.1);
  SosConfig cfg;
  cfg.max_quanta = 3;
  EXPECT_THROW(ConfigurationEnumerator(make(e, s), cfg), BudgetExceeded);
}

TEST(Reference, SingleModeExample) {
  SosConfig cfg;
  cfg.max_quanta = 1;
  const LineSpectrum s = build_reference_spectrum(make({500.0}, {0.25}), cfg);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s.sticks[0].energy, 0.0);
  EXPECT_NEAR(s.sticks[0].intensity, 0.778801, 5e-7);
  EXPECT_EQ(s.sticks[1].energy, 500.0);
  EXPECT_NEAR(s.sticks[1].intensity, 0.194700, 5e-7);
}

TEST(Reference, EmptyMoleculeIsZeroZeroLine) {
  const LineSpectrum s = build_reference_spectrum(make({}, {}, 16000.0), SosConfig{});
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s.sticks[0].energy, 16000.0);
  EXPECT_EQ(s.sticks[0].intensity, 1.0);
}

TEST(Reference, LargeCutoffApproachesUnitTotal) {
  SosConfig cfg;
  cfg.max_quanta = 25;
  const LineSpectrum s = build_reference_spectrum(make({500.0, 730.0}, {0.8, 1.7}), cfg);
  EXPECT_NEAR(s.total_intensity(), 1.0, 1e-12);
}

TEST(Reference, DegenerateEnergiesMerge) {
  SosConfig cfg;
  cfg.max_quanta = 2;
  // 2 x 500 coincides with 1 x 1000
  const Molecule m = make({500.0, 1000.0}, {0.3, 0.2});
  const LineSpectrum s = build_reference_spectrum(m, cfg);
  const std::vector<double> energies{0, 500, 1000, 1500, 2000, 2500, 3000};
  ASSERT_EQ(s.size(), energies.size());
  for (std::size_t i = 0; i < energies.size(); ++i) EXPECT_EQ(s.sticks[i].energy, energies[i]);
  EXPECT_NEAR(s.sticks[2].intensity,
              fc_factor_config(m, {2, 0}) + fc_factor_config(m, {0, 1}), 1e-15);
}

TEST(Reference, CompletenessAgainstPoissonCdf) {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 10; ++trial) {
    const Molecule m = random_molecule(gen, 6, 1.0);
    for (unsigned k : {1u, 2u, 3u, 6u}) {
      SosConfig cfg;
      cfg.max_quanta = k;
      double expected = 1.0;
      for (const Mode& mode : m.modes()) expected *= test::poisson_cdf(k, mode.huang_rhys);
      EXPECT_NEAR(build_reference_spectrum(m, cfg).total_intensity(), expected, 1e-10);
    }
  }
}

TEST(Reference, MatchesBruteForceOracleForBothTailRules) {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 8; ++trial) {
    const Molecule m = random_molecule(gen, 4, 1.5);
    for (TailRule tail : {TailRule::truncate, TailRule::clip}) {
      SosConfig cfg;
      cfg.max_quanta = 3;
      cfg.tail = tail;
      const LineSpectrum s = build_reference_spectrum(m, cfg);
      std::vector<double> e, hr;
      for (const Mode& mode : m.modes()) {
        e.push_back(mode.energy);
        hr.push_back(mode.huang_rhys);
      }
      const auto oracle =
          test::brute_force_spectrum(e, hr, 3, tail == TailRule::clip, m.e00(), kEnergyQuantum);
      ASSERT_EQ(s.size(), oracle.size());
      std::size_t i = 0;
      for (const auto& [key, value] : oracle) {
        EXPECT_EQ(energy_key(s.sticks[i].energy), key);
        EXPECT_NEAR(s.sticks[i].intensity, value, 1e-13);
        ++i;
      }
      if (tail == TailRule::clip) {
        EXPECT_NEAR(s.total_intensity(), 1.0, 1e-12);
      }
    }
  }
}

TEST(Reference, PermutationInvariantBitForBit) {
  std::mt19937_64 gen(9);
  for (int trial = 0; trial < 10; ++trial) {
    const Molecule m = random_molecule(gen, 6, 1.0);
    std::vector<Mode> shuffled = m.modes();
    std::shuffle(shuffled.begin(), shuffled.end(), gen);
    for (std::size_t i = 0; i < shuffled.size(); ++i) shuffled[i].index = i + 1;
    const Molecule p(m.name(), m.e00(), m.transition(), shuffled);
    SosConfig cfg;
    cfg.max_quanta = 2;
    EXPECT_EQ(build_reference_spectrum(m, cfg).sticks, build_reference_spectrum(p, cfg).sticks);
  }
}

TEST(Reference, ZeroHuangRhysModeChangesNothing) {
  const Molecule base = make({500.0, 820.0}, {0.3, 0.1}, 100.0);
  const Molecule extra = make({500.0, 820.0, 640.0}, {0.3, 0.1, 0.0}, 100.0);
  for (TailRule tail : {TailRule::truncate, TailRule::clip}) {
    SosConfig cfg;
    cfg.max_quanta = 3;
    cfg.tail = tail;
    EXPECT_EQ(build_reference_spectrum(base, cfg).sticks, build_reference_spectrum(extra, cfg).sticks);
  }
}

TEST(Reference, FcPruneIsSoundSubset) {
  std::mt19937_64 gen(21);
  for (int trial = 0; trial < 10; ++trial) {
    const Molecule m = random_molecule(gen, 5, 1.0);
    SosConfig full;
    full.max_quanta = 3;
    SosConfig zero = full;
    zero.fc_prune = 0.0;
    const LineSpectrum unpruned = build_reference_spectrum(m, full);
    EXPECT_EQ(build_reference_spectrum(m, zero).sticks, unpruned.sticks);

    SosConfig pruned_cfg = full;
    pruned_cfg.fc_prune = 1e-3;
    const LineSpectrum pruned = build_reference_spectrum(m, pruned_cfg);
    const double deficit = unpruned.total_intensity() - pruned.total_intensity();
    EXPECT_GE(deficit, -1e-15);
    EXPECT_LE(deficit, 1e-3 * static_cast<double>(state_count(m.mode_count(), 3)));
    for (const Stick& s : pruned.sticks) {
      auto it = std::find_if(unpruned.sticks.begin(), unpruned.sticks.end(),
                             [&](const Stick& u) { return u.energy == s.energy; });
      ASSERT_NE(it, unpruned.sticks.end());
      EXPECT_LE(s.intensity, it->intensity * (1.0 + 1e-12));
    }
  }
}

TEST(Reference, ZeroZeroLineDecreasesWithHuangRhys) {
  SosConfig cfg;
  cfg.max_quanta = 2;
  double previous = 2.0;
  for (double s : {0.0, 0.05, 0.1, 0.3, 0.6, 1.2}) {
    const LineSpectrum spec = build_reference_spectrum(make({400.0, 900.0}, {0.2, s}, 50.0), cfg);
    ASSERT_EQ(spec.sticks.front().energy, 50.0);
    EXPECT_LT(spec.sticks.front().intensity, previous);
    previous = spec.sticks.front().intensity;
  }
}

TEST(Reference, NormalizationRequested) {
  SosConfig cfg;
  cfg.max_quanta = 2;
  cfg.normalization = Normalization::unit_l1;
  const LineSpectrum s = build_reference_spectrum(make({500.0, 700.0}, {0.3, 0.4}), cfg);
  EXPECT_NEAR(s.total_intensity(), 1.0, 1e-12);
  EXPECT_EQ(s.normalization, Normalization::unit_l1);
  cfg.normalization = Normalization::unit_l2;
  const LineSpectrum l2 = build_reference_spectrum(make({500.0, 700.0}, {0.3, 0.4}), cfg);
  EXPECT_NEAR(l2.intensities().matrix().squaredNorm(), 1.0, 1e-12);
}

TEST(PoissonTail, MatchesOracle) {
  for (double s : {0.01, 0.25, 1.0, 4.0}) {
    for (unsigned k : {0u, 1u, 2u, 5u}) {
      const double expected = k == 0 ? 1.0 : boost::math::gamma_p(static_cast<double>(k), s);
      EXPECT_NEAR(poisson_upper_tail(s, k), expected, 1e-14);
    }
  }
}

}  // namespace
}  // namespace vibronic
