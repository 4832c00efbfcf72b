#include "vibronic/poisson.hpp"

#include "vibronic/errors.hpp"

namespace vibronic {

PoissonSampler::PoissonSampler(double mean) : mean_(mean) {
  if (!std::isfinite(mean) || mean < 0.0) {
    throw InvalidInput("Poisson mean must be finite and >= 0");
  }
  if (mean == 0.0) return;
  if (mean <= kInversionLimit) {
    double pmf = std::exp(-mean);
    double cdf = pmf;
    cdf_.push_back(cdf);
    for (unsigned j = 1;; ++j) {
      pmf *= mean / j;
      cdf += pmf;
      cdf_.push_back(cdf);
      if (j > mean && (pmf < 1e-17 || cdf >= 1.0)) break;
    }
    last_pmf_ = pmf;
    return;
  }
  const double smu = std::sqrt(mean);
  b_ = 0.931 + 2.53 * smu;
  a_ = -0.059 + 0.02483 * b_;
  inv_alpha_ = 1.1239 + 1.1328 / (b_ - 3.4);
  vr_ = 0.9277 - 3.6224 / (b_ - 2.0);
  log_mean_ = std::log(mean);
}

unsigned PoissonSampler::beyond_table(double u) const {
  // Continue the recurrence past the tabulated range; reached with
  // probability below 1e-16.
  auto j = static_cast<unsigned>(cdf_.size() - 1);
  double pmf = last_pmf_;
  double cdf = cdf_.back();
  while (u >= cdf) {
    ++j;
    pmf *= mean_ / j;
    if (pmf == 0.0) break;
    cdf += pmf;
  }
  return j;
}

unsigned PoissonSampler::rejection(CounterRng& rng) const {
  while (true) {
    const double u = rng.uniform() - 0.5;
    const double v = rng.uniform();
    const double us = 0.5 - std::fabs(u);
    const double k = std::floor((2.0 * a_ / us + b_) * u + mean_ + 0.43);
    if (us >= 0.07 && v <= vr_) return static_cast<unsigned>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha_) - std::log(a_ / (us * us) + b_) <=
        -mean_ + k * log_mean_ - std::lgamma(k + 1.0)) {
      return static_cast<unsigned>(k);
    }
  }
}

unsigned poisson_draw(double mean, CounterRng& rng) { return PoissonSampler(mean)(rng); }

}  // namespace vibronic
