#pragma once

#include "vibronic/random.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace vibronic {

/// Exact Poisson sampler for a fixed mean.
///
/// Means up to kInversionLimit use inversion against a precomputed CDF table
/// (one comparison in the common small-S case). Larger means use Hörmann's
/// transformed rejection with squeeze (PTRS), which is also exact.
class PoissonSampler {
 public:
  static constexpr double kInversionLimit = 30.0;

  explicit PoissonSampler(double mean);

  double mean() const noexcept { return mean_; }

  /// Tabulated P(X <= j), empty outside the inversion range.
  const std::vector<double>& cdf_table() const noexcept { return cdf_; }

  unsigned operator()(CounterRng& rng) const {
    if (mean_ == 0.0) return 0;
    if (mean_ > kInversionLimit) return rejection(rng);
    const double u = rng.uniform();
    if (u < cdf_[0]) return 0;
    if (cdf_.size() <= 16) {
      for (unsigned j = 1; j < cdf_.size(); ++j) {
        if (u < cdf_[j]) return j;
      }
    } else {
      auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
      if (it != cdf_.end()) return static_cast<unsigned>(it - cdf_.begin());
    }
    return beyond_table(u);
  }

 private:
  unsigned beyond_table(double u) const;
  unsigned rejection(CounterRng& rng) const;

  double mean_;
  std::vector<double> cdf_;
  double last_pmf_ = 0.0;
  // PTRS constants
  double b_ = 0.0, a_ = 0.0, inv_alpha_ = 0.0, vr_ = 0.0, log_mean_ = 0.0;
};

/// One Poisson(mean) draw. Throws InvalidInput for negative or non-finite mean.
unsigned poisson_draw(double mean, CounterRng& rng);

}  // namespace vibronic
