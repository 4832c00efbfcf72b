#include "vibronic/analysis.hpp"

#include "vibronic/errors.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace vibronic {

namespace {

void require_nonzero(const LineSpectrum& s, const char* which) {
  if (s.empty()) throw InvalidInput(std::string("fidelity: spectrum ") + which + " is empty");
  bool any = false;
  for (const auto& stick : s.sticks) {
    if (!(stick.intensity >= 0.0) || !std::isfinite(stick.intensity)) {
      throw InvalidInput(std::string("fidelity: spectrum ") + which + " has invalid intensity");
    }
    any = any || stick.intensity > 0.0;
  }
  if (!any) throw InvalidInput(std::string("fidelity: spectrum ") + which + " is all zero");
}

}  // namespace

AlignedPair align(const LineSpectrum& p, const LineSpectrum& q) {
  std::map<long long, std::pair<double, double>> lattice;
  for (const auto& s : p.sticks) lattice[energy_key(s.energy)].first += s.intensity;
  for (const auto& s : q.sticks) lattice[energy_key(s.energy)].second += s.intensity;
  AlignedPair out;
  const auto n = static_cast<Eigen::Index>(lattice.size());
  out.energy.resize(n);
  out.p.resize(n);
  out.q.resize(n);
  Eigen::Index i = 0;
  for (const auto& [key, value] : lattice) {
    out.energy[i] = static_cast<double>(key) * kEnergyQuantum;
    out.p[i] = value.first;
    out.q[i] = value.second;
    ++i;
  }
  return out;
}

double fidelity(const LineSpectrum& p, const LineSpectrum& q, FidelityNorm norm) {
  require_nonzero(p, "p");
  require_nonzero(q, "q");
  const AlignedPair a = align(p, q);
  double f;
  if (norm == FidelityNorm::l2) {
    f = a.p.normalized().dot(a.q.normalized());
  } else {
    const Eigen::ArrayXd pp = a.p.array() / a.p.sum();
    const Eigen::ArrayXd qq = a.q.array() / a.q.sum();
    f = (pp * qq).sqrt().sum();
  }
  return std::clamp(f, 0.0, 1.0);
}

double fidelity(const SampledSpectrum& p, const LineSpectrum& q, FidelityNorm norm) {
  return fidelity(p.to_line_spectrum(), q, norm);
}

void BroadeningKernel::validate() const {
  if (!(fwhm > 0.0) || !std::isfinite(fwhm)) throw InvalidInput("kernel fwhm must be > 0");
}

void EnergyGrid::validate() const {
  if (!std::isfinite(start) || !std::isfinite(stop) || !std::isfinite(step)) {
    throw GridError("grid bounds must be finite");
  }
  if (!(stop > start)) throw GridError("grid stop must exceed start");
  if (!(step > 0.0)) throw GridError("grid step must be > 0");
  if ((stop - start) / step > kMaxPoints) throw GridError("grid has more than 1e7 points");
}

Eigen::Index EnergyGrid::size() const {
  return static_cast<Eigen::Index>(std::floor((stop - start) / step + 1e-9)) + 1;
}

Eigen::ArrayXd EnergyGrid::points() const {
  validate();
  const Eigen::Index n = size();
  return start + step * Eigen::ArrayXd::LinSpaced(n, 0.0, static_cast<double>(n - 1));
}

EnergyGrid EnergyGrid::covering(const LineSpectrum& s, const BroadeningKernel& k) {
  k.validate();
  double lo = s.zero_zero.value_or(0.0);
  double hi = lo;
  if (!s.empty()) {
    lo = s.sticks.front().energy;
    hi = s.sticks.back().energy;
  }
  const double margin = 10.0 * k.fwhm;
  return {lo - margin, hi + margin, k.fwhm / 20.0};
}

LineSpectrum GriddedSpectrum::to_line_spectrum() const {
  LineSpectrum out;
  out.sticks.reserve(static_cast<std::size_t>(energy.size()));
  for (Eigen::Index i = 0; i < energy.size(); ++i) out.sticks.push_back({energy[i], intensity[i]});
  return out;
}

GriddedSpectrum broaden(const LineSpectrum& s, const BroadeningKernel& k, const EnergyGrid& g) {
  k.validate();
  g.validate();
  GriddedSpectrum out;
  out.energy = g.points();
  out.intensity = Eigen::ArrayXd::Zero(out.energy.size());
  const double margin = 5.0 * k.fwhm;
  // exp(-x^2 / 2 sigma^2) underflows to 0 beyond ~39 sigma.
  const double reach = k.shape == KernelShape::gaussian ? 40.0 * gaussian_sigma(k.fwhm)
                                                        : std::numeric_limits<double>::infinity();
  for (const auto& stick : s.sticks) {
    if (stick.energy - margin < g.start || stick.energy + margin > g.stop) out.margin_ok = false;
    if (stick.intensity == 0.0) continue;
    Eigen::Index lo = 0, hi = out.energy.size();
    if (std::isfinite(reach)) {
      lo = std::max<Eigen::Index>(0, static_cast<Eigen::Index>(std::floor((stick.energy - reach - g.start) / g.step)));
      hi = std::min<Eigen::Index>(hi, static_cast<Eigen::Index>(std::ceil((stick.energy + reach - g.start) / g.step)) + 1);
      if (lo >= hi) continue;
    }
    auto window = out.intensity.segment(lo, hi - lo);
    window += stick.intensity * kernel_profile(k, out.energy.segment(lo, hi - lo) - stick.energy);
  }
  return out;
}

double trapezoid_area(const GriddedSpectrum& g) {
  const Eigen::Index n = g.energy.size();
  if (n < 2) return 0.0;
  const Eigen::ArrayXd dx = g.energy.tail(n - 1) - g.energy.head(n - 1);
  return (0.5 * dx * (g.intensity.tail(n - 1) + g.intensity.head(n - 1))).sum();
}

ConvergenceReport convergence_study(const Molecule& m, const SamplerConfig& base,
                                    const DetectorModel& d,
                                    const std::vector<std::uint64_t>& event_counts,
                                    unsigned runs, const SosConfig& sos, FidelityNorm norm) {
  return convergence_study(m, build_reference_spectrum(m, sos), base, d, event_counts, runs, norm);
}

ConvergenceReport convergence_study(const Molecule& m, const LineSpectrum& reference,
                                    const SamplerConfig& base, const DetectorModel& d,
                                    const std::vector<std::uint64_t>& event_counts,
                                    unsigned runs, FidelityNorm norm) {
  if (runs < 1) throw InvalidInput("convergence_study: runs must be >= 1");
  ConvergenceReport report;
  report.runs = runs;
  for (const std::uint64_t events : event_counts) {
    std::vector<double> values;
    values.reserve(runs);
    for (unsigned r = 0; r < runs; ++r) {
      SamplerConfig cfg = base;
      cfg.events = events;
      cfg.seed = stream_key(base.seed, events, r);
      values.push_back(fidelity(sample_spectrum(m, cfg, d), reference, norm));
    }
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / runs;
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    report.event_counts.push_back(events);
    report.mean_fidelity.push_back(mean);
    report.std_fidelity.push_back(runs > 1 ? std::sqrt(var / (runs - 1)) : 0.0);
  }
  return report;
}

const char* to_string(KernelShape shape) noexcept {
  return shape == KernelShape::lorentzian ? "lorentzian" : "gaussian";
}

}  // namespace vibronic
