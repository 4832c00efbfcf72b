#include "vibronic/sampler.hpp"

#include "vibronic/errors.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <bit>
#include <cstdio>
#include <limits>
#include <string>
#include <thread>

namespace vibronic {

namespace {

constexpr std::size_t kMaxCappedThresholds = 4;

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Open-addressing histogram over the bit patterns of event energies.
class EnergyHistogram {
 public:
  EnergyHistogram() : keys_(kInitial, kEmpty), counts_(kInitial, 0) {}

  void add(double energy, std::uint64_t n = 1) {
    const auto bits = std::bit_cast<std::uint64_t>(energy);
    std::size_t slot = (bits * 0x9E3779B97F4A7C15ULL) >> shift_;
    while (keys_[slot] != bits) {
      if (keys_[slot] == kEmpty) {
        if (2 * (size_ + 1) > keys_.size()) {
          grow();
          add(energy, n);
          return;
        }
        keys_[slot] = bits;
        ++size_;
        break;
      }
      slot = (slot + 1) & (keys_.size() - 1);
    }
    counts_[slot] += n;
  }

  template <typename F>
  void for_each(F&& f) const {
    for (std::size_t i = 0; i < keys_.size(); ++i) {
      if (keys_[i] != kEmpty) f(std::bit_cast<double>(keys_[i]), counts_[i]);
    }
  }

 private:
  static constexpr std::size_t kInitial = 1024;
  static constexpr int kInitialShift = 64 - 10;
  // A NaN payload no arithmetic result produces.
  static constexpr std::uint64_t kEmpty = 0x7FF4DEADBEEF0001ULL;

  void grow() {
    EnergyHistogram bigger;
    bigger.keys_.assign(keys_.size() * 2, kEmpty);
    bigger.counts_.assign(keys_.size() * 2, 0);
    bigger.shift_ = shift_ - 1;
    for_each([&bigger](double e, std::uint64_t c) { bigger.add(e, c); });
    *this = std::move(bigger);
  }

  std::vector<std::uint64_t> keys_;
  std::vector<std::uint64_t> counts_;
  int shift_ = kInitialShift;
  std::size_t size_ = 0;
};

unsigned resolve_threads(unsigned requested, std::uint64_t chunks) {
  unsigned n = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
  return static_cast<unsigned>(std::min<std::uint64_t>(n, std::max<std::uint64_t>(chunks, 1)));
}

// Runs body(chunk_index, worker) over all chunks on a pool of workers.
template <typename Body>
void for_each_chunk(std::uint64_t chunks, unsigned workers, Body&& body) {
  if (workers <= 1) {
    for (std::uint64_t c = 0; c < chunks; ++c) body(c, 0u);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::uint64_t c = next++; c < chunks; c = next++) body(c, w);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace

void DetectorModel::validate() const {
  if (!(efficiency > 0.0 && efficiency <= 1.0)) {
    throw InvalidInput("detector efficiency must lie in (0, 1]");
  }
  if (!std::isfinite(dark_mean) || dark_mean < 0.0) {
    throw InvalidInput("detector dark_mean must be finite and >= 0");
  }
}

void SamplerConfig::validate() const {
  if (events < 1) throw InvalidInput("events must be >= 1");
  if (chunk_size < 1) throw InvalidInput("chunk_size must be >= 1");
}

LineSpectrum SampledSpectrum::to_line_spectrum(Normalization mode) const {
  LineSpectrum out;
  out.sticks.reserve(counts.size());
  for (const auto& [energy, count] : counts) {
    out.sticks.push_back({energy, static_cast<double>(count)});
  }
  out.zero_zero = zero_zero;
  out.provenance = provenance;
  if (mode != Normalization::raw) out = normalize(std::move(out), mode);
  out.provenance.push_back({"normalization", to_string(mode)});
  return out;
}

unsigned apply_detector(unsigned photons, const DetectorModel& d, CounterRng& rng,
                        std::optional<unsigned> max_quanta) {
  unsigned n = photons;
  if (d.efficiency < 1.0) {
    unsigned kept = 0;
    for (unsigned i = 0; i < photons; ++i) kept += rng.uniform() < d.efficiency ? 1u : 0u;
    n = kept;
  }
  if (d.dark_mean > 0.0) n += poisson_draw(d.dark_mean, rng);
  if (d.threshold_mode && n > 1) n = 1;
  if (max_quanta && n > *max_quanta) n = *max_quanta;
  return n;
}

ModeSampler::ModeSampler(double huang_rhys, const DetectorModel& d,
                         std::optional<unsigned> max_quanta, ThinningMethod thinning)
    : signal_(thinning == ThinningMethod::direct ? d.efficiency * huang_rhys : huang_rhys),
      dark_(d.dark_mean),
      efficiency_(d.efficiency),
      per_photon_(thinning == ThinningMethod::per_photon && d.efficiency < 1.0),
      has_dark_(d.dark_mean > 0.0),
      threshold_(d.threshold_mode),
      cap_(max_quanta.value_or(std::numeric_limits<unsigned>::max())) {
  d.validate();
  const unsigned effective_cap = threshold_ ? std::min(cap_, 1u) : cap_;
  const auto& cdf = signal_.cdf_table();
  if (!per_photon_ && !has_dark_ && effective_cap >= 1 && effective_cap <= kMaxCappedThresholds &&
      effective_cap < cdf.size()) {
    capped_ = effective_cap;
  }
}

std::vector<std::uint32_t> sample_mode(double huang_rhys, std::size_t mode_index,
                                       const SamplerConfig& cfg, const DetectorModel& d) {
  cfg.validate();
  const ModeSampler draw(huang_rhys, d, cfg.max_quanta, cfg.thinning);
  std::vector<std::uint32_t> out(cfg.events, 0);
  if (draw.always_zero()) return out;
  const std::uint64_t chunks = (cfg.events + cfg.chunk_size - 1) / cfg.chunk_size;
  for_each_chunk(chunks, resolve_threads(cfg.threads, chunks), [&](std::uint64_t c, unsigned) {
    CounterRng rng(stream_key(cfg.seed, mode_index, c));
    const std::uint64_t begin = c * cfg.chunk_size;
    const std::uint64_t end = std::min(cfg.events, begin + cfg.chunk_size);
    for (std::uint64_t p = begin; p < end; ++p) out[p] = draw(rng);
  });
  return out;
}

SampledSpectrum sample_spectrum(const Molecule& m, const SamplerConfig& cfg,
                                const DetectorModel& d) {
  require_valid(m);
  cfg.validate();
  d.validate();

  struct ActiveMode {
    std::size_t index;
    double energy;
    ModeSampler draw;
  };
  std::vector<ActiveMode> active;
  for (const Mode& mode : m.modes()) {
    ModeSampler draw(mode.huang_rhys, d, cfg.max_quanta, cfg.thinning);
    if (!draw.always_zero()) active.push_back({mode.index, mode.energy, draw});
  }

  const std::uint64_t chunks = (cfg.events + cfg.chunk_size - 1) / cfg.chunk_size;
  const unsigned workers = resolve_threads(cfg.threads, chunks);
  std::vector<EnergyHistogram> partial(workers);
  std::vector<std::vector<double>> shift(workers);
  const double e00 = m.e00();
  const double sign = m.sign();

  for_each_chunk(chunks, workers, [&](std::uint64_t c, unsigned w) {
    const std::uint64_t begin = c * cfg.chunk_size;
    const auto len = static_cast<std::size_t>(std::min(cfg.events, begin + cfg.chunk_size) - begin);
    auto& acc = shift[w];
    acc.assign(len, 0.0);
    for (const ActiveMode& mode : active) {
      CounterRng rng(stream_key(cfg.seed, mode.index, c));
      const std::size_t thresholds = mode.draw.capped_thresholds();
      if (thresholds != 0) {
        // Branch-free inversion for small caps; same uniforms, same values.
        std::array<double, kMaxCappedThresholds> cdf;
        cdf.fill(std::numeric_limits<double>::infinity());
        std::copy_n(mode.draw.thresholds(), thresholds, cdf.begin());
        for (std::size_t p = 0; p < len; ++p) {
          const double u = rng.uniform();
          unsigned j = 0;
          for (std::size_t t = 0; t < kMaxCappedThresholds; ++t) j += u >= cdf[t];
          acc[p] += mode.energy * j;
        }
      } else {
        for (std::size_t p = 0; p < len; ++p) acc[p] += mode.energy * mode.draw(rng);
      }
    }
    auto& hist = partial[w];
    for (std::size_t p = 0; p < len; ++p) hist.add(e00 + sign * acc[p]);
  });

  SampledSpectrum out;
  for (const auto& hist : partial) {
    hist.for_each([&out](double energy, std::uint64_t count) {
      out.counts[canonical_energy(energy)] += count;
    });
  }
  out.total_events = cfg.events;
  out.zero_zero = canonical_energy(e00);
  out.provenance = {
      {"source", "poisson-sampler"},
      {"molecule", m.name()},
      {"modes", std::to_string(m.mode_count())},
      {"e00_cm1", format_double(m.e00())},
      {"generator", kGeneratorId},
      {"seed", std::to_string(cfg.seed)},
      {"events", std::to_string(cfg.events)},
      {"chunk_size", std::to_string(cfg.chunk_size)},
      {"max_quanta", cfg.max_quanta ? std::to_string(*cfg.max_quanta) : "unbounded"},
      {"efficiency", format_double(d.efficiency)},
      {"dark_mean", format_double(d.dark_mean)},
      {"threshold", d.threshold_mode ? "on" : "off"},
      {"thinning", cfg.thinning == ThinningMethod::direct ? "direct" : "per_photon"},
  };
  return out;
}

}  // namespace vibronic
