// Command-line front end: sos, sample, fidelity, broaden, converge, hr.
#include "vibronic/analysis.hpp"
#include "vibronic/errors.hpp"
#include "vibronic/io.hpp"
#include "vibronic/sampler.hpp"
#include "vibronic/sos.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

namespace {

using namespace vibronic;

enum ExitCode : int { kOk = 0, kFailure = 1, kParse = 2, kBudget = 3, kGrid = 4 };

struct Globals {
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
};

std::uint64_t resolve_seed(const Globals& g) {
  if (g.seed) return *g.seed;
  if (const char* env = std::getenv("VIBRONIC_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw ParseError(std::string("VIBRONIC_SEED is not an unsigned integer: ") + env);
    }
  }
  std::random_device rd;
  return (std::uint64_t{rd()} << 32) ^ rd();
}

// Writes to --out when given, else stdout. Returns the stream for the summary.
std::ostream& emit(const std::string& out_path, const std::string& contents) {
  if (out_path.empty()) {
    std::cout << contents;
    return std::cerr;
  }
  io::write_text_file(out_path, contents);
  return std::cout;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

EnergyGrid parse_grid(const std::string& text) {
  EnergyGrid g;
  char c1 = 0, c2 = 0;
  std::istringstream is(text);
  if (!(is >> g.start >> c1 >> g.stop >> c2 >> g.step) || c1 != ':' || c2 != ':' || !is.eof()) {
    throw GridError("grid must be start:stop:step, got '" + text + "'");
  }
  g.validate();
  return g;
}

std::vector<std::uint64_t> parse_events_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::istringstream is(text);
  std::string item;
  while (std::getline(is, item, ',')) {
    try {
      std::size_t used = 0;
      // accept 1e5 style as well as plain integers
      const double v = std::stod(item, &used);
      if (used != item.size() || !(v >= 1) || v != std::floor(v)) throw std::invalid_argument(item);
      out.push_back(static_cast<std::uint64_t>(v));
    } catch (const std::exception&) {
      throw ParseError("bad entry in --events-list: '" + item + "'");
    }
  }
  if (out.empty()) throw ParseError("--events-list is empty");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Franck-Condon spectra in the linear coupling model: exact enumeration and Poisson sampling"};
  app.require_subcommand(1);
  Globals globals;
  app.add_option("--seed", globals.seed, "Random seed (default: $VIBRONIC_SEED or process entropy)");
  app.add_option("--threads", globals.threads, "Worker threads, 0 = all cores (results do not depend on it)");

  // sos
  auto* sos = app.add_subcommand("sos", "Exact sum-over-states stick spectrum");
  std::string sos_molecule, sos_out, sos_norm = "raw", sos_tail = "truncate";
  unsigned sos_k = 1;
  double sos_prune_s = kDefaultPruneThreshold;
  std::optional<double> sos_fc_prune;
  std::uint64_t sos_budget = kDefaultEnumerationBudget;
  sos->add_option("molecule", sos_molecule, "Molecule JSON file")->required();
  sos->add_option("--max-quanta,-K", sos_k, "Maximal vibrational quantum number per mode");
  sos->add_option("--prune-s", sos_prune_s, "Drop modes with Huang-Rhys factor <= this");
  sos->add_option("--fc-prune", sos_fc_prune, "Skip configurations whose partial FC product is below this");
  sos->add_option("--normalize", sos_norm, "raw|unit_l1|unit_l2|max_one|zero_zero_one");
  sos->add_option("--tail", sos_tail, "truncate|clip (lump j >= K onto K)");
  sos->add_option("--budget", sos_budget, "Maximal number of configurations to enumerate");
  sos->add_option("--out,-o", sos_out, "Output CSV (default stdout)");

  // sample
  auto* sample = app.add_subcommand("sample", "Poisson-sampled spectrum");
  std::string sample_molecule, sample_out, sample_norm = "unit_l1", sample_thinning = "direct";
  std::uint64_t sample_events = 100000, sample_chunk = std::uint64_t{1} << 16;
  std::optional<unsigned> sample_k;
  double sample_prune_s = 0.0;
  DetectorModel sample_detector;
  sample->add_option("molecule", sample_molecule, "Molecule JSON file")->required();
  sample->add_option("--events,-P", sample_events, "Events per mode");
  sample->add_option("--max-quanta,-K", sample_k, "Cap recorded counts at K (default unbounded)");
  sample->add_option("--efficiency", sample_detector.efficiency, "Detector efficiency in (0,1]");
  sample->add_option("--dark", sample_detector.dark_mean, "Mean dark counts per pulse");
  sample->add_flag("--threshold", sample_detector.threshold_mode, "Click detector: any count >= 1 records 1");
  sample->add_option("--thinning", sample_thinning, "direct|per_photon");
  sample->add_option("--chunk-size", sample_chunk, "Events per deterministic sub-stream");
  sample->add_option("--prune-s", sample_prune_s, "Drop modes with Huang-Rhys factor <= this");
  sample->add_option("--normalize", sample_norm, "raw|unit_l1|unit_l2|max_one|zero_zero_one");
  sample->add_option("--out,-o", sample_out, "Output CSV (default stdout)");

  // fidelity
  auto* fid = app.add_subcommand("fidelity", "Fidelity between two spectrum CSV files");
  std::string fid_a, fid_b, fid_norm = "l2";
  fid->add_option("a", fid_a, "First spectrum")->required();
  fid->add_option("b", fid_b, "Second spectrum")->required();
  fid->add_option("--norm", fid_norm, "l2|bhattacharyya");

  // broaden
  auto* br = app.add_subcommand("broaden", "Broaden a stick spectrum onto a grid");
  std::string br_in, br_out, br_svg, br_shape = "lorentzian", br_grid;
  double br_fwhm = 30.0;
  br->add_option("spectrum", br_in, "Stick spectrum CSV")->required();
  br->add_option("--shape", br_shape, "lorentzian|gaussian");
  br->add_option("--fwhm", br_fwhm, "Full width at half maximum, cm^-1");
  br->add_option("--grid", br_grid, "start:stop:step in cm^-1 (default: step fwhm/20, margin 10 fwhm)");
  br->add_option("--out,-o", br_out, "Output CSV (default stdout)");
  br->add_option("--svg", br_svg, "Also write an SVG line plot here");

  // converge
  auto* conv = app.add_subcommand("converge", "Fidelity versus event count against the exact reference");
  std::string conv_molecule, conv_out, conv_list = "100,1000,10000,100000", conv_tail = "truncate",
                                       conv_norm = "l2";
  unsigned conv_runs = 30, conv_k = 1;
  double conv_prune_s = kDefaultPruneThreshold;
  DetectorModel conv_detector;
  conv->add_option("molecule", conv_molecule, "Molecule JSON file")->required();
  conv->add_option("--events-list", conv_list, "Comma-separated event counts");
  conv->add_option("--runs", conv_runs, "Independent runs per event count");
  conv->add_option("--max-quanta,-K", conv_k, "Cutoff for both reference and samples");
  conv->add_option("--tail", conv_tail, "Reference tail rule: truncate|clip");
  conv->add_option("--prune-s", conv_prune_s, "Drop modes with Huang-Rhys factor <= this");
  conv->add_option("--efficiency", conv_detector.efficiency, "Detector efficiency in (0,1]");
  conv->add_option("--dark", conv_detector.dark_mean, "Mean dark counts per pulse");
  conv->add_flag("--threshold", conv_detector.threshold_mode, "Click detector");
  conv->add_option("--norm", conv_norm, "l2|bhattacharyya");
  conv->add_option("--out,-o", conv_out, "Output CSV (default stdout)");

  // hr
  auto* hr = app.add_subcommand("hr", "Huang-Rhys factor from frequency and gradient (hbar = 1)");
  double hr_omega = 0.0, hr_gradient = 0.0;
  hr->add_option("--omega", hr_omega, "Vibrational frequency")->required();
  hr->add_option("--gradient", hr_gradient, "Excited-state gradient along the mode")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kParse;
  }

  auto tail_rule = [](const std::string& s) {
    if (s == "truncate") return TailRule::truncate;
    if (s == "clip") return TailRule::clip;
    throw ParseError("--tail must be truncate or clip");
  };
  auto fidelity_norm = [](const std::string& s) {
    if (s == "l2") return FidelityNorm::l2;
    if (s == "bhattacharyya") return FidelityNorm::bhattacharyya;
    throw ParseError("--norm must be l2 or bhattacharyya");
  };
  auto normalization = [](const std::string& s) {
    try {
      return parse_normalization(s);
    } catch (const InvalidInput& e) {
      throw ParseError(e.what());
    }
  };

  try {
    if (*sos) {
      const auto t0 = std::chrono::steady_clock::now();
      const Molecule m = prune_modes(io::read_molecule_file(sos_molecule), sos_prune_s);
      SosConfig cfg;
      cfg.max_quanta = sos_k;
      cfg.fc_prune = sos_fc_prune;
      cfg.budget = sos_budget;
      cfg.tail = tail_rule(sos_tail);
      const Normalization norm = normalization(sos_norm);
      const std::uint64_t states = state_count(m.mode_count(), sos_k, sos_budget);
      LineSpectrum spectrum = build_reference_spectrum(m, cfg);
      const double raw_total = spectrum.total_intensity();
      if (norm != Normalization::raw) {
        spectrum.provenance.pop_back();
        spectrum = normalize(std::move(spectrum), norm);
        spectrum.provenance.push_back({"normalization", to_string(norm)});
      }
      std::ostream& log = emit(sos_out, io::format_spectrum_csv(spectrum));
      log << "molecule: " << m.name() << " (" << m.mode_count() << " modes)\n"
          << "states enumerated: " << states << " = (1+" << sos_k << ")^" << m.mode_count() << "\n"
          << "sticks: " << spectrum.size() << "\n"
          << "raw intensity captured: " << io::format_number(raw_total) << "\n"
          << "wall time: " << seconds_since(t0) << " s\n";
    } else if (*sample) {
      const auto t0 = std::chrono::steady_clock::now();
      const Molecule m = prune_modes(io::read_molecule_file(sample_molecule), sample_prune_s);
      SamplerConfig cfg;
      cfg.events = sample_events;
      cfg.seed = resolve_seed(globals);
      cfg.max_quanta = sample_k;
      cfg.chunk_size = sample_chunk;
      cfg.threads = globals.threads;
      if (sample_thinning == "direct") {
        cfg.thinning = ThinningMethod::direct;
      } else if (sample_thinning == "per_photon") {
        cfg.thinning = ThinningMethod::per_photon;
      } else {
        throw ParseError("--thinning must be direct or per_photon");
      }
      const Normalization norm = normalization(sample_norm);
      const SampledSpectrum sampled = sample_spectrum(m, cfg, sample_detector);
      const double elapsed = seconds_since(t0);
      const LineSpectrum spectrum = sampled.to_line_spectrum(norm);
      std::ostream& log = emit(sample_out, io::format_spectrum_csv(spectrum));
      log << "molecule: " << m.name() << " (" << m.mode_count() << " modes)\n"
          << "seed: " << cfg.seed << "\n"
          << "total events: " << sampled.total_events << "\n"
          << "distinct energies: " << sampled.counts.size() << "\n"
          << "wall time: " << elapsed << " s\n"
          << "throughput: "
          << static_cast<double>(sampled.total_events) * static_cast<double>(m.mode_count()) / elapsed
          << " events*modes/s\n";
    } else if (*fid) {
      const LineSpectrum a = io::read_spectrum_file(fid_a);
      const LineSpectrum b = io::read_spectrum_file(fid_b);
      double f;
      try {
        f = fidelity(a, b, fidelity_norm(fid_norm));
      } catch (const InvalidInput& e) {
        throw ParseError(e.what());
      }
      std::printf("%#.7g\n", f);
    } else if (*br) {
      const LineSpectrum sticks = io::read_spectrum_file(br_in);
      if (sticks.empty()) throw ParseError("input spectrum has no sticks");
      BroadeningKernel kernel;
      if (br_shape == "lorentzian") {
        kernel.shape = KernelShape::lorentzian;
      } else if (br_shape == "gaussian") {
        kernel.shape = KernelShape::gaussian;
      } else {
        throw ParseError("--shape must be lorentzian or gaussian");
      }
      kernel.fwhm = br_fwhm;
      try {
        kernel.validate();
      } catch (const InvalidInput& e) {
        throw ParseError(e.what());
      }
      const EnergyGrid grid = br_grid.empty() ? EnergyGrid::covering(sticks, kernel) : parse_grid(br_grid);
      const GriddedSpectrum g = broaden(sticks, kernel, grid);
      if (!g.margin_ok) std::cerr << "warning: grid margin is below 5 x FWHM for some sticks\n";
      LineSpectrum out = g.to_line_spectrum();
      out.provenance = sticks.provenance;
      out.provenance.push_back({"kernel", to_string(kernel.shape)});
      out.provenance.push_back({"fwhm_cm1", io::format_number(kernel.fwhm)});
      out.provenance.push_back({"grid", io::format_number(grid.start) + ":" + io::format_number(grid.stop) +
                                            ":" + io::format_number(grid.step)});
      emit(br_out, io::format_spectrum_csv(out));
      if (!br_svg.empty()) {
        io::write_text_file(br_svg, io::format_svg(g, std::string(to_string(kernel.shape)) + " FWHM " +
                                                           io::format_number(kernel.fwhm) + " cm-1"));
      }
    } else if (*conv) {
      const Molecule m = prune_modes(io::read_molecule_file(conv_molecule), conv_prune_s);
      SosConfig sos_cfg;
      sos_cfg.max_quanta = conv_k;
      sos_cfg.tail = tail_rule(conv_tail);
      SamplerConfig base;
      base.seed = resolve_seed(globals);
      base.max_quanta = conv_k;
      base.threads = globals.threads;
      const auto events = parse_events_list(conv_list);
      const ConvergenceReport report = convergence_study(m, base, conv_detector, events, conv_runs,
                                                         sos_cfg, fidelity_norm(conv_norm));
      const Provenance provenance = {
          {"molecule", m.name()},
          {"modes", std::to_string(m.mode_count())},
          {"max_quanta", std::to_string(conv_k)},
          {"tail", to_string(sos_cfg.tail)},
          {"runs", std::to_string(conv_runs)},
          {"generator", kGeneratorId},
          {"seed", std::to_string(base.seed)},
          {"efficiency", io::format_number(conv_detector.efficiency)},
          {"dark_mean", io::format_number(conv_detector.dark_mean)},
          {"threshold", conv_detector.threshold_mode ? "on" : "off"},
          {"fidelity", conv_norm},
      };
      emit(conv_out, io::format_convergence_csv(report, provenance));
    } else if (*hr) {
      double s;
      try {
        s = hr_from_gradient({hr_omega, hr_gradient});
      } catch (const InvalidInput& e) {
        throw ParseError(e.what());
      }
      std::string text = io::format_number(s);
      if (text.find_first_of(".en") == std::string::npos) text += ".0";
      std::cout << text << "\n";
    }
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kParse;
  } catch (const BudgetExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBudget;
  } catch (const GridError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kGrid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kOk;
}
