#include "vibronic/errors.hpp"
#include "vibronic/io.hpp"
#include "vibronic/sos.hpp"

#include <gtest/gtest.h>

#include <random>

namespace vibronic {
namespace {

TEST(MoleculeJson, ParsesBothModeForms) {
  const Molecule m = io::parse_molecule_json(R"({
    "name": "demo", "e00_cm1": 17000, "transition": "emission", "atom_count": 10,
    "modes": [ {"energy_cm1": 1180.5, "huang_rhys": 0.2},
               {"energy_cm1": 760, "omega": 2.0, "gradient": 2.0} ] })");
  EXPECT_EQ(m.name(), "demo");
  EXPECT_EQ(m.e00(), 17000.0);
  EXPECT_EQ(m.transition(), TransitionKind::emission);
  EXPECT_EQ(m.atom_count(), 10);
  ASSERT_EQ(m.mode_count(), 2u);
  EXPECT_EQ(m.modes()[0].huang_rhys, 0.2);
  EXPECT_EQ(m.modes()[1].huang_rhys, 1.0);
  EXPECT_EQ(m.modes()[1].index, 2u);
}

TEST(MoleculeJson, RejectsBothFormsNamingMode) {
  try {
    io::parse_molecule_json(R"({"name": "x", "e00_cm1": 0, "transition": "absorption",
      "modes": [ {"energy_cm1": 1, "huang_rhys": 0.1},
                 {"energy_cm1": 2, "huang_rhys": 0.1, "gradient": 3} ]})");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("mode 2"), std::string::npos);
  }
}

TEST(MoleculeJson, StrictErrors) {
  const char* bad[] = {
      R"({"name": "x", "e00_cm1": 0, "transition": "absorption", "modes": [], "colour": 1})",
      R"({"name": "x", "e00_cm1": 0, "transition": "sideways", "modes": []})",
      R"({"name": "x", "transition": "absorption", "modes": []})",
      R"({"name": "x", "e00_cm1": 0, "transition": "absorption", "modes": [{"energy_cm1": 5}]})",
      R"({"name": "x", "e00_cm1": 0, "transition": "absorption", "modes": [{"energy_cm1": 5, "omega": 1}]})",
      R"({"name": "x", "e00_cm1": 0, "transition": "absorption", "modes": [{"energy_cm1": 5, "omega": 0, "gradient": 1}]})",
      R"({"name": "x", "e00_cm1": 0, "transition": "absorption", "modes": [{"energy_cm1": -5, "huang_rhys": 1}]})",
      R"({"name": "x", "e00_cm1": 0, "transition": "absorption", "modes": [{"energy_cm1": 5, "huang_rhys": 1, "q": 2}]})",
      R"({"name": "x", "e00_cm1": 0, "transition": "absorption", "atom_count": 1, "modes": [{"energy_cm1": 5, "huang_rhys": 1}]})",
      R"([1, 2])",
      R"({"name": )",
  };
  for (const char* text : bad) EXPECT_THROW(io::parse_molecule_json(text), ParseError) << text;
  const Molecule empty = io::parse_molecule_json(
      R"({"name": "x", "e00_cm1": 5, "transition": "absorption", "modes": []})");
  EXPECT_EQ(empty.mode_count(), 0u);
}

TEST(SpectrumCsv, Format) {
  LineSpectrum s;
  s.sticks = {{0.0, 0.5}, {500.25, 1e-17}};
  s.provenance = {{"source", "test"}, {"e00_cm1", "0"}};
  EXPECT_EQ(io::format_spectrum_csv(s),
            "# source: test\n# e00_cm1: 0\nenergy_cm1,intensity\n0,0.5\n500.25,1e-17\n");
  const auto parsed = io::parse_spectrum_csv(io::format_spectrum_csv(s));
  EXPECT_EQ(parsed.sticks, s.sticks);
  EXPECT_EQ(parsed.provenance, s.provenance);
  EXPECT_EQ(parsed.zero_zero, 0.0);
}

TEST(SpectrumCsv, RoundTripIsByteIdentical) {
  std::mt19937_64 gen(13);
  std::uniform_real_distribution<double> e(-1e5, 1e5), w(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    LineSpectrum s;
    double energy = e(gen);
    for (int i = 0; i < 50; ++i) {
      energy += std::abs(e(gen)) * 1e-3 + 1e-9;
      s.sticks.push_back({energy, w(gen) * std::pow(10.0, -30.0 * w(gen))});
    }
    s.provenance = {{"trial", std::to_string(trial)}};
    const std::string first = io::format_spectrum_csv(s);
    const LineSpectrum back = io::parse_spectrum_csv(first);
    EXPECT_EQ(back.sticks, s.sticks);
    EXPECT_EQ(io::format_spectrum_csv(back), first);
  }
}

TEST(SpectrumCsv, ReferenceRoundTrip) {
  const Molecule m("rt", 16886.0, TransitionKind::absorption,
                   {{1, 264.3, 0.05}, {2, 754.8, 0.08}, {3, 1180.4, 0.25}});
  SosConfig cfg;
  cfg.max_quanta = 3;
  const std::string text = io::format_spectrum_csv(build_reference_spectrum(m, cfg));
  EXPECT_EQ(io::format_spectrum_csv(io::parse_spectrum_csv(text)), text);
}

TEST(SpectrumCsv, Errors) {
  EXPECT_THROW(io::parse_spectrum_csv("energy,intensity\n1,2\n"), ParseError);
  EXPECT_THROW(io::parse_spectrum_csv("energy_cm1,intensity\n2,1\n1,1\n"), ParseError);
  EXPECT_THROW(io::parse_spectrum_csv("energy_cm1,intensity\n1,1\n1,1\n"), ParseError);
  EXPECT_THROW(io::parse_spectrum_csv("energy_cm1,intensity\n1;1\n"), ParseError);
  EXPECT_THROW(io::parse_spectrum_csv("energy_cm1,intensity\n1,x\n"), ParseError);
  EXPECT_THROW(io::parse_spectrum_csv("# only comments\n"), ParseError);
  EXPECT_TRUE(io::parse_spectrum_csv("energy_cm1,intensity\n").empty());
}

TEST(Svg, FixedViewport) {
  GriddedSpectrum g;
  g.energy = Eigen::ArrayXd::LinSpaced(11, 0.0, 100.0);
  g.intensity = (g.energy / 10.0).sin().abs();
  const std::string svg = io::format_svg(g, "demo");
  EXPECT_NE(svg.find("viewBox=\"0 0 800 500\""), std::string::npos);
  EXPECT_NE(svg.find("<polyline"), std::string::npos);
  EXPECT_EQ(svg.rfind("</svg>\n"), svg.size() - 7);
}

TEST(ConvergenceCsv, Format) {
  ConvergenceReport r;
  r.event_counts = {100, 1000};
  r.mean_fidelity = {0.9, 0.99};
  r.std_fidelity = {0.0, 0.0};
  r.runs = 1;
  EXPECT_EQ(io::format_convergence_csv(r, {{"runs", "1"}}),
            "# runs: 1\nevents,mean_fidelity,std_fidelity\n100,0.9,0\n1000,0.99,0\n");
}

}  // namespace
}  // namespace vibronic
