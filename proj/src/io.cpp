#include "vibronic/io.hpp"

#include "vibronic/errors.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace vibronic::io {

namespace {

using nlohmann::json;

double require_number(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(where + ": missing \"" + key + "\"");
  if (!it->is_number()) throw ParseError(where + ": \"" + key + "\" must be a number");
  return it->get<double>();
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw ParseError(where + ": unknown key \"" + key + "\"");
  }
}

std::string_view trim_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

double parse_double(std::string_view field, std::size_t line_no) {
  double v = 0.0;
  const auto* first = field.data();
  const auto* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw ParseError("line " + std::to_string(line_no) + ": bad number '" + std::string(field) + "'");
  }
  return v;
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

Molecule parse_molecule_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("molecule JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("molecule JSON: top level must be an object");
  reject_unknown(doc, {"name", "e00_cm1", "transition", "atom_count", "modes"}, "molecule");

  auto name_it = doc.find("name");
  if (name_it == doc.end() || !name_it->is_string()) {
    throw ParseError("molecule: \"name\" must be a string");
  }
  const double e00 = require_number(doc, "e00_cm1", "molecule");

  auto tr_it = doc.find("transition");
  if (tr_it == doc.end() || !tr_it->is_string()) {
    throw ParseError("molecule: \"transition\" must be \"absorption\" or \"emission\"");
  }
  TransitionKind kind;
  if (*tr_it == "absorption") {
    kind = TransitionKind::absorption;
  } else if (*tr_it == "emission") {
    kind = TransitionKind::emission;
  } else {
    throw ParseError("molecule: \"transition\" must be \"absorption\" or \"emission\"");
  }

  std::optional<int> atoms;
  if (auto it = doc.find("atom_count"); it != doc.end()) {
    if (!it->is_number_integer() || it->get<long long>() <= 0) {
      throw ParseError("molecule: \"atom_count\" must be a positive integer");
    }
    atoms = it->get<int>();
  }

  auto modes_it = doc.find("modes");
  if (modes_it == doc.end() || !modes_it->is_array()) {
    throw ParseError("molecule: \"modes\" must be an array");
  }
  std::vector<Mode> modes;
  std::size_t index = 0;
  for (const auto& entry : *modes_it) {
    ++index;
    const std::string where = "mode " + std::to_string(index);
    if (!entry.is_object()) throw ParseError(where + ": must be an object");
    reject_unknown(entry, {"energy_cm1", "huang_rhys", "omega", "gradient"}, where);
    Mode mode;
    mode.index = index;
    mode.energy = require_number(entry, "energy_cm1", where);
    const bool has_s = entry.contains("huang_rhys");
    const bool has_omega = entry.contains("omega");
    const bool has_gradient = entry.contains("gradient");
    if (has_s && (has_omega || has_gradient)) {
      throw ParseError(where + ": give either huang_rhys or omega+gradient, not both");
    }
    if (has_s) {
      mode.huang_rhys = require_number(entry, "huang_rhys", where);
    } else if (has_omega && has_gradient) {
      GradientInput g{require_number(entry, "omega", where), require_number(entry, "gradient", where)};
      try {
        mode.huang_rhys = hr_from_gradient(g);
      } catch (const InvalidInput& e) {
        throw ParseError(where + ": " + e.what());
      }
    } else {
      throw ParseError(where + ": needs huang_rhys, or both omega and gradient");
    }
    modes.push_back(mode);
  }

  Molecule m(name_it->get<std::string>(), e00, kind, std::move(modes), atoms);
  auto report = validate_molecule(m);
  if (!report.ok()) throw ParseError("molecule '" + m.name() + "' is invalid:\n" + report.describe());
  return m;
}

Molecule read_molecule_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_molecule_json(buf.str());
}

std::string format_spectrum_csv(const LineSpectrum& s) {
  std::string out;
  for (const auto& [key, value] : s.provenance) out += "# " + key + ": " + value + "\n";
  out += "energy_cm1,intensity\n";
  for (const auto& stick : s.sticks) {
    out += format_number(stick.energy);
    out += ',';
    out += format_number(stick.intensity);
    out += '\n';
  }
  return out;
}

LineSpectrum parse_spectrum_csv(std::string_view text) {
  LineSpectrum out;
  bool header_seen = false;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = trim_cr(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!header_seen) {
      if (!line.empty() && line.front() == '#') {
        line.remove_prefix(1);
        if (!line.empty() && line.front() == ' ') line.remove_prefix(1);
        const auto colon = line.find(": ");
        if (colon == std::string_view::npos) {
          out.provenance.emplace_back(std::string(line), "");
        } else {
          out.provenance.emplace_back(std::string(line.substr(0, colon)),
                                      std::string(line.substr(colon + 2)));
        }
        continue;
      }
      if (line != "energy_cm1,intensity") {
        throw ParseError("line " + std::to_string(line_no) + ": expected header energy_cm1,intensity");
      }
      header_seen = true;
      continue;
    }
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos) {
      throw ParseError("line " + std::to_string(line_no) + ": expected two columns");
    }
    Stick stick{parse_double(line.substr(0, comma), line_no), parse_double(line.substr(comma + 1), line_no)};
    if (!out.sticks.empty() && !(stick.energy > out.sticks.back().energy)) {
      throw ParseError("line " + std::to_string(line_no) + ": energies must be strictly increasing");
    }
    out.sticks.push_back(stick);
  }
  if (!header_seen) throw ParseError("missing header energy_cm1,intensity");
  for (const auto& [key, value] : out.provenance) {
    if (key == "e00_cm1") {
      double e00 = 0.0;
      auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), e00);
      if (ec == std::errc() && ptr == value.data() + value.size()) out.zero_zero = e00;
    } else if (key == "normalization") {
      try {
        out.normalization = parse_normalization(value);
      } catch (const InvalidInput&) {
      }
    }
  }
  return out;
}

LineSpectrum read_spectrum_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_spectrum_csv(buf.str());
}

void write_text_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string format_convergence_csv(const ConvergenceReport& r, const Provenance& provenance) {
  std::string out;
  for (const auto& [key, value] : provenance) out += "# " + key + ": " + value + "\n";
  out += "events,mean_fidelity,std_fidelity\n";
  for (std::size_t i = 0; i < r.event_counts.size(); ++i) {
    out += std::to_string(r.event_counts[i]) + "," + format_number(r.mean_fidelity[i]) + "," +
           format_number(r.std_fidelity[i]) + "\n";
  }
  return out;
}

std::string format_svg(const GriddedSpectrum& g, std::string_view title) {
  constexpr double kWidth = 800, kHeight = 500;
  constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;

  double x0 = 0, x1 = 1, y1 = 1;
  if (g.energy.size() > 0) {
    x0 = g.energy.minCoeff();
    x1 = g.energy.maxCoeff();
    y1 = g.intensity.maxCoeff();
  }
  if (!(x1 > x0)) x1 = x0 + 1;
  if (!(y1 > 0)) y1 = 1;
  auto px = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * plot_w; };
  auto py = [&](double y) { return kTop + plot_h - y / y1 * plot_h; };

  std::ostringstream os;
  os.precision(6);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"500\" "
        "viewBox=\"0 0 800 500\">\n";
  os << "<rect width=\"800\" height=\"500\" fill=\"white\"/>\n";
  os << "<text x=\"400\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << title << "</text>\n";
  os << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << kLeft + plot_w
     << "\" y2=\"" << kTop + plot_h << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
     << kTop + plot_h << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double xv = x0 + (x1 - x0) * t / 4.0;
    os << "<text x=\"" << px(xv) << "\" y=\"" << kTop + plot_h + 20
       << "\" text-anchor=\"middle\" font-size=\"12\">" << xv << "</text>\n";
    const double yv = y1 * t / 4.0;
    os << "<text x=\"" << kLeft - 8 << "\" y=\"" << py(yv) + 4
       << "\" text-anchor=\"end\" font-size=\"12\">" << yv << "</text>\n";
  }
  os << "<text x=\"400\" y=\"492\" text-anchor=\"middle\" font-size=\"13\">energy (cm-1)</text>\n";
  os << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"";
  for (Eigen::Index i = 0; i < g.energy.size(); ++i) {
    os << px(g.energy[i]) << ',' << py(g.intensity[i]) << (i + 1 < g.energy.size() ? " " : "");
  }
  os << "\"/>\n</svg>\n";
  return os.str();
}

}  // namespace vibronic::io
