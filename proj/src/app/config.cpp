#include "app/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "padsim/errors.hpp"

namespace padsim::app {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& text, const std::string& where) {
  const std::string t = trim(text);
  const auto slash = t.find('/');
  try {
    std::size_t used = 0;
    if (slash != std::string::npos) {
      const double num = std::stod(t.substr(0, slash), &used);
      if (trim(t.substr(0, slash)).size() != used) throw std::invalid_argument(t);
      const std::string rest = trim(t.substr(slash + 1));
      const double den = std::stod(rest, &used);
      if (rest.size() != used || den == 0.0) throw std::invalid_argument(t);
      return num / den;
    }
    const double v = std::stod(t, &used);
    if (used != t.size()) throw std::invalid_argument(t);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(where + ": not a number: '" + t + "'");
  }
}

std::vector<double> parse_list(const std::string& text, const std::string& where) {
  std::vector<double> out;
  if (trim(text).empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(item, where));
  return out;
}

int parse_int(const std::string& text, const std::string& where) {
  const double v = parse_number(text, where);
  if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigError(where + ": expected an integer");
  return static_cast<int>(v);
}

bool parse_bool(const std::string& text, const std::string& where) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ConfigError(where + ": expected true or false");
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

std::map<std::string, Setter> setters() {
  std::map<std::string, Setter> s;
  s["run.scenario"] = [](RunConfig& c, const std::string& v, const std::string&) { c.scenario = trim(v); };
  s["run.output_dir"] = [](RunConfig& c, const std::string& v, const std::string&) { c.output_dir = trim(v); };

  s["system.kappa"] = [](RunConfig& c, const std::string& v, const std::string& w) { c.system.kappa = parse_number(v, w); };
  s["system.g1"] = [](RunConfig& c, const std::string& v, const std::string& w) { c.system.g1 = parse_number(v, w); };
  s["system.g2"] = [](RunConfig& c, const std::string& v, const std::string& w) { c.system.g2 = parse_number(v, w); };
  s["system.gamma1"] = [](RunConfig& c, const std::string& v, const std::string& w) { c.system.gamma1 = parse_number(v, w); };

  s["bloch.g2"] = [](RunConfig& c, const std::string& v, const std::string& w) { c.bloch.g2 = parse_number(v, w); };
  s["bloch.n_in_low"] = [](RunConfig& c, const std::string& v, const std::string& w) { c.bloch.n_in_low = parse_list(v, w); };
  s["bloch.n_in_high"] = [](RunConfig& c, const std::string& v, const std::string& w) { c.bloch.n_in_high = parse_list(v, w); };
  s["bloch.window_gamma2"] = [](RunConfig& c, const std::string& v, const std::string& w) { c.bloch.window_gamma2 = parse_number(v, w); };
  s["bloch.samples"] = [](RunConfig& c, const std::string& v, const std::string& w) { c.bloch.samples = parse_int(v, w); };

  s["fidelity.g1_values"] = [](RunConfig& c, const std::string& v, const std::string& w) { c.fidelity.g1_values = parse_list(v, w); };
  s["fidelity.pulse_lengths"] = [](RunConfig& c, const std::string& v, const std::string& w) { c.fidelity.pulse_lengths = parse_list(v, w); };
  s["fidelity.d_step"] = [](RunConfig& c, const std::string& v, const std::string& w) { c.fidelity.d_step = parse_number(v, w); };
  s["fidelity.d_max"] = [](RunConfig& c, const std::string& v, const std::string& w) { c.fidelity.d_max = parse_number(v, w); };
  s["fidelity.include_spontaneous"] = [](RunConfig& c, const std::string& v, const std::string& w) { c.fidelity.include_spontaneous = parse_bool(v, w); };
  s["fidelity.dump_wavepackets"] = [](RunConfig& c, const std::string& v, const std::string& w) { c.fidelity.dump_wavepackets = parse_bool(v, w); };

  s["pad.n_in"] = [](RunConfig& c, const std::string& v, const std::string& w) { c.pad.n_in = parse_number(v, w); };
  s["pad.f_int"] = [](RunConfig& c, const std::string& v, const std::string& w) { c.pad.f_int = parse_number(v, w); };
  s["pad.delta_t_int"] = [](RunConfig& c, const std::string& v, const std::string& w) { c.pad.delta_t_int = parse_number(v, w); };
  s["pad.tau"] = [](RunConfig& c, const std::string& v, const std::string& w) { c.pad.tau = parse_number(v, w); };
  s["pad.gamma1_variant"] = [](RunConfig& c, const std::string& v, const std::string& w) { c.pad.gamma1_variant = parse_number(v, w); };
  s["pad.p_eff"] = [](RunConfig& c, const std::string& v, const std::string& w) { c.pad.detector.p_eff = parse_number(v, w); };
  s["pad.p_dark"] = [](RunConfig& c, const std::string& v, const std::string& w) { c.pad.detector.p_dark = parse_number(v, w); };
  s["pad.p_noise"] = [](RunConfig& c, const std::string& v, const std::string& w) { c.pad.detector.p_noise = parse_number(v, w); };
  s["pad.p0"] = [](RunConfig& c, const std::string& v, const std::string& w) { c.pad.p0 = parse_number(v, w); };
  s["pad.p1"] = [](RunConfig& c, const std::string& v, const std::string& w) { c.pad.p1 = parse_number(v, w); };
  s["pad.attempts"] = [](RunConfig& c, const std::string& v, const std::string& w) {
    c.pad.attempts.clear();
    for (double x : parse_list(v, w)) {
      if (x != std::floor(x)) throw ConfigError(w + ": attempts must be integers");
      c.pad.attempts.push_back(static_cast<int>(x));
    }
  };
  s["pad.p_t_points"] = [](RunConfig& c, const std::string& v, const std::string& w) { c.pad.p_t_points = parse_int(v, w); };
  s["pad.efficiency_p_t"] = [](RunConfig& c, const std::string& v, const std::string& w) { c.pad.efficiency_p_t = parse_list(v, w); };
  s["pad.n_max"] = [](RunConfig& c, const std::string& v, const std::string& w) { c.pad.n_max = parse_number(v, w); };

  s["speedup.v_with_access"] = [](RunConfig& c, const std::string& v, const std::string& w) { c.geometry.v_with_access = parse_number(v, w); };
  s["speedup.v_without"] = [](RunConfig& c, const std::string& v, const std::string& w) { c.geometry.v_without = parse_number(v, w); };

  s["accept.f_int_tolerance"] = [](RunConfig& c, const std::string& v, const std::string& w) { c.accept.f_int_tolerance = parse_number(v, w); };
  return s;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

bool positive_list(const std::vector<double>& v) {
  for (double x : v)
    if (!(x > 0.0) || !std::isfinite(x)) return false;
  return true;
}

}  // namespace

void RunConfig::validate() const {
  try {
    system.validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("system: ") + e.what());
  }
  require(system.g2 > 0.0, "system.g2 must be positive");

  require(bloch.g2 > 0.0, "bloch.g2 must be positive");
  require(!bloch.n_in_low.empty(), "bloch.n_in_low is empty");
  require(!bloch.n_in_high.empty(), "bloch.n_in_high is empty");
  for (double n : bloch.n_in_low) require(n >= 0.0, "bloch.n_in_low: values must be nonnegative");
  for (double n : bloch.n_in_high) require(n >= 0.0, "bloch.n_in_high: values must be nonnegative");
  require(bloch.window_gamma2 > 0.0, "bloch.window_gamma2 must be positive");
  require(bloch.samples >= 2, "bloch.samples must be at least 2");

  require(!fidelity.g1_values.empty(), "fidelity.g1_values is empty");
  require(!fidelity.pulse_lengths.empty(), "fidelity.pulse_lengths is empty");
  require(positive_list(fidelity.g1_values), "fidelity.g1_values must be positive");
  require(positive_list(fidelity.pulse_lengths), "fidelity.pulse_lengths must be positive");
  require(fidelity.d_step > 0.0, "fidelity.d_step must be positive");
  require(fidelity.d_max >= 0.0, "fidelity.d_max must be nonnegative");

  require(pad.n_in > 0.0, "pad.n_in must be positive");
  require(pad.f_int >= 0.0 && pad.f_int <= 1.0, "pad.f_int must lie in [0, 1]");
  require(pad.delta_t_int >= 0.0 && pad.tau >= 0.0, "pad timings must be nonnegative");
  require(pad.gamma1_variant >= 0.0, "pad.gamma1_variant must be nonnegative");
  try {
    pad.detector.validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("pad: ") + e.what());
  }
  require(pad.p0 >= 0.0 && pad.p1 >= 0.0 && std::abs(pad.p0 + pad.p1 - 1.0) < 1e-12,
          "pad.p0 + pad.p1 must equal 1");
  require(!pad.attempts.empty(), "pad.attempts is empty");
  for (int n : pad.attempts) require(n >= 1, "pad.attempts must be at least 1");
  require(pad.p_t_points >= 2, "pad.p_t_points must be at least 2");
  require(!pad.efficiency_p_t.empty(), "pad.efficiency_p_t is empty");
  for (double p : pad.efficiency_p_t) require(p >= 0.0 && p <= 1.0, "pad.efficiency_p_t must lie in [0, 1]");
  require(pad.n_max >= 1.0, "pad.n_max must be at least 1");

  require(geometry.v_with_access > 0.0 && geometry.v_without > 0.0, "speedup volumes must be positive");
  require(accept.f_int_tolerance >= 0.0, "accept.f_int_tolerance must be nonnegative");
}

void apply_config(RunConfig& cfg, std::istream& in, const std::string& origin) {
  static const auto table = setters();
  std::string section;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string where = origin + ":" + std::to_string(line_no);
    const auto hash = line.find_first_of("#;");
    const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']') throw ConfigError(where + ": malformed section header");
      section = trim(body.substr(1, body.size() - 2));
      static const char* known[] = {"run", "system", "bloch", "fidelity", "pad", "speedup", "accept"};
      bool ok = false;
      for (const char* k : known) ok = ok || section == k;
      if (!ok) throw ConfigError(where + ": unknown section [" + section + "]");
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    if (section.empty()) throw ConfigError(where + ": key outside any section");
    const std::string key = section + "." + trim(body.substr(0, eq));
    const auto it = table.find(key);
    if (it == table.end()) throw ConfigError(where + ": unknown key '" + key + "'");
    it->second(cfg, body.substr(eq + 1), where + " (" + key + ")");
  }
}

void apply_override(RunConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  const auto dot = assignment.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq)
    throw ConfigError("override '" + assignment + "' is not of the form section.key=value");
  std::istringstream text("[" + trim(assignment.substr(0, dot)) + "]\n" + assignment.substr(dot + 1) + "\n");
  apply_config(cfg, text, "override");
}

RunConfig parse_config(std::istream& in, const std::string& origin) {
  RunConfig cfg;
  apply_config(cfg, in, origin);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse_config(in, path.string());
}

}  // namespace padsim::app
