#ifndef PADSIM_APP_CONFIG_HPP
#define PADSIM_APP_CONFIG_HPP

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "padsim/pad.hpp"
#include "padsim/params.hpp"

namespace padsim::app {

struct BlochSection {
  double g2 = 0.01;
  std::vector<double> n_in_low{0.03, 0.3, 3.0};
  std::vector<double> n_in_high{1e2, 1e3, 1e4};
  double window_gamma2 = 5.0;  ///< pulse length in units of 1/Gamma2
  int samples = 1001;
};

struct FidelitySection {
  std::vector<double> g1_values{0.1, 1.0, 10.0};
  std::vector<double> pulse_lengths{4.0, 40.0, 400.0};
  double d_step = 0.25;
  double d_max = 0.0;  ///< 0 selects the gate search window per curve
  bool include_spontaneous = false;
  bool dump_wavepackets = false;
};

struct PadSection {
  double n_in = 1e4;
  double f_int = 0.999;
  double delta_t_int = 144.0;
  double tau = 4.2;
  double gamma1_variant = 0.01;  ///< gamma1 giving gamma2 = 1.2 Gamma2 at the default couplings
  pad::DetectorModel detector;
  double p0 = 0.5;
  double p1 = 0.5;
  std::vector<int> attempts{5, 10, 25};
  int p_t_points = 101;
  std::vector<double> efficiency_p_t{0.9, 0.95, 1.0};
  double n_max = 25.0;
};

struct AcceptSection {
  double f_int_tolerance = 0.003;
};

struct RunConfig {
  std::string scenario = "default";
  std::filesystem::path output_dir = "out";
  SystemParams system{1.0, 1.0, 1.0 / 120.0, 0.0};
  BlochSection bloch;
  FidelitySection fidelity;
  PadSection pad;
  pad::CavityGeometry geometry;
  AcceptSection accept;

  /// Throws ConfigError naming the first offending key.
  void validate() const;
};

/// INI-style text: "[section]" headers, "key = value" lines, '#' or ';'
/// comments. Lists are comma separated; numbers may be written as a/b.
/// Unknown sections or keys are errors.
RunConfig parse_config(std::istream& in, const std::string& origin = "<config>");
/// Same syntax, applied on top of an existing config.
void apply_config(RunConfig& cfg, std::istream& in, const std::string& origin = "<config>");
/// One "section.key=value" assignment.
void apply_override(RunConfig& cfg, const std::string& assignment);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace padsim::app

#endif  // PADSIM_APP_CONFIG_HPP
