#include "app/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "app/acceptance.hpp"
#include "padsim/bloch.hpp"
#include "padsim/errors.hpp"
#include "padsim/pad.hpp"
#include "padsim/scattering.hpp"

namespace padsim::app {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

fs::path output_dir(const RunConfig& cfg, const CommandOptions& opt) {
  return opt.out_dir.empty() ? cfg.output_dir : opt.out_dir;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
}

class CsvFile {
 public:
  CsvFile(const fs::path& path, const std::vector<std::string>& header) : path_(path), out_(path) {
    if (!out_) throw IoError("cannot write " + path.string());
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << '\n';
  }

  void row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << fmt6(values[i]);
    out_ << '\n';
  }

  void raw(const std::string& line) { out_ << line << '\n'; }

  void close() {
    out_.close();
    if (!out_) throw IoError("failed writing " + path_.string());
  }

 private:
  fs::path path_;
  std::ofstream out_;
};

void write_json(const fs::path& path, const ordered_json& j) {
  std::ofstream out(path);
  out << j.dump(2) << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

std::vector<double> delay_grid(double d_max, double step) {
  const auto n = static_cast<std::size_t>(std::floor(d_max / step + 1e-9)) + 1;
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = static_cast<double>(i) * step;
  return d;
}

// --- bloch -----------------------------------------------------------------

struct BlochSeries {
  double n_in = 0.0;
  std::vector<double> p_h;
  double max_p_h = 0.0;
  double t_r = NAN;
  RegimeReport regime;
};

void write_fig4(const fs::path& path, const std::vector<double>& times, double Gamma2,
                const std::vector<BlochSeries>& series) {
  std::vector<std::string> header{"t_kappa", "t_Gamma2"};
  for (const auto& s : series) header.push_back("P_h[n_in=" + fmt6(s.n_in) + "]");
  CsvFile csv(path, header);
  for (std::size_t i = 0; i < times.size(); ++i) {
    std::vector<double> row{times[i], times[i] * Gamma2};
    for (const auto& s : series) row.push_back(s.p_h[i]);
    csv.row(row);
  }
  csv.close();
}

}  // namespace

std::string fmt6(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn) {
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

CommandResult cmd_bloch(const RunConfig& cfg, const CommandOptions& opt) {
  SystemParams sys = cfg.system;
  sys.g2 = cfg.bloch.g2;
  const DerivedRates r = derive_rates(sys);
  const double window = cfg.bloch.window_gamma2 / r.Gamma2;
  const auto times = linspace(0.0, window, static_cast<std::size_t>(cfg.bloch.samples));

  auto compute = [&](const std::vector<double>& n_values) {
    std::vector<BlochSeries> out(n_values.size());
    parallel_for(n_values.size(), opt.threads, [&](std::size_t i) {
      BlochSeries& s = out[i];
      s.n_in = n_values[i];
      const bloch::DrivePulse pulse{s.n_in, bloch::kHalfwayPhase, 0.0, window};
      const auto traj = bloch::sample_driven(r, pulse, bloch::BlochState::ground(), times);
      s.p_h.reserve(times.size());
      for (const auto& st : traj.states) s.p_h.push_back(bloch::halfway_projection(st).p_h);
      s.max_p_h = bloch::max_halfway_probability(r, s.n_in, window);
      if (32.0 * r.beta2 * s.n_in > 1.0) s.t_r = bloch::find_rotation_time(r, s.n_in);
      s.regime = regime_check(sys, s.n_in);
    });
    return out;
  };
  const auto low = compute(cfg.bloch.n_in_low);
  const auto high = compute(cfg.bloch.n_in_high);

  const fs::path dir = output_dir(cfg, opt);
  ensure_dir(dir);
  CommandResult res;
  write_fig4(dir / "fig4a.csv", times, r.Gamma2, low);
  write_fig4(dir / "fig4b.csv", times, r.Gamma2, high);

  auto describe = [&](const std::vector<BlochSeries>& series) {
    ordered_json arr = ordered_json::array();
    for (const auto& s : series) {
      ordered_json j;
      j["n_in"] = s.n_in;
      j["max_p_h"] = s.max_p_h;
      j["rotation_time_kappa"] = std::isnan(s.t_r) ? ordered_json(nullptr) : ordered_json(s.t_r);
      j["intracavity_photons"] = intracavity_photons(s.n_in, r, sys.kappa);
      j["leaky_margin"] = std::isfinite(s.regime.leaky_margin) ? ordered_json(s.regime.leaky_margin)
                                                               : ordered_json("inf");
      j["is_leaky"] = s.regime.is_leaky;
      arr.push_back(j);
    }
    return arr;
  };
  ordered_json summary;
  summary["scenario"] = cfg.scenario;
  summary["g2_kappa"] = sys.g2;
  summary["Gamma2_kappa"] = r.Gamma2;
  summary["gamma2_kappa"] = r.gamma2;
  summary["window_kappa"] = window;
  summary["fig4a"] = describe(low);
  summary["fig4b"] = describe(high);
  write_json(dir / "bloch_summary.json", summary);
  res.files = {dir / "fig4a.csv", dir / "fig4b.csv", dir / "bloch_summary.json"};

  std::ostringstream text;
  text << "half-way projection maxima over " << fmt6(window) << "/kappa:\n";
  for (const auto* set : {&low, &high})
    for (const auto& s : *set) text << "  n_in = " << fmt6(s.n_in) << "  max P_h = " << fmt6(s.max_p_h) << '\n';
  res.text = text.str();
  return res;
}

CommandResult cmd_fidelity(const RunConfig& cfg, const CommandOptions& opt) {
  const auto& fc = cfg.fidelity;
  struct Item {
    double g1 = 0.0;
    double L = 0.0;
    scattering::FidelityCurve curve;
    bool crossed = false;
    scattering::GateFidelityResult gate;
    std::string failure;
  };
  std::vector<Item> items;
  for (double g1 : fc.g1_values)
    for (double L : fc.pulse_lengths) items.push_back({g1, L, {}, false, {}, {}});

  const fs::path dir = output_dir(cfg, opt);
  ensure_dir(dir);
  std::mutex warn_mutex;

  parallel_for(items.size(), opt.threads, [&](std::size_t i) {
    Item& it = items[i];
    SystemParams p = cfg.system;
    p.g1 = it.g1;
    const auto kg = scattering::omega_pm(p, fc.include_spontaneous);
    SystemParams decoupled = p;
    decoupled.g1 = 0.0;
    const auto kx = scattering::omega_pm(decoupled, false);
    const auto in = scattering::double_exponential_pulse(it.L, scattering::default_grid(it.L, kg));
    const auto out_g = scattering::scatter(in, kg);
    const auto out_x = scattering::scatter(in, kx);
    const double d_max = fc.d_max > 0.0 ? fc.d_max : scattering::delay_window(it.L, p);
    it.curve = scattering::fidelity_curve(in, out_g, out_x, delay_grid(d_max, fc.d_step));
    scattering::GateOptions go;
    go.include_spontaneous = fc.include_spontaneous;
    try {
      it.gate = scattering::gate_fidelity(p, it.L, go);
      it.crossed = true;
    } catch (const ConvergenceError& e) {
      it.failure = e.what();
      std::lock_guard lock(warn_mutex);
      warn(e.what());
    }
    if (fc.dump_wavepackets) {
      const std::string tag = "g1=" + fmt6(it.g1) + "_L=" + fmt6(it.L);
      std::ofstream a(dir / ("psi_in_" + tag + ".csv"));
      scattering::write_wavepacket_csv(a, in);
      std::ofstream b(dir / ("psi_out_" + tag + ".csv"));
      scattering::write_wavepacket_csv(b, out_g);
    }
  });

  CommandResult res;
  {
    // The decoupled curve depends on L only; take it from the first g1.
    CsvFile csv(dir / "fig5.csv", {"L_kappa", "d_kappa", "F_xi2"});
    for (std::size_t li = 0; li < fc.pulse_lengths.size(); ++li) {
      const Item& it = items[li];
      for (std::size_t k = 0; k < it.curve.delays.size(); ++k)
        csv.row({it.L, it.curve.delays[k], it.curve.f_xi2[k]});
    }
    csv.close();
    res.files.push_back(dir / "fig5.csv");
  }
  for (std::size_t gi = 0; gi < fc.g1_values.size(); ++gi) {
    const std::string name = std::string("fig6") + static_cast<char>('a' + std::min<std::size_t>(gi, 25)) + ".csv";
    CsvFile csv(dir / name, {"g1_kappa", "L_kappa", "d_kappa", "F_g"});
    for (std::size_t li = 0; li < fc.pulse_lengths.size(); ++li) {
      const Item& it = items[gi * fc.pulse_lengths.size() + li];
      for (std::size_t k = 0; k < it.curve.delays.size(); ++k)
        csv.row({it.g1, it.L, it.curve.delays[k], it.curve.f_g[k]});
    }
    csv.close();
    res.files.push_back(dir / name);
  }
  {
    CsvFile csv(dir / "gate_fidelity.csv",
                {"g1_kappa", "L_kappa", "F_int", "d_p_kappa", "delta_t_int_kappa", "g2_max_kappa",
                 "F_g_peak", "F_g_peak_delay_kappa", "status"});
    std::ostringstream text;
    text << "gate fidelities:\n";
    for (const Item& it : items) {
      std::ostringstream line;
      line << fmt6(it.g1) << ',' << fmt6(it.L) << ',';
      if (it.crossed) {
        const auto& g = it.gate;
        line << fmt6(g.f_int) << ',' << fmt6(g.d_p) << ',' << fmt6(g.delta_t_int) << ',' << fmt6(g.g2_max)
             << ',' << fmt6(g.f_g_peak) << ',' << fmt6(g.f_g_peak_delay) << ",ok";
        text << "  g1 = " << fmt6(it.g1) << ", L = " << fmt6(it.L) << ": F_int = " << fmt6(g.f_int)
             << " at d_p = " << fmt6(g.d_p) << '\n';
      } else {
        line << ",,,,,,no_crossing";
        text << "  g1 = " << fmt6(it.g1) << ", L = " << fmt6(it.L) << ": no crossing\n";
      }
      csv.raw(line.str());
    }
    csv.close();
    res.files.push_back(dir / "gate_fidelity.csv");
    res.text = text.str();
  }
  return res;
}

namespace {

struct VariantResult {
  std::string name;
  double gamma1 = 0.0;
  DerivedRates rates;
  double t_r = 0.0;
  pad::PadProbabilities probs;
};

VariantResult evaluate_variant(const RunConfig& cfg, const std::string& name, double gamma1) {
  VariantResult v;
  v.name = name;
  v.gamma1 = gamma1;
  SystemParams p = cfg.system;
  p.gamma1 = gamma1;
  v.rates = derive_rates(p);
  v.t_r = bloch::find_rotation_time(v.rates, cfg.pad.n_in);
  v.probs = pad::sequence_probabilities(v.rates, cfg.pad.n_in, cfg.pad.f_int,
                                        {v.t_r, cfg.pad.delta_t_int, cfg.pad.tau});
  pad::apply_detector(v.probs, cfg.pad.detector);
  return v;
}

ordered_json speedup_json(const pad::CavityGeometry& geom) {
  const auto s = pad::cnot_speedup(geom);
  ordered_json j;
  j["v_with_access_lambda3"] = geom.v_with_access;
  j["v_without_lambda3"] = geom.v_without;
  j["volume_ratio"] = s.volume_ratio;
  j["g_ratio"] = s.g_ratio;
  j["t_cnot_ratio"] = s.t_cnot_ratio;
  j["speedup"] = s.speedup;
  return j;
}

}  // namespace

CommandResult cmd_pad(const RunConfig& cfg, const CommandOptions& opt) {
  const auto& pc = cfg.pad;
  const std::vector<std::pair<std::string, double>> specs = {
      {"baseline", cfg.system.gamma1}, {"spontaneous", pc.gamma1_variant}};
  std::vector<VariantResult> variants(specs.size());
  parallel_for(specs.size(), opt.threads,
               [&](std::size_t i) { variants[i] = evaluate_variant(cfg, specs[i].first, specs[i].second); });

  const fs::path dir = output_dir(cfg, opt);
  ensure_dir(dir);
  CommandResult res;
  const auto& base = variants[0].probs;
  const auto p_ts = linspace(0.0, 1.0, static_cast<std::size_t>(pc.p_t_points));
  {
    std::vector<std::string> ha{"P_T"}, hb{"P_T"};
    for (int n : pc.attempts) {
      ha.push_back("P_PAD[n=" + std::to_string(n) + "]");
      hb.push_back("N_counts[n=" + std::to_string(n) + "]");
    }
    CsvFile a(dir / "fig7a.csv", ha);
    CsvFile b(dir / "fig7b.csv", hb);
    for (double p_t : p_ts) {
      std::vector<double> ra{p_t}, rb{p_t};
      for (int n : pc.attempts) {
        const pad::RepeatedRun run{n, p_t, pc.p0, pc.p1};
        ra.push_back(pad::accuracy(run, base.p11, base.p01));
        rb.push_back(pad::average_counts(run, base.p11, base.p01).total);
      }
      a.row(ra);
      b.row(rb);
    }
    a.close();
    b.close();
    res.files.push_back(dir / "fig7a.csv");
    res.files.push_back(dir / "fig7b.csv");
  }

  ordered_json summary;
  summary["scenario"] = cfg.scenario;
  summary["n_in"] = pc.n_in;
  summary["f_int"] = pc.f_int;
  summary["delta_t_int_kappa"] = pc.delta_t_int;
  summary["tau_kappa"] = pc.tau;
  summary["detector"] = {{"p_eff", pc.detector.p_eff}, {"p_dark", pc.detector.p_dark},
                         {"p_noise", pc.detector.p_noise}};
  {
    CsvFile eff(dir / "efficiency.csv", {"variant_gamma1_kappa", "P_T", "efficiency", "n_star", "at_boundary"});
    ordered_json vs = ordered_json::object();
    for (const auto& v : variants) {
      ordered_json j;
      j["gamma1_kappa"] = v.gamma1;
      j["gamma2_over_Gamma2"] = v.rates.Gamma2 > 0.0 ? v.rates.gamma2 / v.rates.Gamma2 : 0.0;
      j["rotation_time_kappa"] = v.t_r;
      j["p_h_end"] = v.probs.p_h_end;
      j["p_i"] = v.probs.p_i;
      j["p_ii_xi2"] = v.probs.p_ii_xi2;
      j["p11"] = v.probs.p11;
      j["p01"] = v.probs.p01;
      j["p01_failure_from_p_i"] = v.probs.p01_gate_bookkeeping;
      j["rotation_failure"] = 1.0 - v.probs.p_h_end;
      j["rotation_failure_from_p_i"] = 1.0 - v.probs.p_i;
      j["accuracy_p_t_1_n_25"] = pad::accuracy(25.0, 1.0, pc.p0, pc.p1, v.probs.p11, v.probs.p01);
      j["accuracy_p_t_1_limit"] = pad::accuracy_limit(1.0, pc.p0, pc.p1, v.probs.p11, v.probs.p01);
      ordered_json effs = ordered_json::array();
      for (double p_t : pc.efficiency_p_t) {
        const auto e = pad::efficiency(p_t, pc.p0, pc.p1, v.probs.p11, v.probs.p01, pc.n_max);
        effs.push_back({{"p_t", p_t}, {"efficiency", e.value}, {"n_star", e.n_star}, {"at_boundary", e.at_boundary}});
        eff.row({v.gamma1, p_t, e.value, e.n_star, e.at_boundary ? 1.0 : 0.0});
      }
      j["efficiency"] = effs;
      vs[v.name] = j;
    }
    eff.close();
    res.files.push_back(dir / "efficiency.csv");
    summary["variants"] = vs;
  }
  summary["speedup"] = speedup_json(cfg.geometry);
  write_json(dir / "pad_summary.json", summary);
  res.files.push_back(dir / "pad_summary.json");

  std::ostringstream text;
  for (const auto& v : variants)
    text << v.name << ": t_r = " << fmt6(v.t_r) << ", p_i = " << fmt6(v.probs.p_i)
         << ", p_ii = " << fmt6(v.probs.p_ii_xi2) << ", p11 = " << fmt6(v.probs.p11)
         << ", p01 = " << fmt6(v.probs.p01) << '\n';
  res.text = text.str();
  return res;
}

CommandResult cmd_speedup(const RunConfig& cfg, const CommandOptions& opt) {
  const fs::path dir = output_dir(cfg, opt);
  ensure_dir(dir);
  const ordered_json j = speedup_json(cfg.geometry);
  write_json(dir / "speedup.json", j);
  CommandResult res;
  res.files.push_back(dir / "speedup.json");
  res.text = "speedup = " + fmt6(j["speedup"].get<double>()) + '\n';
  return res;
}

CommandResult cmd_accept(const RunConfig& cfg, const CommandOptions& opt) {
  const AcceptanceReport report = run_acceptance(cfg, opt.threads);
  std::ostringstream os;
  print_report(os, report);
  CommandResult res;
  res.text = os.str();
  res.exit_code = report.all_pass() ? kExitOk : kExitAcceptanceFailed;
  return res;
}

CommandResult run_command(const std::string& name, const RunConfig& cfg, const CommandOptions& opt) {
  CommandResult res;
  try {
    cfg.validate();
    if (name == "bloch") return cmd_bloch(cfg, opt);
    if (name == "fidelity") return cmd_fidelity(cfg, opt);
    if (name == "pad") return cmd_pad(cfg, opt);
    if (name == "speedup") return cmd_speedup(cfg, opt);
    if (name == "accept") return cmd_accept(cfg, opt);
    res.exit_code = kExitValidation;
    res.text = "unknown command '" + name + "'\n";
  } catch (const ConfigError& e) {
    res.exit_code = kExitValidation;
    res.text = std::string("invalid configuration: ") + e.what() + '\n';
  } catch (const DomainError& e) {
    res.exit_code = kExitValidation;
    res.text = std::string("invalid input: ") + e.what() + '\n';
  } catch (const std::exception& e) {
    res.exit_code = kExitRuntime;
    res.text = std::string("error: ") + e.what() + '\n';
  }
  return res;
}

}  // namespace padsim::app
