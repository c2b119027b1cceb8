#include "padsim/padsim.h"

#include <cmath>
#include <memory>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include "app/commands.hpp"
#include "app/config.hpp"
#include "padsim/bloch.hpp"
#include "padsim/errors.hpp"
#include "padsim/pad.hpp"
#include "padsim/params.hpp"
#include "padsim/scattering.hpp"

struct padsim_wavepacket {
  padsim::scattering::PhotonWavepacket packet;
};

struct padsim_config {
  padsim::app::RunConfig config;
};

struct padsim_report {
  padsim::app::CommandResult result;
  std::vector<std::string> files;
};

namespace {

thread_local std::string g_last_error;

padsim_status fail(padsim_status status, const char* message) {
  g_last_error = message;
  return status;
}

template <typename F>
padsim_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return PADSIM_OK;
  } catch (const padsim::ConfigError& e) {
    return fail(PADSIM_ERR_CONFIG, e.what());
  } catch (const padsim::DomainError& e) {
    return fail(PADSIM_ERR_DOMAIN, e.what());
  } catch (const padsim::ConvergenceError& e) {
    return fail(PADSIM_ERR_CONVERGENCE, e.what());
  } catch (const padsim::IntegratorError& e) {
    return fail(PADSIM_ERR_INTEGRATOR, e.what());
  } catch (const padsim::IoError& e) {
    return fail(PADSIM_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(PADSIM_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(PADSIM_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(PADSIM_ERR_INTERNAL, "unknown error");
  }
}

#define PADSIM_REQUIRE(ptr)                                                         \
  do {                                                                              \
    if (!(ptr)) return fail(PADSIM_ERR_INVALID_ARGUMENT, #ptr " must not be NULL"); \
  } while (0)

padsim::SystemParams to_cpp(const padsim_system_params& p) { return {p.kappa, p.g1, p.g2, p.gamma1}; }

padsim::DerivedRates to_cpp(const padsim_derived_rates& r) { return {r.Gamma1, r.Gamma2, r.gamma2, r.beta2}; }

padsim::bloch::BlochState to_cpp(const padsim_bloch_state& s) { return {s.p1, s.p2, s.p3}; }

padsim_bloch_state to_c(const padsim::bloch::BlochState& s) { return {s.p1, s.p2, s.p3}; }

struct WarningBridge {
  padsim_warning_handler handler = nullptr;
  void* user = nullptr;
};
WarningBridge g_bridge;

void bridge_sink(const char* message, void* user) {
  const auto* b = static_cast<const WarningBridge*>(user);
  b->handler(message, b->user);
}

}  // namespace

extern "C" {

const char* padsim_last_error(void) { return g_last_error.c_str(); }

const char* padsim_status_name(padsim_status status) {
  switch (status) {
    case PADSIM_OK: return "ok";
    case PADSIM_ERR_INVALID_ARGUMENT: return "invalid argument";
    case PADSIM_ERR_DOMAIN: return "domain error";
    case PADSIM_ERR_CONVERGENCE: return "convergence failure";
    case PADSIM_ERR_INTEGRATOR: return "integrator failure";
    case PADSIM_ERR_CONFIG: return "configuration error";
    case PADSIM_ERR_IO: return "i/o error";
    case PADSIM_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* padsim_version(void) { return "1.0.0"; }

void padsim_set_warning_handler(padsim_warning_handler handler, void* user) {
  if (!handler) {
    padsim::set_warning_sink(nullptr, nullptr);
    return;
  }
  padsim::set_warning_sink(nullptr, nullptr);
  g_bridge = {handler, user};
  padsim::set_warning_sink(&bridge_sink, &g_bridge);
}

padsim_system_params padsim_default_system_params(void) {
  const padsim::SystemParams p;
  return {p.kappa, p.g1, p.g2, p.gamma1};
}

padsim_status padsim_derive_rates(const padsim_system_params* p, padsim_derived_rates* out) {
  PADSIM_REQUIRE(p);
  PADSIM_REQUIRE(out);
  return guarded([&] {
    const auto r = padsim::derive_rates(to_cpp(*p));
    *out = {r.Gamma1, r.Gamma2, r.gamma2, r.beta2};
  });
}

double padsim_halfway_phase(void) { return padsim::bloch::kHalfwayPhase; }

padsim_status padsim_evolve_driven(const padsim_derived_rates* r, const padsim_drive_pulse* pulse,
                                   const padsim_bloch_state* initial, double t, padsim_bloch_state* out) {
  PADSIM_REQUIRE(r);
  PADSIM_REQUIRE(pulse);
  PADSIM_REQUIRE(initial);
  PADSIM_REQUIRE(out);
  return guarded([&] {
    const padsim::bloch::DrivePulse dp{pulse->n_in, pulse->phase, pulse->t_start, pulse->t_end};
    *out = to_c(padsim::bloch::evolve_driven(to_cpp(*r), dp, to_cpp(*initial), t));
  });
}

padsim_status padsim_evolve_free(const padsim_derived_rates* r, const padsim_bloch_state* s, double dt,
                                 padsim_bloch_state* out) {
  PADSIM_REQUIRE(r);
  PADSIM_REQUIRE(s);
  PADSIM_REQUIRE(out);
  return guarded([&] { *out = to_c(padsim::bloch::evolve_free(to_cpp(*r), to_cpp(*s), dt)); });
}

padsim_status padsim_find_rotation_time(const padsim_derived_rates* r, double n_in, double phase, double* t_r) {
  PADSIM_REQUIRE(r);
  PADSIM_REQUIRE(t_r);
  return guarded([&] { *t_r = padsim::bloch::find_rotation_time(to_cpp(*r), n_in, phase); });
}

padsim_status padsim_max_halfway_probability(const padsim_derived_rates* r, double n_in, double window,
                                             double* p_h_max) {
  PADSIM_REQUIRE(r);
  PADSIM_REQUIRE(p_h_max);
  return guarded([&] { *p_h_max = padsim::bloch::max_halfway_probability(to_cpp(*r), n_in, window); });
}

padsim_status padsim_default_grid(double L, const padsim_system_params* p, int include_spontaneous,
                                  padsim_grid* out) {
  PADSIM_REQUIRE(p);
  PADSIM_REQUIRE(out);
  return guarded([&] {
    const auto k = padsim::scattering::omega_pm(to_cpp(*p), include_spontaneous != 0);
    const auto g = padsim::scattering::default_grid(L, k);
    *out = {g.dr, g.r_min, g.r_max};
  });
}

padsim_status padsim_wavepacket_pulse(double L, const padsim_grid* grid, padsim_wavepacket** out) {
  PADSIM_REQUIRE(grid);
  PADSIM_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    auto w = std::make_unique<padsim_wavepacket>();
    w->packet = padsim::scattering::double_exponential_pulse(L, {grid->dr, grid->r_min, grid->r_max});
    *out = w.release();
  });
}

padsim_status padsim_scatter(const padsim_wavepacket* in, const padsim_system_params* p, int include_spontaneous,
                             padsim_wavepacket** out) {
  PADSIM_REQUIRE(in);
  PADSIM_REQUIRE(p);
  PADSIM_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    auto w = std::make_unique<padsim_wavepacket>();
    const auto k = padsim::scattering::omega_pm(to_cpp(*p), include_spontaneous != 0);
    w->packet = padsim::scattering::scatter(in->packet, k);
    *out = w.release();
  });
}

padsim_status padsim_time_domain_oracle(const padsim_wavepacket* in, const padsim_system_params* p,
                                        padsim_wavepacket** out) {
  PADSIM_REQUIRE(in);
  PADSIM_REQUIRE(p);
  PADSIM_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    auto w = std::make_unique<padsim_wavepacket>();
    w->packet = padsim::scattering::time_domain_oracle(in->packet, to_cpp(*p));
    *out = w.release();
  });
}

size_t padsim_wavepacket_size(const padsim_wavepacket* w) { return w ? w->packet.size() : 0; }

padsim_status padsim_wavepacket_grid(const padsim_wavepacket* w, double* r0, double* dr) {
  PADSIM_REQUIRE(w);
  if (r0) *r0 = w->packet.r0;
  if (dr) *dr = w->packet.dr;
  return PADSIM_OK;
}

padsim_status padsim_wavepacket_amplitudes(const padsim_wavepacket* w, double* re, double* im, size_t n) {
  PADSIM_REQUIRE(w);
  const size_t count = n < w->packet.size() ? n : w->packet.size();
  for (size_t i = 0; i < count; ++i) {
    if (re) re[i] = w->packet.amps[i].real();
    if (im) im[i] = w->packet.amps[i].imag();
  }
  return PADSIM_OK;
}

padsim_status padsim_wavepacket_norm(const padsim_wavepacket* w, double* norm) {
  PADSIM_REQUIRE(w);
  PADSIM_REQUIRE(norm);
  *norm = std::sqrt(w->packet.norm_squared());
  return PADSIM_OK;
}

padsim_status padsim_wavepacket_overlap(const padsim_wavepacket* in, const padsim_wavepacket* out, double d,
                                        double sign, double* value) {
  PADSIM_REQUIRE(in);
  PADSIM_REQUIRE(out);
  PADSIM_REQUIRE(value);
  return guarded([&] { *value = padsim::scattering::overlap(in->packet, out->packet, d, sign); });
}

void padsim_wavepacket_free(padsim_wavepacket* w) { delete w; }

padsim_status padsim_gate_fidelity(const padsim_system_params* p, double L, int include_spontaneous,
                                   padsim_gate_result* out) {
  PADSIM_REQUIRE(p);
  PADSIM_REQUIRE(out);
  return guarded([&] {
    padsim::scattering::GateOptions opt;
    opt.include_spontaneous = include_spontaneous != 0;
    const auto g = padsim::scattering::gate_fidelity(to_cpp(*p), L, opt);
    *out = {g.d_p, g.f_int, g.delta_t_int, g.g2_max, g.f_g_peak, g.f_g_peak_delay};
  });
}

double padsim_g2_bound(double delta_t_int, double kappa) {
  if (!(delta_t_int > 0.0) || !(kappa > 0.0)) return 0.0;
  return padsim::scattering::g2_bound(delta_t_int, kappa);
}

padsim_detector padsim_default_detector(void) {
  const padsim::pad::DetectorModel d;
  return {d.p_eff, d.p_dark, d.p_noise};
}

padsim_status padsim_sequence_probabilities(const padsim_derived_rates* r, double n_in, double f_int,
                                            const padsim_pad_timings* timings, const padsim_detector* det,
                                            padsim_pad_probabilities* out) {
  PADSIM_REQUIRE(r);
  PADSIM_REQUIRE(timings);
  PADSIM_REQUIRE(det);
  PADSIM_REQUIRE(out);
  return guarded([&] {
    auto probs = padsim::pad::sequence_probabilities(to_cpp(*r), n_in, f_int,
                                                     {timings->t_r, timings->delta_t_int, timings->tau});
    padsim::pad::apply_detector(probs, {det->p_eff, det->p_dark, det->p_noise});
    *out = {probs.p_h_end, probs.p_i, probs.p_ii_xi2, probs.p11, probs.p01, probs.p01_gate_bookkeeping};
  });
}

padsim_status padsim_average_counts(double n, double p_t, double p0, double p1, double p11, double p01,
                                    padsim_counts* out) {
  PADSIM_REQUIRE(out);
  if (!(n >= 1.0)) return fail(PADSIM_ERR_DOMAIN, "n must be at least 1");
  return guarded([&] {
    const auto c = padsim::pad::average_counts(n, p_t, p0, p1, p11, p01);
    *out = {c.total, c.with_photon, c.without_photon};
  });
}

padsim_status padsim_accuracy(double n, double p_t, double p0, double p1, double p11, double p01, double* out) {
  PADSIM_REQUIRE(out);
  if (!(n >= 1.0)) return fail(PADSIM_ERR_DOMAIN, "n must be at least 1");
  return guarded([&] { *out = padsim::pad::accuracy(n, p_t, p0, p1, p11, p01); });
}

padsim_status padsim_efficiency_at(double p_t, double p0, double p1, double p11, double p01, double n_max,
                                   padsim_efficiency* out) {
  PADSIM_REQUIRE(out);
  return guarded([&] {
    const auto e = padsim::pad::efficiency(p_t, p0, p1, p11, p01, n_max);
    *out = {e.value, e.n_star, e.at_boundary ? 1 : 0};
  });
}

padsim_status padsim_cnot_speedup(double v_with_access, double v_without, padsim_speedup* out) {
  PADSIM_REQUIRE(out);
  return guarded([&] {
    const auto s = padsim::pad::cnot_speedup({v_with_access, v_without});
    *out = {s.volume_ratio, s.g_ratio, s.t_cnot_ratio, s.speedup};
  });
}

padsim_status padsim_config_default(padsim_config** out) {
  PADSIM_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = new padsim_config{}; });
}

padsim_status padsim_config_load(const char* path, padsim_config** out) {
  PADSIM_REQUIRE(path);
  PADSIM_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    auto cfg = std::make_unique<padsim_config>();
    cfg->config = padsim::app::load_config(path);
    *out = cfg.release();
  });
}

padsim_status padsim_config_parse(const char* text, padsim_config** out) {
  PADSIM_REQUIRE(text);
  PADSIM_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    auto cfg = std::make_unique<padsim_config>();
    std::istringstream in(text);
    cfg->config = padsim::app::parse_config(in, "<text>");
    *out = cfg.release();
  });
}

padsim_status padsim_config_set(padsim_config* cfg, const char* assignment) {
  PADSIM_REQUIRE(cfg);
  PADSIM_REQUIRE(assignment);
  return guarded([&] {
    padsim::app::RunConfig copy = cfg->config;
    padsim::app::apply_override(copy, assignment);
    cfg->config = std::move(copy);
  });
}

void padsim_config_free(padsim_config* cfg) { delete cfg; }

padsim_status padsim_run_command(const padsim_config* cfg, const char* command, const char* out_dir,
                                 unsigned threads, padsim_report** out) {
  PADSIM_REQUIRE(cfg);
  PADSIM_REQUIRE(command);
  PADSIM_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    padsim::app::CommandOptions opt;
    if (out_dir) opt.out_dir = out_dir;
    opt.threads = threads == 0 ? 1 : threads;
    auto rep = std::make_unique<padsim_report>();
    rep->result = padsim::app::run_command(command, cfg->config, opt);
    for (const auto& f : rep->result.files) rep->files.push_back(f.string());
    *out = rep.release();
  });
}

padsim_status padsim_run_acceptance(const padsim_config* cfg, unsigned threads, padsim_report** out) {
  return padsim_run_command(cfg, "accept", nullptr, threads, out);
}

int padsim_report_exit_code(const padsim_report* r) { return r ? r->result.exit_code : -1; }

const char* padsim_report_text(const padsim_report* r) { return r ? r->result.text.c_str() : ""; }

size_t padsim_report_file_count(const padsim_report* r) { return r ? r->files.size() : 0; }

const char* padsim_report_file(const padsim_report* r, size_t index) {
  if (!r || index >= r->files.size()) return nullptr;
  return r->files[index].c_str();
}

void padsim_report_free(padsim_report* r) { delete r; }

}  // extern "C"
