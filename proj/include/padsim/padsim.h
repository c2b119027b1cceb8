#ifndef PADSIM_H
#define PADSIM_H

/* C interface to the photon-arrival detector simulation.
 *
 * Every fallible call returns a padsim_status; on failure the message is
 * available from padsim_last_error() on the same thread until the next call.
 * Objects behind opaque handles are owned by the caller and released with the
 * matching *_free function. All quantities are in natural units (kappa = 1,
 * c = 1 unless the parameters say otherwise). */

#include <stddef.h>

#if defined(_WIN32)
#  if defined(PADSIM_BUILDING)
#    define PADSIM_API __declspec(dllexport)
#  else
#    define PADSIM_API __declspec(dllimport)
#  endif
#else
#  define PADSIM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum padsim_status {
  PADSIM_OK = 0,
  PADSIM_ERR_INVALID_ARGUMENT = 1, /* null pointer, bad index, unknown name */
  PADSIM_ERR_DOMAIN = 2,           /* value outside an operation's domain */
  PADSIM_ERR_CONVERGENCE = 3,      /* search found nothing to converge to */
  PADSIM_ERR_INTEGRATOR = 4,
  PADSIM_ERR_CONFIG = 5,
  PADSIM_ERR_IO = 6,
  PADSIM_ERR_INTERNAL = 7
} padsim_status;

PADSIM_API const char* padsim_last_error(void);
PADSIM_API const char* padsim_status_name(padsim_status status);
PADSIM_API const char* padsim_version(void);

/* Diagnostics that do not abort a computation. NULL restores stderr. */
typedef void (*padsim_warning_handler)(const char* message, void* user);
PADSIM_API void padsim_set_warning_handler(padsim_warning_handler handler, void* user);

/* ---- parameters ------------------------------------------------------- */

typedef struct padsim_system_params {
  double kappa;
  double g1;
  double g2;
  double gamma1;
} padsim_system_params;

typedef struct padsim_derived_rates {
  double Gamma1;
  double Gamma2;
  double gamma2;
  double beta2;
} padsim_derived_rates;

PADSIM_API padsim_system_params padsim_default_system_params(void);
PADSIM_API padsim_status padsim_derive_rates(const padsim_system_params* p, padsim_derived_rates* out);

/* ---- atom dynamics ---------------------------------------------------- */

typedef struct padsim_bloch_state {
  double p1;
  double p2;
  double p3;
} padsim_bloch_state;

typedef struct padsim_drive_pulse {
  double n_in;
  double phase;
  double t_start;
  double t_end;
} padsim_drive_pulse;

/* Drive phase taking the ground state towards the half-way state. */
PADSIM_API double padsim_halfway_phase(void);

PADSIM_API padsim_status padsim_evolve_driven(const padsim_derived_rates* r, const padsim_drive_pulse* pulse,
                                              const padsim_bloch_state* initial, double t,
                                              padsim_bloch_state* out);
PADSIM_API padsim_status padsim_evolve_free(const padsim_derived_rates* r, const padsim_bloch_state* s,
                                            double dt, padsim_bloch_state* out);
PADSIM_API padsim_status padsim_find_rotation_time(const padsim_derived_rates* r, double n_in, double phase,
                                                   double* t_r);
PADSIM_API padsim_status padsim_max_halfway_probability(const padsim_derived_rates* r, double n_in,
                                                        double window, double* p_h_max);

/* ---- single-photon scattering ----------------------------------------- */

typedef struct padsim_wavepacket padsim_wavepacket;

typedef struct padsim_grid {
  double dr;    /* 0 selects the default spacing */
  double r_min;
  double r_max;
} padsim_grid;

typedef struct padsim_gate_result {
  double d_p;
  double f_int;
  double delta_t_int;
  double g2_max;
  double f_g_peak;
  double f_g_peak_delay;
} padsim_gate_result;

PADSIM_API padsim_status padsim_default_grid(double L, const padsim_system_params* p, int include_spontaneous,
                                             padsim_grid* out);
PADSIM_API padsim_status padsim_wavepacket_pulse(double L, const padsim_grid* grid, padsim_wavepacket** out);
PADSIM_API padsim_status padsim_scatter(const padsim_wavepacket* in, const padsim_system_params* p,
                                        int include_spontaneous, padsim_wavepacket** out);
PADSIM_API padsim_status padsim_time_domain_oracle(const padsim_wavepacket* in, const padsim_system_params* p,
                                                   padsim_wavepacket** out);
PADSIM_API size_t padsim_wavepacket_size(const padsim_wavepacket* w);
PADSIM_API padsim_status padsim_wavepacket_grid(const padsim_wavepacket* w, double* r0, double* dr);
/* Copies min(n, size) samples; either output pointer may be NULL. */
PADSIM_API padsim_status padsim_wavepacket_amplitudes(const padsim_wavepacket* w, double* re, double* im,
                                                      size_t n);
PADSIM_API padsim_status padsim_wavepacket_norm(const padsim_wavepacket* w, double* norm);
/* sign * Re int psi_in(r + d) psi_out(r) dr */
PADSIM_API padsim_status padsim_wavepacket_overlap(const padsim_wavepacket* in, const padsim_wavepacket* out,
                                                   double d, double sign, double* value);
PADSIM_API void padsim_wavepacket_free(padsim_wavepacket* w);

PADSIM_API padsim_status padsim_gate_fidelity(const padsim_system_params* p, double L, int include_spontaneous,
                                              padsim_gate_result* out);
PADSIM_API double padsim_g2_bound(double delta_t_int, double kappa);

/* ---- detector --------------------------------------------------------- */

typedef struct padsim_detector {
  double p_eff;
  double p_dark;
  double p_noise;
} padsim_detector;

typedef struct padsim_pad_timings {
  double t_r;
  double delta_t_int;
  double tau;
} padsim_pad_timings;

typedef struct padsim_pad_probabilities {
  double p_h_end;
  double p_i;
  double p_ii_xi2;
  double p11;
  double p01;
  double p01_gate_bookkeeping;
} padsim_pad_probabilities;

typedef struct padsim_counts {
  double total;
  double with_photon;
  double without_photon;
} padsim_counts;

typedef struct padsim_efficiency {
  double value;
  double n_star;
  int at_boundary;
} padsim_efficiency;

typedef struct padsim_speedup {
  double volume_ratio;
  double g_ratio;
  double t_cnot_ratio;
  double speedup;
} padsim_speedup;

PADSIM_API padsim_detector padsim_default_detector(void);
PADSIM_API padsim_status padsim_sequence_probabilities(const padsim_derived_rates* r, double n_in, double f_int,
                                                       const padsim_pad_timings* timings,
                                                       const padsim_detector* det, padsim_pad_probabilities* out);
PADSIM_API padsim_status padsim_average_counts(double n, double p_t, double p0, double p1, double p11, double p01,
                                               padsim_counts* out);
PADSIM_API padsim_status padsim_accuracy(double n, double p_t, double p0, double p1, double p11, double p01,
                                         double* out);
PADSIM_API padsim_status padsim_efficiency_at(double p_t, double p0, double p1, double p11, double p01,
                                              double n_max, padsim_efficiency* out);
PADSIM_API padsim_status padsim_cnot_speedup(double v_with_access, double v_without, padsim_speedup* out);

/* ---- configured runs -------------------------------------------------- */

typedef struct padsim_config padsim_config;
typedef struct padsim_report padsim_report;

PADSIM_API padsim_status padsim_config_default(padsim_config** out);
PADSIM_API padsim_status padsim_config_load(const char* path, padsim_config** out);
PADSIM_API padsim_status padsim_config_parse(const char* text, padsim_config** out);
/* assignment has the form "section.key=value" */
PADSIM_API padsim_status padsim_config_set(padsim_config* cfg, const char* assignment);
PADSIM_API void padsim_config_free(padsim_config* cfg);

/* command: bloch, fidelity, pad, speedup or accept. out_dir may be NULL to use
 * the configured directory. The report carries the process exit code
 * (0 ok, 1 acceptance failure, 2 validation error, 3 runtime error). */
PADSIM_API padsim_status padsim_run_command(const padsim_config* cfg, const char* command, const char* out_dir,
                                            unsigned threads, padsim_report** out);
PADSIM_API padsim_status padsim_run_acceptance(const padsim_config* cfg, unsigned threads, padsim_report** out);

PADSIM_API int padsim_report_exit_code(const padsim_report* r);
PADSIM_API const char* padsim_report_text(const padsim_report* r);
PADSIM_API size_t padsim_report_file_count(const padsim_report* r);
PADSIM_API const char* padsim_report_file(const padsim_report* r, size_t index);
PADSIM_API void padsim_report_free(padsim_report* r);

#ifdef __cplusplus
}
#endif

#endif /* PADSIM_H */
