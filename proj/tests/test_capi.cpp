#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "padsim/padsim.h"

namespace fs = std::filesystem;

TEST_CASE("status reporting") {
  CHECK(std::string(padsim_status_name(PADSIM_OK)) == "ok");
  CHECK(std::string(padsim_version()).size() > 0);

  padsim_derived_rates r{};
  CHECK(padsim_derive_rates(nullptr, &r) == PADSIM_ERR_INVALID_ARGUMENT);
  CHECK(std::string(padsim_last_error()).find("NULL") != std::string::npos);

  padsim_system_params bad{-1.0, 1.0, 0.01, 0.0};
  CHECK(padsim_derive_rates(&bad, &r) == PADSIM_ERR_DOMAIN);
  CHECK(std::string(padsim_last_error()).find("kappa") != std::string::npos);

  padsim_system_params ok = padsim_default_system_params();
  CHECK(padsim_derive_rates(&ok, &r) == PADSIM_OK);
  CHECK(std::string(padsim_last_error()).empty());
}

TEST_CASE("atom dynamics through the C API") {
  padsim_system_params p = padsim_default_system_params();
  p.g2 = 1.0 / 120.0;
  padsim_derived_rates r{};
  REQUIRE(padsim_derive_rates(&p, &r) == PADSIM_OK);

  double t_r = 0.0;
  REQUIRE(padsim_find_rotation_time(&r, 1e4, padsim_halfway_phase(), &t_r) == PADSIM_OK);
  CHECK(t_r == doctest::Approx(80.06).epsilon(1e-3));
  CHECK(padsim_find_rotation_time(&r, 1e-3, padsim_halfway_phase(), &t_r) == PADSIM_ERR_CONVERGENCE);

  padsim_drive_pulse pulse{1e4, padsim_halfway_phase(), 0.0, 80.0};
  padsim_bloch_state g{0.0, 0.0, -1.0}, s{};
  REQUIRE(padsim_evolve_driven(&r, &pulse, &g, 80.0, &s) == PADSIM_OK);
  CHECK(s.p1 > 0.98);
  padsim_bloch_state f{};
  REQUIRE(padsim_evolve_free(&r, &s, 10.0, &f) == PADSIM_OK);
  CHECK(f.p1 < s.p1);
  CHECK(padsim_evolve_free(&r, &s, -1.0, &f) == PADSIM_ERR_DOMAIN);

  double ph = 0.0;
  REQUIRE(padsim_max_halfway_probability(&r, 1e4, 5.0 / r.Gamma2, &ph) == PADSIM_OK);
  CHECK(ph > 0.99);
}

TEST_CASE("wavepacket handles") {
  padsim_system_params p{1.0, 1.0, 0.0, 0.0};
  padsim_grid grid{};
  REQUIRE(padsim_default_grid(4.0, &p, 0, &grid) == PADSIM_OK);
  padsim_wavepacket* in = nullptr;
  REQUIRE(padsim_wavepacket_pulse(4.0, &grid, &in) == PADSIM_OK);
  padsim_wavepacket* out = nullptr;
  REQUIRE(padsim_scatter(in, &p, 0, &out) == PADSIM_OK);

  double nin = 0.0, nout = 0.0;
  padsim_wavepacket_norm(in, &nin);
  padsim_wavepacket_norm(out, &nout);
  CHECK(nout == doctest::Approx(nin).epsilon(1e-6));

  const size_t n = padsim_wavepacket_size(out);
  REQUIRE(n == padsim_wavepacket_size(in));
  std::vector<double> re(n), im(n);
  REQUIRE(padsim_wavepacket_amplitudes(out, re.data(), im.data(), n) == PADSIM_OK);
  double r0 = 0.0, dr = 0.0;
  padsim_wavepacket_grid(out, &r0, &dr);
  CHECK(dr == doctest::Approx(grid.dr));

  double f = 0.0;
  REQUIRE(padsim_wavepacket_overlap(in, out, 2.65, -1.0, &f) == PADSIM_OK);
  CHECK(f == doctest::Approx(0.982).epsilon(1e-3));

  padsim_wavepacket* oracle = nullptr;
  REQUIRE(padsim_time_domain_oracle(in, &p, &oracle) == PADSIM_OK);
  std::vector<double> ore(n);
  padsim_wavepacket_amplitudes(oracle, ore.data(), nullptr, n);
  double worst = 0.0;
  for (size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(ore[i] - re[i]));
  CHECK(worst < 1e-5);

  padsim_wavepacket_free(oracle);
  padsim_wavepacket_free(out);
  padsim_wavepacket_free(in);
  padsim_wavepacket_free(nullptr);

  padsim_grid coarse{1.0, -10.0, 10.0};
  padsim_wavepacket* w = nullptr;
  CHECK(padsim_wavepacket_pulse(4.0, &coarse, &w) == PADSIM_ERR_DOMAIN);
  CHECK(w == nullptr);
}

TEST_CASE("gate fidelity and detector through the C API") {
  padsim_system_params p{1.0, 1.0, 0.0, 0.0};
  padsim_gate_result g{};
  REQUIRE(padsim_gate_fidelity(&p, 40.0, 0, &g) == PADSIM_OK);
  CHECK(g.f_int == doctest::Approx(0.9999).epsilon(1e-4));
  CHECK(padsim_g2_bound(144.0, 1.0) == doctest::Approx(1.0 / 120.0));
  CHECK(padsim_g2_bound(-1.0, 1.0) == 0.0);

  padsim_system_params s = padsim_default_system_params();
  s.g2 = 1.0 / 120.0;
  padsim_derived_rates r{};
  padsim_derive_rates(&s, &r);
  double t_r = 0.0;
  padsim_find_rotation_time(&r, 1e4, padsim_halfway_phase(), &t_r);
  padsim_pad_timings t{t_r, 144.0, 4.2};
  padsim_detector det = padsim_default_detector();
  padsim_pad_probabilities probs{};
  REQUIRE(padsim_sequence_probabilities(&r, 1e4, 0.999, &t, &det, &probs) == PADSIM_OK);
  CHECK(probs.p11 == doctest::Approx(0.0983).epsilon(2e-3));
  CHECK(probs.p01 == doctest::Approx(0.00101).epsilon(1e-2));

  padsim_counts c{};
  REQUIRE(padsim_average_counts(10.0, 1.0, 0.5, 0.5, probs.p11, probs.p01, &c) == PADSIM_OK);
  CHECK(c.total == doctest::Approx(5.0 * (probs.p11 + probs.p01)));
  CHECK(padsim_average_counts(0.0, 1.0, 0.5, 0.5, probs.p11, probs.p01, &c) == PADSIM_ERR_DOMAIN);

  double acc = 0.0;
  REQUIRE(padsim_accuracy(25.0, 1.0, 0.5, 0.5, probs.p11, probs.p01, &acc) == PADSIM_OK);
  CHECK(acc == doctest::Approx(probs.p11 / (probs.p11 + probs.p01)));
  CHECK(padsim_accuracy(5.0, 1.0, 0.5, 0.5, 0.0, 0.0, &acc) == PADSIM_ERR_DOMAIN);

  padsim_efficiency e{};
  REQUIRE(padsim_efficiency_at(0.9, 0.5, 0.5, probs.p11, probs.p01, 25.0, &e) == PADSIM_OK);
  CHECK(e.at_boundary == 1);

  padsim_speedup sp{};
  REQUIRE(padsim_cnot_speedup(1.3e4, 78.4, &sp) == PADSIM_OK);
  CHECK(sp.speedup == doctest::Approx(1.6796).epsilon(1e-4));
  CHECK(padsim_cnot_speedup(0.0, 78.4, &sp) == PADSIM_ERR_DOMAIN);
}

TEST_CASE("warning handler receives diagnostics") {
  static std::vector<std::string> seen;
  padsim_set_warning_handler([](const char* m, void*) { seen.emplace_back(m); }, nullptr);
  padsim_system_params p{1.0, 0.5, 0.0, 0.0};
  padsim_grid grid{};
  REQUIRE(padsim_default_grid(4.0, &p, 0, &grid) == PADSIM_OK);
  padsim_set_warning_handler(nullptr, nullptr);
  CHECK_FALSE(seen.empty());
}

TEST_CASE("configs and reports") {
  padsim_config* cfg = nullptr;
  CHECK(padsim_config_parse("[nope]\n", &cfg) == PADSIM_ERR_CONFIG);
  CHECK(cfg == nullptr);
  CHECK(padsim_config_load("/nonexistent.ini", &cfg) == PADSIM_ERR_CONFIG);

  REQUIRE(padsim_config_parse("[speedup]\nv_with_access = 1.3e4\n", &cfg) == PADSIM_OK);
  CHECK(padsim_config_set(cfg, "pad.bogus=1") == PADSIM_ERR_CONFIG);
  REQUIRE(padsim_config_set(cfg, "speedup.v_without=78.4") == PADSIM_OK);

  const fs::path dir = fs::temp_directory_path() / "padsim_capi_out";
  fs::remove_all(dir);
  padsim_report* rep = nullptr;
  REQUIRE(padsim_run_command(cfg, "speedup", dir.c_str(), 1, &rep) == PADSIM_OK);
  CHECK(padsim_report_exit_code(rep) == 0);
  REQUIRE(padsim_report_file_count(rep) == 1);
  CHECK(fs::exists(padsim_report_file(rep, 0)));
  CHECK(padsim_report_file(rep, 5) == nullptr);
  CHECK(std::string(padsim_report_text(rep)).find("speedup") != std::string::npos);
  padsim_report_free(rep);

  REQUIRE(padsim_config_set(cfg, "bloch.n_in_low=") == PADSIM_OK);
  REQUIRE(padsim_run_command(cfg, "bloch", dir.c_str(), 1, &rep) == PADSIM_OK);
  CHECK(padsim_report_exit_code(rep) == 2);
  CHECK(padsim_report_file_count(rep) == 0);
  padsim_report_free(rep);

  padsim_config_free(cfg);
  padsim_config_free(nullptr);
  fs::remove_all(dir);
}
