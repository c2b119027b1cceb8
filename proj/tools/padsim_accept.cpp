// Acceptance run with the default configuration. Exit 0 only if every
// criterion passes.

#include <cstdio>
#include <cstdlib>
#include <string>
#include <thread>

#include "padsim/padsim.h"

int main(int argc, char** argv) {
  unsigned threads = std::thread::hardware_concurrency();
  if (threads == 0) threads = 1;
  if (argc > 1) threads = static_cast<unsigned>(std::strtoul(argv[1], nullptr, 10));

  padsim_config* cfg = nullptr;
  if (padsim_config_default(&cfg) != PADSIM_OK) {
    std::fprintf(stderr, "%s\n", padsim_last_error());
    return 2;
  }
  padsim_report* rep = nullptr;
  const padsim_status st = padsim_run_acceptance(cfg, threads, &rep);
  padsim_config_free(cfg);
  if (st != PADSIM_OK) {
    std::fprintf(stderr, "%s\n", padsim_last_error());
    return 3;
  }
  std::fputs(padsim_report_text(rep), stdout);
  const int code = padsim_report_exit_code(rep);
  padsim_report_free(rep);
  return code;
}
