#ifndef PADSIM_APP_ACCEPTANCE_HPP
#define PADSIM_APP_ACCEPTANCE_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "app/config.hpp"

namespace padsim::app {

struct Check {
  int criterion = 0;
  std::string name;
  double measured = 0.0;
  std::string expected;  ///< rendered expectation, e.g. "0.993 +- 0.002"
  bool pass = false;
  bool informational = false;  ///< shown but not counted
  std::string note;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::vector<Check> checks;
};

struct AcceptanceReport {
  std::vector<CriterionResult> criteria;

  bool all_pass() const;
  std::size_t check_count() const;
};

AcceptanceReport run_acceptance(const RunConfig& cfg, unsigned threads);

/// Sub-check lines followed by one "PASS"/"FAIL" line per criterion.
void print_report(std::ostream& os, const AcceptanceReport& report);

}  // namespace padsim::app

#endif  // PADSIM_APP_ACCEPTANCE_HPP
