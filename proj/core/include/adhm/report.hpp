#pragma once

#include <map>
#include <string>

#include "adhm/linalg.hpp"

namespace adhm {

// Machine-readable outcome of one CLI run.  Checks are registered with their
// thresholds as the run progresses; the report passes iff every registered
// maximum error stays below its threshold.

struct RunReport {
  std::string command;
  json parameters = json::object();
  json results = json::object();
  std::map<std::string, double> max_errors;
  std::map<std::string, double> thresholds;

  // record a named check; repeated names keep the worst error and the
  // tightest threshold
  void check(const std::string& name, double error, double threshold);

  // a hard boolean gate (convergence flags and the like)
  void require(const std::string& name, bool ok);

  bool pass() const;
  json to_json() const;
  std::string to_string() const;  // pretty-printed, trailing newline
};

// writes to the path, or to stdout when path is empty
void emit_report(const RunReport& rep, const std::string& out_path);

}  // namespace adhm
