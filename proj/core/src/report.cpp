#include "adhm/report.hpp"

#include <fstream>
#include <iostream>

namespace adhm {

void RunReport::check(const std::string& name, double error,
                      double threshold) {
  auto it = max_errors.find(name);
  if (it == max_errors.end()) {
    max_errors[name] = error;
    thresholds[name] = threshold;
  } else {
    it->second = std::max(it->second, error);
    thresholds[name] = std::min(thresholds[name], threshold);
  }
}

void RunReport::require(const std::string& name, bool ok) {
  // encoded as error 0 or 1 against threshold 1/2 so it folds into pass()
  check(name, ok ? 0.0 : 1.0, 0.5);
}

bool RunReport::pass() const {
  for (const auto& [name, err] : max_errors)
    if (!(err < thresholds.at(name))) return false;
  return true;
}

json RunReport::to_json() const {
  json j;
  j["command"] = command;
  j["parameters"] = parameters;
  j["results"] = results;
  j["max_errors"] = json::object();
  j["thresholds"] = json::object();
  for (const auto& [name, err] : max_errors) {
    j["max_errors"][name] = err;
    j["thresholds"][name] = thresholds.at(name);
  }
  j["pass"] = pass();
  return j;
}

std::string RunReport::to_string() const { return to_json().dump(2) + "\n"; }

void emit_report(const RunReport& rep, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << rep.to_string();
    return;
  }
  std::ofstream f(out_path);
  if (!f) throw std::runtime_error("emit_report: cannot open " + out_path);
  f << rep.to_string();
}

}  // namespace adhm
