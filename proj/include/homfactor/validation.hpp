#pragma once

#include <string>
#include <vector>

namespace homfactor {

// Result of a report-valued check: ok iff violations is empty. Warnings flag
// legal-but-suspicious input (e.g. a bag with no covering relation).
struct ValidationReport {
  std::vector<std::string> violations;
  std::vector<std::string> warnings;

  bool ok() const { return violations.empty(); }

  void violation(std::string msg) { violations.push_back(std::move(msg)); }
  void warn(std::string msg) { warnings.push_back(std::move(msg)); }

  std::string summary() const {
    if (ok()) return "ok";
    std::string s;
    for (const auto& v : violations) {
      if (!s.empty()) s += "; ";
      s += v;
    }
    return s;
  }
};

}  // namespace homfactor
