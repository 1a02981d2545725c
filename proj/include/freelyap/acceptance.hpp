#pragma once

#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <vector>

namespace freelyap::acceptance {

struct CriterionResult {
  int id;
  std::string name;
  bool passed;
  double measured;
  double threshold;
  double seconds;
  double time_limit;
  std::string detail;
};

struct Options {
  std::uint64_t seed = 20260417;
  std::set<int> only;     // empty means all
  bool skip_mc = false;   // leaves out the finite-N Monte Carlo criteria
};

struct Criterion {
  int id;
  std::string name;
  bool monte_carlo;
  std::function<CriterionResult(const Options&)> run;
};

const std::vector<Criterion>& criteria();

/// Runs the selected criteria; `on_result` sees each result as it finishes.
std::vector<CriterionResult> run(const Options& opts,
                                 const std::function<void(const CriterionResult&)>& on_result = {});

/// One line: status, id, name, measured value against threshold, runtime.
std::string format_line(const CriterionResult& r);

}  // namespace freelyap::acceptance
