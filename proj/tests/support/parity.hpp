#pragma once

// Trace inputs that are sent through both front ends and compared.

#include <string>
#include <vector>

#include "newton_lens/cli.hpp"
#include "support/fixtures.hpp"

namespace fixtures {

struct TraceCase {
  const Example* example;
  double x0;
  int k;
};

inline const std::vector<TraceCase> parity_cases{
    {&example1, 0.2, 30},    {&example2, 1.0, 40},  {&example3, 1.0, 60},     {&example4, 0.9, 20},
    {&example4, 1.0, 20},    {&example5, 2.0, 5},   {&example5, 1.5, 10},     {&example6, 0.4656, 20},
    {&example7, -0.65, 25},  {&tangent_cubic, 6.0, 3},
};

inline std::vector<std::string> iterate_argv(const TraceCase& c) {
  std::vector<std::string> a{"newton-lens", "iterate", "-f", c.example->function};
  if (*c.example->domain != '\0') a.insert(a.end(), {"--domain", c.example->domain});
  if (*c.example->exclude != '\0') a.insert(a.end(), {"--exclude", c.example->exclude});
  a.insert(a.end(), {"--x0", newton_lens::shortest_repr(c.x0), "-k", std::to_string(c.k), "--format", "json"});
  return a;
}

inline std::string trace_request(const TraceCase& c) {
  newton_lens::Json j;
  j["function"] = c.example->function;
  if (*c.example->domain != '\0') j["domain"] = c.example->domain;
  if (*c.example->exclude != '\0') j["exclude"] = c.example->exclude;
  j["x0"] = c.x0;
  j["k"] = c.k;
  return j.dump();
}

}  // namespace fixtures
