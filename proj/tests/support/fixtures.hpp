#pragma once

// The worked examples used across test binaries.

#include <string>

#include "newton_lens/problem.hpp"

namespace fixtures {

struct Example {
  const char* name;
  const char* function;
  const char* domain;  // "(lo,hi)" text, empty for the real line
  const char* exclude; // comma separated punctures, may be empty
};

inline const Example example1{"example-1", "x^(1/3)", "", ""};
inline const Example example2{"example-2", "x^(2/3)", "", ""};
inline const Example example3{"example-3", "x^3", "", ""};
inline const Example example4{"example-4", "x/sqrt(1 + x^2)", "", ""};
inline const Example example5{"example-5", "1 - 1/x", "(0,inf)", ""};
inline const Example example6{"example-6", "x^3 - x", "", ""};
inline const Example example7{"example-7", "abs(x)^x + exp(x) + ln(abs(x)) + cbrt(x)", "", "0"};
inline const Example tangent_cubic{"tangent-cubic", "0.01*x^3 + 0.01*x^2 - 0.02*x - 0.25", "", ""};

inline newton_lens::Domain domain_of(const Example& e) {
  newton_lens::Domain d;
  if (*e.domain != '\0') d = newton_lens::parse_domain(e.domain);
  if (*e.exclude != '\0') d.excluded = newton_lens::parse_number_list(e.exclude);
  return d;
}

inline newton_lens::NewtonProblem problem(const Example& e) {
  return newton_lens::NewtonProblem::parse(e.function, domain_of(e));
}

}  // namespace fixtures
