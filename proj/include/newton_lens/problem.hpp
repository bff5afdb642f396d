#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "newton_lens/differentiate.hpp"
#include "newton_lens/evaluate.hpp"
#include "newton_lens/expr.hpp"
#include "newton_lens/format.hpp"
#include "newton_lens/parser.hpp"
#include "newton_lens/simplify.hpp"

namespace newton_lens {

inline constexpr double inf = std::numeric_limits<double>::infinity();

/// Open interval (lo, hi) with optional puncture points removed.
struct Domain {
  double lo = -inf;
  double hi = inf;
  std::vector<double> excluded;
  /// Distance under which a point counts as sitting on a puncture.
  double puncture_tol = 1e-12;

  [[nodiscard]] bool contains(double x) const {
    if (!(x > lo && x < hi)) return false;
    return std::none_of(excluded.begin(), excluded.end(),
                        [&](double p) { return std::abs(x - p) <= puncture_tol; });
  }

  /// Largest t with (c - t, c + t) inside the domain.
  [[nodiscard]] double radius_around(double c) const {
    double r = std::min(c - lo, hi - c);
    for (double p : excluded) r = std::min(r, std::abs(c - p));
    return std::max(r, 0.0);
  }
};

/// Closed interval [lo, hi] used for scans, grids and basins.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  [[nodiscard]] double width() const { return hi - lo; }
  [[nodiscard]] bool contains(double x) const { return x >= lo && x <= hi; }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline double parse_bound(std::string_view s) {
  s = trim(s);
  if (s == "inf" || s == "+inf") return inf;
  if (s == "-inf") return -inf;
  std::string text(s);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("bad number '" + text + "'");
  }
  if (used != text.size() || !std::isfinite(v)) throw std::invalid_argument("bad number '" + text + "'");
  return v;
}

inline std::pair<double, double> parse_pair(std::string_view text) {
  std::string_view s = trim(text);
  if (s.size() >= 2 && (s.front() == '(' || s.front() == '[') && (s.back() == ')' || s.back() == ']')) {
    s = s.substr(1, s.size() - 2);
  }
  const auto comma = s.find(',');
  if (comma == std::string_view::npos) throw std::invalid_argument("expected 'lo,hi' in '" + std::string(text) + "'");
  return {parse_bound(s.substr(0, comma)), parse_bound(s.substr(comma + 1))};
}

}  // namespace detail

/// Parses "(lo,hi)" where either bound may be inf/-inf.
inline Domain parse_domain(std::string_view text, std::vector<double> excluded = {}) {
  auto [lo, hi] = detail::parse_pair(text);
  if (!(lo < hi)) throw std::invalid_argument("domain needs lo < hi");
  for (double p : excluded) {
    if (!(p > lo && p < hi)) throw std::invalid_argument("excluded point outside the domain");
  }
  return Domain{lo, hi, std::move(excluded)};
}

/// Parses "[a,b]", "(a,b)" or "a,b" as a finite closed interval.
inline Interval parse_interval(std::string_view text) {
  auto [lo, hi] = detail::parse_pair(text);
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
    throw std::invalid_argument("interval needs finite lo < hi");
  }
  return Interval{lo, hi};
}

/// Comma-separated list of finite numbers, e.g. "0,1.5".
inline std::vector<double> parse_number_list(std::string_view text) {
  std::vector<double> out;
  std::string_view s = detail::trim(text);
  while (!s.empty()) {
    const auto comma = s.find(',');
    const double v = detail::parse_bound(s.substr(0, comma));
    if (!std::isfinite(v)) throw std::invalid_argument("expected a finite number");
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

/// f, its derivative, and the open domain the iteration must stay in.
struct NewtonProblem {
  Expression f;
  Expression fprime;
  Domain domain;
  std::string source;  // the text f was parsed from, echoed in outputs

  static NewtonProblem from(Expression f, Domain domain = {}, std::string source = {}) {
    Expression df = simplify(differentiate(f));
    if (source.empty()) source = format(f);
    return NewtonProblem{std::move(f), std::move(df), std::move(domain), std::move(source)};
  }

  static NewtonProblem parse(std::string_view text, Domain domain = {}) {
    return from(newton_lens::parse(text), std::move(domain), std::string(text));
  }

  [[nodiscard]] EvalResult value(double x) const { return evaluate(f, x); }
  [[nodiscard]] EvalResult slope(double x) const { return evaluate(fprime, x); }
};

}  // namespace newton_lens
