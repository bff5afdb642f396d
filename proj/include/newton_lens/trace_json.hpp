#pragma once

#include <cmath>
#include <string>

#include <json.hpp>

#include "newton_lens/engine.hpp"

namespace newton_lens {

using Json = nlohmann::ordered_json;

namespace detail {

/// NaN becomes null; infinities become the strings "inf" / "-inf".
inline Json number(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

inline double number_from(const Json& j) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return inf;
    if (s == "-inf") return -inf;
    throw std::invalid_argument("unexpected string '" + s + "' for a number");
  }
  return j.get<double>();
}

}  // namespace detail

inline Json to_json(const Outcome& o) {
  Json j;
  j["kind"] = std::string(name_of(kind_of(o)));
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, outcome::Converged>) {
          j["root"] = v.root;
          j["at_iter"] = v.at_iter;
        } else if constexpr (std::is_same_v<T, outcome::Cycle>) {
          j["period"] = v.period;
          j["first_iter"] = v.first_iter;
        } else if constexpr (std::is_same_v<T, outcome::DomainExit>) {
          j["at_iter"] = v.at_iter;
          j["offending_x"] = detail::number(v.offending_x);
        } else if constexpr (std::is_same_v<T, outcome::EvaluationFault>) {
          j["at_iter"] = v.at_iter;
          j["fault"] = std::string(name_of(v.fault));
        } else if constexpr (!std::is_same_v<T, outcome::Inconclusive>) {
          j["at_iter"] = v.at_iter;
        }
      },
      o);
  return j;
}

/// {"function", "x0", "k", "iterates": [{"x","fx","dfx"}...], "outcome"} in
/// that key order.
inline Json to_json(const IterationTrace& t, std::string_view function_text) {
  Json j;
  j["function"] = std::string(function_text);
  j["x0"] = t.x0;
  j["k"] = t.requested_k;
  Json its = Json::array();
  for (const Iterate& it : t.iterates) {
    Json row;
    row["x"] = detail::number(it.x);
    row["fx"] = detail::number(it.fx);
    row["dfx"] = detail::number(it.dfx);
    its.push_back(std::move(row));
  }
  j["iterates"] = std::move(its);
  j["outcome"] = to_json(t.outcome);
  return j;
}

/// Canonical text for documents: two-space indent plus trailing newline.
inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace newton_lens
