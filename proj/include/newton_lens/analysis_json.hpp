#pragma once

#include <sstream>
#include <string>

#include "newton_lens/analysis.hpp"
#include "newton_lens/trace_json.hpp"

namespace newton_lens {

inline Json to_json(const Interval& iv) { return Json::array({detail::number(iv.lo), detail::number(iv.hi)}); }

inline Json to_json(const RootEstimate& r) {
  Json j;
  j["x_star"] = detail::number(r.x_star);
  j["f_at_root"] = detail::number(r.f_at_root);
  j["dfx_at_root"] = detail::number(r.dfx_at_root);
  j["bracket"] = to_json(r.bracket);
  j["refined_to"] = detail::number(r.refined_to);
  return j;
}

inline Json to_json(const RateEstimate& r) {
  Json j;
  j["order_p"] = detail::number(r.order_p);
  j["linear_rate"] = detail::number(r.linear_rate);
  j["samples_used"] = r.samples_used;
  j["residual"] = detail::number(r.residual);
  return j;
}

inline Json to_json(const ConvergenceRadius& r) {
  Json j;
  j["K"] = detail::number(r.K);
  j["kappa"] = detail::number(r.kappa);
  j["r"] = detail::number(r.r);
  j["interval"] = to_json(r.interval);
  j["uniqueness_interval"] = to_json(r.uniqueness_interval);
  return j;
}

inline Json to_json(const ErrorBoundRow& row) {
  Json j;
  j["iter"] = row.iter;
  j["lhs"] = detail::number(row.lhs);
  j["rhs"] = detail::number(row.rhs);
  j["holds"] = row.holds;
  return j;
}

inline Json to_json(const BasinMap& m, std::string_view function_text) {
  Json j;
  j["function"] = std::string(function_text);
  j["interval"] = to_json(m.interval);
  j["k"] = m.k;
  Json roots = Json::array();
  for (const auto& r : m.roots) roots.push_back(to_json(r));
  j["roots"] = std::move(roots);
  Json samples = Json::array();
  for (const auto& s : m.samples) {
    Json row;
    row["x0"] = detail::number(s.x0);
    row["outcome"] = std::string(name_of(s.outcome));
    row["root_index"] = s.root_index ? Json(*s.root_index) : Json(nullptr);
    samples.push_back(std::move(row));
  }
  j["samples"] = std::move(samples);
  return j;
}

/// "x0,outcome,root_index" with an empty last column for unlabelled samples.
inline std::string to_csv(const BasinMap& m) {
  std::ostringstream out;
  out << "x0,outcome,root_index\n";
  for (const auto& s : m.samples) {
    out << shortest_repr(s.x0) << ',' << name_of(s.outcome) << ',';
    if (s.root_index) out << *s.root_index;
    out << '\n';
  }
  return out.str();
}

inline Json to_json(const ConvergenceReport& rep) {
  Json j;
  j["root"] = to_json(rep.root);
  j["rate"] = rep.rate ? to_json(*rep.rate) : Json(nullptr);
  j["radius"] = to_json(rep.radius);
  Json rows = Json::array();
  for (const auto& row : rep.error_bound) rows.push_back(to_json(row));
  j["error_bound"] = std::move(rows);
  if (!rep.error_bound_note.empty()) j["error_bound_note"] = rep.error_bound_note;
  return j;
}

}  // namespace newton_lens
