#pragma once

// Request handling for the HTTP API, independent of any server library:
// body text in, status and body text out.

#include <chrono>
#include <set>
#include <string>
#include <string_view>

#include "newton_lens/commands.hpp"

namespace newton_lens::service {

struct Response {
  int status = 200;
  std::string body;
};

struct Config {
  Limits limits;
  std::chrono::milliseconds timeout{5000};
};

inline Response error(int status, std::string_view kind, const std::string& message,
                      std::optional<std::size_t> offset = {}) {
  Json e;
  e["kind"] = std::string(kind);
  e["message"] = message;
  if (offset) e["offset"] = *offset;
  Json j;
  j["error"] = std::move(e);
  return {status, dump(j)};
}

namespace detail {

using newton_lens::detail::require;

class Body {
 public:
  Body(const Json& j, std::set<std::string> allowed) : j_(j) {
    require(j.is_object(), "request body must be a JSON object");
    for (const auto& [key, _] : j.items()) {
      require(allowed.count(key) != 0, "unknown field '" + key + "'");
    }
  }

  [[nodiscard]] bool has(const char* key) const { return j_.contains(key) && !j_.at(key).is_null(); }

  [[nodiscard]] double number(const char* key) const {
    require(has(key), std::string("field '") + key + "' is required");
    const Json& v = j_.at(key);
    require(v.is_number(), std::string("field '") + key + "' must be a number");
    return v.get<double>();
  }

  template <class Int>
  [[nodiscard]] Int integer(const char* key, Int fallback) const {
    if (!has(key)) return fallback;
    const Json& v = j_.at(key);
    require(v.is_number_integer() && v.get<long long>() >= 0, std::string("field '") + key + "' must be a non-negative integer");
    const long long n = v.get<long long>();
    require(n <= static_cast<long long>(std::numeric_limits<int>::max()), std::string("field '") + key + "' is too large");
    return static_cast<Int>(n);
  }

  [[nodiscard]] std::string string(const char* key) const {
    const Json& v = j_.at(key);
    require(v.is_string(), std::string("field '") + key + "' must be a string");
    return v.get<std::string>();
  }

  [[nodiscard]] const Json& raw(const char* key) const { return j_.at(key); }

 private:
  const Json& j_;
};

inline ProblemInput problem_from(const Body& b) {
  ProblemInput in;
  require(b.has("function") != b.has("f"), "exactly one of 'function' or 'f' is required");
  in.function = b.has("function") ? b.string("function") : b.string("f");
  if (b.has("domain")) in.domain = b.string("domain");
  if (b.has("exclude")) {
    const Json& e = b.raw("exclude");
    if (e.is_string()) {
      try {
        in.exclude = parse_number_list(e.get<std::string>());
      } catch (const std::invalid_argument& ex) {
        require(false, std::string("exclude: ") + ex.what());
      }
    } else {
      require(e.is_array(), "field 'exclude' must be an array of numbers");
      for (const auto& v : e) {
        require(v.is_number(), "field 'exclude' must be an array of numbers");
        in.exclude.push_back(v.get<double>());
      }
    }
  }
  return in;
}

inline Tolerances tolerances_from(const Body& b) {
  Tolerances t;
  if (!b.has("tolerances")) return t;
  const Json& j = b.raw("tolerances");
  require(j.is_object(), "field 'tolerances' must be an object");
  for (const auto& [key, v] : j.items()) {
    require(v.is_number() && v.get<double>() >= 0.0, "tolerance '" + key + "' must be a non-negative number");
    const double x = v.get<double>();
    if (key == "f_rel") t.f_rel = x;
    else if (key == "x_rel") t.x_rel = x;
    else if (key == "deriv_rel") t.deriv_rel = x;
    else require(false, "unknown tolerance '" + key + "'");
  }
  return t;
}

inline Interval interval_from(const Body& b) {
  require(b.has("interval"), "field 'interval' is required");
  const Json& v = b.raw("interval");
  if (v.is_string()) {
    try {
      return parse_interval(v.get<std::string>());
    } catch (const std::invalid_argument& e) {
      require(false, std::string("interval: ") + e.what());
    }
  }
  require(v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number(),
          "field 'interval' must be [lo, hi] or a string");
  return Interval{v[0].get<double>(), v[1].get<double>()};
}

inline std::optional<Viewport> viewport_from(const Body& b) {
  if (!b.has("viewport")) return std::nullopt;
  const Json& v = b.raw("viewport");
  if (v.is_array()) {
    require(v.size() == 4 && std::all_of(v.begin(), v.end(), [](const Json& x) { return x.is_number(); }),
            "field 'viewport' must be [xmin, xmax, ymin, ymax]");
    return Viewport{v[0].get<double>(), v[1].get<double>(), v[2].get<double>(), v[3].get<double>()};
  }
  require(v.is_object(), "field 'viewport' must be an object or array");
  Viewport out;
  for (const char* key : {"xmin", "xmax", "ymin", "ymax"}) {
    require(v.contains(key) && v.at(key).is_number(), std::string("viewport.") + key + " must be a number");
  }
  out.xmin = v.at("xmin").get<double>();
  out.xmax = v.at("xmax").get<double>();
  out.ymin = v.at("ymin").get<double>();
  out.ymax = v.at("ymax").get<double>();
  return out;
}

inline const std::set<std::string> problem_keys{"function", "f", "domain", "exclude"};

inline std::set<std::string> keys(std::initializer_list<const char*> extra) {
  std::set<std::string> out = problem_keys;
  for (const char* k : extra) out.insert(k);
  return out;
}

inline TraceInput trace_from(const Body& b) {
  TraceInput in;
  in.problem = problem_from(b);
  in.x0 = b.number("x0");
  in.k = b.integer<int>("k", in.k);
  in.tolerances = tolerances_from(b);
  return in;
}

}  // namespace detail

inline Json trace_payload(const Json& body, const Config& cfg = {}) {
  const detail::Body b(body, detail::keys({"x0", "k", "tolerances"}));
  return trace_document(detail::trace_from(b), cfg.limits);
}

inline Json scene_payload(const Json& body, const Config& cfg = {}) {
  const detail::Body b(body, detail::keys({"x0", "k", "tolerances", "viewport", "graph_samples"}));
  SceneInput in;
  in.trace = detail::trace_from(b);
  in.viewport = detail::viewport_from(b);
  in.graph_samples = b.integer<int>("graph_samples", in.graph_samples);
  return scene_document(in, cfg.limits);
}

inline Json basin_payload(const Json& body, const Config& cfg = {}) {
  const detail::Body b(body, detail::keys({"interval", "n", "k", "tolerances"}));
  BasinInput in;
  in.problem = detail::problem_from(b);
  in.interval = detail::interval_from(b);
  in.n = b.integer<std::size_t>("n", in.n);
  in.k = b.integer<int>("k", in.k);
  in.tolerances = detail::tolerances_from(b);
  return basin_document(in, cfg.limits, std::chrono::steady_clock::now() + cfg.timeout);
}

inline Json radius_payload(const Json& body, const Config& cfg = {}) {
  const detail::Body b(body, detail::keys({"interval", "grid", "root", "seed"}));
  RadiusInput in;
  in.problem = detail::problem_from(b);
  in.interval = detail::interval_from(b);
  in.grid = b.integer<std::size_t>("grid", in.grid);
  if (b.has("root")) in.root_hint = b.number("root");
  if (b.has("seed")) in.seed = b.integer<std::uint64_t>("seed", in.seed);
  return radius_document(in, cfg.limits);
}

/// Dispatches one API call. `endpoint` is the path segment after /api/v1/.
inline Response handle(std::string_view endpoint, std::string_view body_text, const Config& cfg = {}) {
  try {
    Json body;
    try {
      body = Json::parse(body_text.begin(), body_text.end());
    } catch (const Json::parse_error& e) {
      return error(400, "invalid-json", e.what(), e.byte > 0 ? std::optional<std::size_t>(e.byte - 1) : std::nullopt);
    }
    Json out;
    if (endpoint == "trace") out = trace_payload(body, cfg);
    else if (endpoint == "scene") out = scene_payload(body, cfg);
    else if (endpoint == "basin") out = basin_payload(body, cfg);
    else if (endpoint == "radius") out = radius_payload(body, cfg);
    else return error(404, "not-found", "no endpoint '" + std::string(endpoint) + "'");
    return {200, dump(out)};
  } catch (const ParseError& e) {
    return error(400, "parse", e.what(), e.offset());
  } catch (const RequestError& e) {
    if (e.kind() == RequestError::Kind::outside_domain) return error(422, "outside-domain", e.what());
    return error(400, "validation", e.what());
  } catch (const AnalysisError& e) {
    if (e.kind() == AnalysisError::Kind::timeout) return error(503, "timeout", e.what());
    return error(422, "analysis", e.what());
  } catch (const Json::exception& e) {
    return error(400, "validation", e.what());
  } catch (const std::invalid_argument& e) {
    return error(400, "validation", e.what());
  } catch (const std::exception& e) {
    return error(500, "internal", e.what());
  }
}

inline Response healthz() { return {200, "{\"ok\":true}\n"}; }

}  // namespace newton_lens::service
