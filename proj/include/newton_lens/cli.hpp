#pragma once

// The newton-lens command line. run_cli is the whole program minus process
// setup, so tests can drive it in-process.

#include <algorithm>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "newton_lens/commands.hpp"
#include "newton_lens/scene_svg.hpp"

namespace newton_lens {

struct ServeArgs {
  std::string listen;
  std::string allow_origin = "*";
  std::string static_dir;
};

struct CliEnv {
  bool color = false;  // ANSI colour on the outcome line
  std::function<int(const ServeArgs&)> serve;  // blocks until the server stops
};

namespace cli_detail {

struct ProblemFlags {
  std::string function;
  std::string domain;
  std::string exclude;

  void add(CLI::App& app) {
    app.add_option("-f,--function", function, "f(x), e.g. \"x^3 - x\"")->required();
    app.add_option("--domain", domain, "open domain \"(lo,hi)\"; inf allowed");
    app.add_option("--exclude", exclude, "comma-separated points removed from the domain");
  }

  [[nodiscard]] ProblemInput input() const {
    ProblemInput in;
    in.function = function;
    if (!domain.empty()) in.domain = domain;
    if (!exclude.empty()) {
      try {
        in.exclude = parse_number_list(exclude);
      } catch (const std::invalid_argument& e) {
        throw RequestError(RequestError::Kind::validation, std::string("--exclude: ") + e.what());
      }
    }
    return in;
  }
};

struct ToleranceFlags {
  Tolerances tol;
  void add(CLI::App& app) {
    app.add_option("--f-rel", tol.f_rel, "residual tolerance relative to the problem scale")->check(CLI::NonNegativeNumber);
    app.add_option("--x-rel", tol.x_rel, "step tolerance relative to 1 + |x|")->check(CLI::NonNegativeNumber);
    app.add_option("--deriv-rel", tol.deriv_rel, "derivative floor relative to scale (1 + |x|)")
        ->check(CLI::NonNegativeNumber);
  }
};

inline Interval interval_arg(const std::string& text) {
  try {
    return parse_interval(text);
  } catch (const std::invalid_argument& e) {
    throw RequestError(RequestError::Kind::validation, std::string("--interval: ") + e.what());
  }
}

inline Viewport viewport_arg(const std::string& text) {
  std::vector<double> v;
  try {
    v = parse_number_list(text);
  } catch (const std::invalid_argument& e) {
    throw RequestError(RequestError::Kind::validation, std::string("--viewport: ") + e.what());
  }
  if (v.size() != 4) throw RequestError(RequestError::Kind::validation, "--viewport needs xmin,xmax,ymin,ymax");
  return Viewport{v[0], v[1], v[2], v[3]};
}

inline std::string cell(double v) { return std::isnan(v) ? std::string("-") : shortest_repr(v); }

inline std::string trace_table(const IterationTrace& t, const std::string& function, bool color) {
  std::ostringstream o;
  o << "function: " << function << '\n';
  o << std::left << std::setw(6) << "k" << std::setw(26) << "x" << std::setw(26) << "f(x)"
    << "f'(x)\n";
  for (std::size_t i = 0; i < t.iterates.size(); ++i) {
    const Iterate& it = t.iterates[i];
    o << std::setw(6) << i << std::setw(26) << cell(it.x) << std::setw(26) << cell(it.fx) << cell(it.dfx);
    if (it.fault) o << "  (" << name_of(*it.fault) << ')';
    o << '\n';
  }
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, outcome::Converged>) o << "root: " << shortest_repr(v.root) << '\n';
        if constexpr (std::is_same_v<T, outcome::Cycle>) o << "period: " << v.period << '\n';
        if constexpr (std::is_same_v<T, outcome::EvaluationFault>) o << "fault: " << name_of(v.fault) << '\n';
        if constexpr (std::is_same_v<T, outcome::DomainExit>) o << "offending x: " << cell(v.offending_x) << '\n';
      },
      t.outcome);
  const OutcomeKind kind = kind_of(t.outcome);
  std::string name(name_of(kind));
  if (color) name = (kind == OutcomeKind::converged ? "\x1b[32m" : "\x1b[33m") + name + "\x1b[0m";
  o << "outcome: " << name;
  if (const auto at = at_iter(t.outcome)) o << " at iter " << *at;
  o << '\n';
  return o.str();
}

inline std::string roots_table(const Json& doc) {
  std::ostringstream o;
  o << std::left << std::setw(26) << "x*" << std::setw(26) << "f(x*)"
    << "f'(x*)\n";
  for (const auto& r : doc.at("roots")) {
    const auto num = [](const Json& v) { return cell(detail::number_from(v)); };
    o << std::setw(26) << num(r.at("x_star")) << std::setw(26) << num(r.at("f_at_root")) << num(r.at("dfx_at_root"))
      << '\n';
  }
  return o.str();
}

/// Writes to the -o path when given, otherwise to `out`.
inline void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty()) {
    out << content;
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::ios_base::failure("cannot open '" + path + "' for writing");
  f << content;
  f.flush();
  if (!f) throw std::ios_base::failure("failed writing '" + path + "'");
}

}  // namespace cli_detail

/// Runs one command line. Exit codes: 0 success (for iterate: converged),
/// 2 iterate ended any other way, 1 usage, parse, validation or I/O error.
inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err, const CliEnv& env = {}) {
  using namespace cli_detail;
  CLI::App app{"Newton's method laboratory: traces, scenes, basins and convergence radii", "newton-lens"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "newton-lens 1.0.0");

  std::string out_path;
  std::string format;
  ProblemFlags pf;
  ToleranceFlags tf;
  double x0 = 0.0;
  int k = 20;
  std::string interval;
  std::size_t samples = 400;
  std::size_t grid = 400;
  std::size_t probes = 200;
  int graph_samples = 400;
  std::string viewport;
  std::optional<double> root_hint;
  std::uint64_t seed = 0x5EED;
  ServeArgs serve_args;

  const auto trace_flags = [&](CLI::App* sub) {
    pf.add(*sub);
    sub->add_option("--x0", x0, "initial point")->required();
    sub->add_option("-k,--iters", k, "maximum Newton steps")->capture_default_str();
    tf.add(*sub);
  };

  auto* iterate = app.add_subcommand("iterate", "run Newton's method and print the trace");
  trace_flags(iterate);
  iterate->add_option("-o,--out", out_path, "output file (default stdout)");
  iterate->add_option("--format", format, "text or json")->check(CLI::IsMember({"text", "json"}));

  auto* render = app.add_subcommand("render", "draw the tangent construction as SVG (or scene JSON)");
  trace_flags(render);
  render->add_option("-o,--out", out_path, "output file (default stdout)");
  render->add_option("--format", format, "svg or json")->check(CLI::IsMember({"svg", "json"}));
  render->add_option("--viewport", viewport, "xmin,xmax,ymin,ymax (default: fit the iterates)");
  render->add_option("--graph-samples", graph_samples, "points sampled along the graph")->capture_default_str();

  auto* basin = app.add_subcommand("basin", "classify starts across an interval");
  pf.add(*basin);
  tf.add(*basin);
  basin->add_option("--interval", interval, "[a,b]")->required();
  basin->add_option("-n,--samples", samples, "intervals between starts (n + 1 starts)")->capture_default_str();
  basin->add_option("-k,--iters", k, "maximum Newton steps per start")->capture_default_str();
  basin->add_option("-o,--out", out_path, "output file (default stdout)");
  basin->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  auto* radius = app.add_subcommand("radius", "Lipschitz constant K and radius r = min(kappa, 2/(3K))");
  pf.add(*radius);
  radius->add_option("--interval", interval, "[a,b] holding the root; K is estimated here")->required();
  radius->add_option("--grid", grid, "grid intervals for roots and K")->capture_default_str();
  radius->add_option("--root", root_hint, "use the root nearest this value (default: interval midpoint)");
  radius->add_option("--seed", seed, "seed for the random pairs in K")->capture_default_str();
  radius->add_option("-o,--out", out_path, "output file (default stdout)");
  radius->add_option("--format", format, "json")->check(CLI::IsMember({"json"}));

  auto* roots = app.add_subcommand("roots", "bracket and refine the roots in an interval");
  pf.add(*roots);
  roots->add_option("--interval", interval, "[a,b]")->required();
  roots->add_option("--grid", grid, "grid intervals scanned for sign changes")->capture_default_str();
  roots->add_option("-o,--out", out_path, "output file (default stdout)");
  roots->add_option("--format", format, "json or text")->check(CLI::IsMember({"json", "text"}));

  auto* report = app.add_subcommand("report", "order, radius and error bound for a converging trace");
  trace_flags(report);
  report->add_option("--interval", interval, "[a,b] where K is estimated")->required();
  report->add_option("--grid", grid, "grid intervals for K")->capture_default_str();
  report->add_option("--probes", probes, "starts probed inside the radius")->capture_default_str();
  report->add_option("--seed", seed, "seed for the random pairs in K")->capture_default_str();
  report->add_option("-o,--out", out_path, "output file (default stdout)");
  report->add_option("--format", format, "json")->check(CLI::IsMember({"json"}));

  auto* serve = app.add_subcommand("serve", "serve the JSON API over HTTP");
  serve->add_option("--listen", serve_args.listen, "host:port (default $NEWTON_LENS_LISTEN or 127.0.0.1:8080)");
  serve->add_option("--allow-origin", serve_args.allow_origin, "CORS origin")->capture_default_str();
  serve->add_option("--static", serve_args.static_dir, "directory served at /");

  std::reverse(args.begin(), args.end());
  if (!args.empty()) args.pop_back();  // program name
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (iterate->parsed()) {
      const TraceInput in{pf.input(), x0, k, tf.tol};
      const auto r = compute_trace(in);
      const std::string text = format == "json" ? dump(to_json(r.trace, r.problem.source))
                                                : trace_table(r.trace, r.problem.source, env.color && out_path.empty());
      emit(out_path, text, out);
      return kind_of(r.trace.outcome) == OutcomeKind::converged ? 0 : 2;
    }
    if (render->parsed()) {
      SceneInput in{{pf.input(), x0, k, tf.tol}, std::nullopt, graph_samples};
      if (!viewport.empty()) in.viewport = viewport_arg(viewport);
      const Scene s = compute_scene(in);
      emit(out_path, format == "json" ? dump(to_json(s)) : to_svg(s), out);
      return 0;
    }
    if (basin->parsed()) {
      const BasinInput in{pf.input(), interval_arg(interval), samples, k, tf.tol};
      emit(out_path, format == "json" ? dump(basin_document(in)) : basin_csv(in), out);
      return 0;
    }
    if (radius->parsed()) {
      const RadiusInput in{pf.input(), interval_arg(interval), grid, root_hint, seed};
      emit(out_path, dump(radius_document(in)), out);
      return 0;
    }
    if (roots->parsed()) {
      const RootsInput in{pf.input(), interval_arg(interval), grid};
      const Json doc = roots_document(in);
      emit(out_path, format == "text" ? roots_table(doc) : dump(doc), out);
      return 0;
    }
    if (report->parsed()) {
      const ReportInput in{{pf.input(), x0, k, tf.tol}, interval_arg(interval), grid, probes, seed};
      emit(out_path, dump(report_document(in)), out);
      return 0;
    }
    if (serve->parsed()) {
      if (!env.serve) {
        err << "error: serving is not available here\n";
        return 1;
      }
      return env.serve(serve_args);
    }
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace newton_lens
