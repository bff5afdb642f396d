#include <gtest/gtest.h>

#include <cmath>
#include <functional>

#include "newton_lens/engine.hpp"
#include "newton_lens/trace_json.hpp"

namespace nl = newton_lens;
namespace oc = nl::outcome;

namespace {

nl::NewtonProblem problem(std::string_view f, nl::Domain d = {}) { return nl::NewtonProblem::parse(f, std::move(d)); }

double step(const nl::NewtonProblem& p, double x) {
  const auto r = nl::newton_step(p, x);
  EXPECT_TRUE(std::holds_alternative<double>(r));
  return std::get<double>(r);
}

// Compares iterates against a closed form while magnitudes stay representable.
// `cancellation` adds an absolute allowance of that many ulps of the previous
// iterate, for maps whose step x - f/f' cancels almost all of x.
void expect_closed_form(const nl::IterationTrace& t, const std::function<double(int)>& exact, double rel,
                        double cancellation = 0.0) {
  int checked = 0;
  for (std::size_t k = 0; k < t.iterates.size(); ++k) {
    const double want = exact(static_cast<int>(k));
    if (!(std::abs(want) >= 1e-300 && std::abs(want) <= 1e300)) break;
    const double floor = k > 0 ? cancellation * 0x1p-52 * std::abs(t.iterates[k - 1].x) : 0.0;
    EXPECT_NEAR(t.iterates[k].x, want, rel * std::abs(want) + floor) << "k=" << k;
    ++checked;
  }
  EXPECT_GE(checked, 3);
}

}  // namespace

TEST(NewtonStep, Examples) {
  EXPECT_NEAR(step(problem("x^(1/3)"), 0.2), -0.4, 1e-15);
  EXPECT_EQ(step(problem("x^3 - x"), 0.5), -1.0);
  EXPECT_EQ(step(problem("x^3 - x"), 1.0), 1.0);
}

TEST(NewtonStep, Faults) {
  const auto flat = nl::newton_step(problem("x^2"), 0.0);
  ASSERT_TRUE(std::holds_alternative<nl::StepFault>(flat));
  EXPECT_EQ(std::get<nl::StepFault>(flat).reason, nl::StepFault::Reason::derivative_too_small);

  const auto bad = nl::newton_step(problem("ln(x)"), -1.0);
  ASSERT_TRUE(std::holds_alternative<nl::StepFault>(bad));
  EXPECT_EQ(std::get<nl::StepFault>(bad).fault, nl::FaultKind::log_of_negative);
}

TEST(Run, DomainExitReportsOffendingPoint) {
  const auto p = problem("1 - 1/x", nl::parse_domain("(0,inf)"));
  const auto t = nl::run(p, 2.0, 5);
  ASSERT_EQ(t.iterates.size(), 2u);
  EXPECT_EQ(t.iterates[0].x, 2.0);
  EXPECT_EQ(t.iterates[1].x, 0.0);
  EXPECT_TRUE(std::isnan(t.iterates[1].fx));
  EXPECT_EQ(t.outcome, nl::Outcome(oc::DomainExit{1, 0.0}));
}

TEST(Run, TwoCycle) {
  const auto t = nl::run(problem("x/sqrt(1 + x^2)"), 1.0, 6);
  ASSERT_TRUE(std::holds_alternative<oc::Cycle>(t.outcome));
  EXPECT_EQ(std::get<oc::Cycle>(t.outcome).period, 2);
  for (std::size_t k = 0; k < t.iterates.size(); ++k) {
    EXPECT_NEAR(t.iterates[k].x, k % 2 == 0 ? 1.0 : -1.0, 1e-12);
  }
}

TEST(Run, HalvingSequenceConverges) {
  const auto p = problem("x^(2/3)");
  const auto short_run = nl::run(p, 1.0, 10);
  EXPECT_EQ(nl::kind_of(short_run.outcome), nl::OutcomeKind::inconclusive);
  EXPECT_EQ(short_run.iterates.size(), 11u);

  const auto t = nl::run(p, 1.0, 200);
  ASSERT_TRUE(std::holds_alternative<oc::Converged>(t.outcome));
  const auto c = std::get<oc::Converged>(t.outcome);
  EXPECT_NEAR(c.root, 0.0, 1e-12);
  EXPECT_EQ(c.at_iter, t.iterates.size() - 1);
  for (std::size_t k = 0; k < t.iterates.size(); ++k) {
    EXPECT_NEAR(t.iterates[k].x, std::pow(-0.5, static_cast<double>(k)), 1e-10 * std::pow(0.5, static_cast<double>(k)));
  }
}

TEST(Run, ExactConvergenceInOneStep) {
  const auto t = nl::run(problem("x^3 - x"), 0.5, 5);
  EXPECT_EQ(t.outcome, nl::Outcome(oc::Converged{-1.0, 1}));
}

TEST(Run, StartingAtRootIsConvergedAtZero) {
  for (double root : {-1.0, 0.0, 1.0}) {
    const auto t = nl::run(problem("x^3 - x"), root, 10);
    EXPECT_EQ(t.outcome, nl::Outcome(oc::Converged{root, 0})) << root;
    EXPECT_EQ(t.iterates.size(), 1u);
  }
}

TEST(Run, RejectsStartOutsideDomain) {
  EXPECT_THROW(nl::run(problem("1 - 1/x", nl::parse_domain("(0,inf)")), -1.0, 5), std::domain_error);
  nl::Domain punctured{-nl::inf, nl::inf, {0.0}};
  EXPECT_THROW(nl::run(problem("ln(abs(x))", punctured), 0.0, 5), std::domain_error);
}

TEST(Run, EvaluationFaultAtStart) {
  const auto t = nl::run(problem("sqrt(x - 1)"), 0.0, 5);
  EXPECT_EQ(t.outcome, nl::Outcome(oc::EvaluationFault{0, nl::FaultKind::even_root_of_negative}));
}

TEST(Run, FlatStartIsDerivativeTooSmall) {
  const auto t = nl::run(problem("x^2 + 1"), 0.0, 5);
  EXPECT_EQ(t.outcome, nl::Outcome(oc::DerivativeTooSmall{0}));
}

TEST(Classify, DivergenceThreshold) {
  // (-2)^k * 0.2 crosses 1e6 * (1 + 0.2) first: 0.2 * 2^23 = 1677721.6.
  int first = 0;
  for (double v = 0.2; std::abs(v) <= 1e6 * 1.2; v *= -2) ++first;
  EXPECT_EQ(first, 23);
  const auto t = nl::run(problem("x^(1/3)"), 0.2, 100);
  EXPECT_EQ(t.outcome, nl::Outcome(oc::Diverged{static_cast<std::size_t>(first)}));

  // Without the relative limit the absolute 1e12 one applies; brute force says k = 43.
  int abs_first = 0;
  for (double v = 0.2; std::abs(v) <= 1e12; v *= -2) ++abs_first;
  nl::Tolerances loose;
  loose.diverge_rel = 1e300;
  loose.deriv_rel = 0.0;  // f' = x^(-2/3)/3 would otherwise trip the floor first
  const auto t2 = nl::run(problem("x^(1/3)"), 0.2, 100, loose);
  EXPECT_EQ(t2.outcome, nl::Outcome(oc::Diverged{static_cast<std::size_t>(abs_first)}));
}

TEST(Classify, PeriodTwoNeedsARepeat) {
  const nl::StopRules rules = nl::StopRules::make({}, 0.5, 1.0, 1.0);
  std::vector<nl::Iterate> it{{0.5, 1, 1}, {-0.5, 1, 1}, {0.5, 1, 1}};
  EXPECT_EQ(nl::kind_of(nl::classify(it, {}, rules)), nl::OutcomeKind::inconclusive);
  it.push_back({-0.5, 1, 1});
  EXPECT_EQ(nl::classify(it, {}, rules), nl::Outcome(oc::Cycle{2, 0}));
  // A match against x_{k-2} only when x_{k-1} differs.
  std::vector<nl::Iterate> three{{1, 1, 1}, {2, 1, 1}, {3, 1, 1}, {1, 1, 1}, {2, 1, 1}};
  EXPECT_EQ(nl::classify(three, {}, rules), nl::Outcome(oc::Cycle{3, 0}));
}

TEST(Classify, StallIsNotACycle) {
  const nl::StopRules rules = nl::StopRules::make({}, 1.0, 1.0, 1.0);
  std::vector<nl::Iterate> it{{1e-10, 1, 1}, {1e-10, 1, 1}, {1e-10, 1, 1}};
  EXPECT_EQ(nl::kind_of(nl::classify(it, {}, rules)), nl::OutcomeKind::inconclusive);
}

TEST(Classify, ConvergedNeedsSmallResidualAndStep) {
  const nl::StopRules rules = nl::StopRules::make({}, 1.0, 1.0, 1.0);
  std::vector<nl::Iterate> it{{2.0, 1e-13, 1.0}};
  EXPECT_EQ(nl::classify(it, {}, rules), nl::Outcome(oc::Converged{2.0, 0}));
  std::vector<nl::Iterate> steep{{2.0, 1e-13, 1e-6}};
  EXPECT_EQ(nl::kind_of(nl::classify(steep, {}, rules)), nl::OutcomeKind::inconclusive);
}

TEST(Classify, PriorityOrder) {
  const nl::StopRules rules = nl::StopRules::make({}, 1.0, 1.0, 1.0);
  // Fault beats everything else.
  std::vector<nl::Iterate> faulted{{5e12, 0, 0, nl::FaultKind::nonfinite}};
  EXPECT_EQ(nl::kind_of(nl::classify(faulted, {}, rules)), nl::OutcomeKind::evaluation_fault);
  // Small derivative beats the step test.
  std::vector<nl::Iterate> flat{{0.0, 0.5, 1e-20}};
  EXPECT_EQ(nl::kind_of(nl::classify(flat, {}, rules)), nl::OutcomeKind::derivative_too_small);
  // Unless the residual is already negligible (a multiple root).
  std::vector<nl::Iterate> flat_root{{1e-7, 1e-21, 3e-15}};
  EXPECT_EQ(nl::classify(flat_root, {}, rules), nl::Outcome(oc::Converged{1e-7, 0}));
  // Small derivative on an escaping orbit is divergence.
  std::vector<nl::Iterate> escaping{{1.02, 0.7, 0.3}, {-123.0, -1.0, 5e-7}, {1.86e6, 1.0, 1e-19}};
  EXPECT_EQ(nl::classify(escaping, {}, nl::StopRules::make({}, 1.02, 0.7, 0.3)), nl::Outcome(oc::Diverged{2}));
  // Converged beats diverged.
  std::vector<nl::Iterate> far{{5e12, 0.0, 1.0}};
  EXPECT_EQ(nl::kind_of(nl::classify(far, {}, rules)), nl::OutcomeKind::converged);
}

TEST(ClosedForms, ExamplesOneToFive) {
  const double x0 = 0.2;
  expect_closed_form(nl::run(problem("x^(1/3)"), x0, 30),
                     [&](int k) { return std::pow(-2.0, k) * x0; }, 1e-10);
  expect_closed_form(nl::run(problem("x^(2/3)"), 1.0, 200), [](int k) { return std::pow(-0.5, k); }, 1e-10);
  expect_closed_form(nl::run(problem("x^3"), 1.0, 200), [](int k) { return std::pow(2.0 / 3.0, k); }, 1e-10);
  expect_closed_form(nl::run(problem("x/sqrt(1 + x^2)"), 0.9, 30),
                     [](int k) { return std::pow(-1.0, k) * std::pow(0.9, std::pow(3.0, k)); }, 1e-10, 4.0);
  const auto p5 = problem("1 - 1/x", nl::parse_domain("(0,inf)"));
  for (double s : {0.5, 1.5, 1.9}) {
    const auto t = nl::run(p5, s, 30);
    for (std::size_t k = 0; k < t.iterates.size(); ++k) {
      const double err = std::pow(1.0 - s, std::pow(2.0, static_cast<double>(k)));
      if (std::abs(err) <= 1e-13) break;
      const double want = 1.0 - err;
      EXPECT_NEAR(t.iterates[k].x, want, 1e-10 * std::abs(want)) << s << " k=" << k;
    }
  }
}

TEST(Properties, ScalingInvariance) {
  const char* fixtures[][2] = {{"x^(1/3)", "0.2"},  {"x^(2/3)", "1"},     {"x^3", "1"},
                               {"x/sqrt(1 + x^2)", "0.9"}, {"x/sqrt(1 + x^2)", "1"},
                               {"x/sqrt(1 + x^2)", "1.02"}, {"x^3 - x", "0.4656"}, {"x^3 - x", "1.3"},
                               {"abs(x)^x + exp(x) + ln(abs(x)) + cbrt(x)", "-0.65"}};
  for (const auto& fx : fixtures) {
    const auto base = nl::parse(fx[0]);
    const double x0 = std::stod(fx[1]);
    nl::Domain d;
    if (std::string_view(fx[0]).find("ln") != std::string_view::npos) d.excluded = {0.0};
    const auto t1 = nl::run(nl::NewtonProblem::from(base, d), x0, 60);
    for (double c : {4.0, -0.5, 1024.0}) {
      const auto t2 = nl::run(nl::NewtonProblem::from(nl::build::mul(nl::build::num(c), base), d), x0, 60);
      ASSERT_EQ(t1.iterates.size(), t2.iterates.size()) << fx[0] << " c=" << c;
      for (std::size_t k = 0; k < t1.iterates.size(); ++k) {
        EXPECT_EQ(t1.iterates[k].x, t2.iterates[k].x) << fx[0] << " c=" << c << " k=" << k;
      }
      EXPECT_EQ(nl::kind_of(t1.outcome), nl::kind_of(t2.outcome));
    }
    const auto t3 = nl::run(nl::NewtonProblem::from(nl::build::mul(nl::build::num(3.0), base), d), x0, 60);
    ASSERT_EQ(nl::kind_of(t1.outcome), nl::kind_of(t3.outcome)) << fx[0];
    for (std::size_t k = 0; k < std::min(t1.iterates.size(), t3.iterates.size()); ++k) {
      const double a = t1.iterates[k].x;
      // Rounding differences are amplified once the orbit is unstable; compare
      // while values are well away from a repelling regime.
      if (std::abs(a) > 1e6) break;
      EXPECT_NEAR(t3.iterates[k].x, a, 1e-12 * std::max(1.0, std::abs(a)) + 1e-300) << fx[0] << " k=" << k;
    }
  }
}

TEST(Properties, TraceLengthAndOutcomeIndex) {
  const char* fns[] = {"x^3 - x", "x/sqrt(1 + x^2)", "x^(1/3)", "tan(x)", "x^2 + 1", "sin(x) - 0.5"};
  for (const char* f : fns) {
    const auto p = problem(f);
    for (double x0 = -2.05; x0 < 2.1; x0 += 0.1) {
      for (int k : {1, 3, 20}) {
        const auto t = nl::run(p, x0, k);
        EXPECT_LE(t.iterates.size(), static_cast<std::size_t>(k) + 1);
        EXPECT_EQ(t.iterates.front().x, x0);
        if (auto idx = nl::at_iter(t.outcome)) {
          EXPECT_LT(*idx, t.iterates.size());
        }
        for (std::size_t i = 0; i + 1 < t.iterates.size(); ++i) {
          const auto& a = t.iterates[i];
          EXPECT_EQ(t.iterates[i + 1].x, a.x - a.fx / a.dfx);
        }
      }
    }
  }
}

TEST(TraceJson, FieldOrderAndNulls) {
  const auto p = problem("1 - 1/x", nl::parse_domain("(0,inf)"));
  const auto j = nl::to_json(nl::run(p, 2.0, 5), p.source);
  EXPECT_EQ(j.dump(),
            R"({"function":"1 - 1/x","x0":2.0,"k":5,"iterates":[{"x":2.0,"fx":0.5,"dfx":0.25},)"
            R"({"x":0.0,"fx":null,"dfx":null}],"outcome":{"kind":"domain-exit","at_iter":1,"offending_x":0.0}})");
}

TEST(Run, ExampleFourTrichotomy) {
  const auto p = problem("x/sqrt(1 + x^2)");
  EXPECT_EQ(nl::run(p, 0.9, 60).outcome, nl::Outcome(oc::Converged{0.0, 6}));
  EXPECT_EQ(nl::run(p, 1.0, 60).outcome, nl::Outcome(oc::Cycle{2, 0}));
  // f' ~ |x|^-3 trips the derivative floor while the orbit is escaping.
  EXPECT_EQ(nl::kind_of(nl::run(p, 1.02, 60).outcome), nl::OutcomeKind::diverged);
  EXPECT_EQ(nl::kind_of(nl::run(p, -2.0, 60).outcome), nl::OutcomeKind::diverged);
}

TEST(Run, ExampleSixNearCriticalStart) {
  const auto t = nl::run(problem("x^3 - x"), 0.4656, 60);
  ASSERT_GE(t.iterates.size(), 3u);
  EXPECT_NEAR(t.iterates[1].x, -1 / std::sqrt(3.0), 1e-4);
  EXPECT_GT(std::abs(t.iterates[2].x), 1e3);
}

TEST(Run, MultipleRootConverges) {
  // x^3 at 0: f' vanishes with f, so the floor trips with a negligible residual.
  const auto t = nl::run(problem("x^3"), 1.0, 200);
  const auto* c = std::get_if<oc::Converged>(&t.outcome);
  ASSERT_NE(c, nullptr);
  EXPECT_LT(std::abs(c->root), 1e-6);
}
