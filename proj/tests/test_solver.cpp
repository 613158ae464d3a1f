#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "codebound/solver.hpp"
#include "support.hpp"

using namespace codebound;

namespace {

SdpModel scalar_bound_model() {
  // min x subject to x - 2 >= 0
  AffineBlock b;
  b.size = 1;
  b.constant = {{0, 0, Rational(-2)}};
  b.terms[0] = {{0, 0, Rational(1)}};
  return assemble({"x"}, Sense::Min, {Rational(1)}, {b});
}

SdpModel toeplitz_model() {
  // min t subject to [[t,1],[1,t]] >= 0, optimum t = 1
  AffineBlock b;
  b.size = 2;
  b.constant = {{0, 1, Rational(1)}};
  b.terms[0] = {{0, 0, Rational(1)}, {1, 1, Rational(1)}};
  return assemble({"t"}, Sense::Min, {Rational(1)}, {b});
}

}  // namespace

TEST_CASE("scalar bound") {
  const SolveResult r = solve(scalar_bound_model());
  REQUIRE(r.status == SolveStatus::Optimal);
  CHECK(r.x[0] == doctest::Approx(2.0).epsilon(1e-7));
  CHECK(r.objective == doctest::Approx(2.0).epsilon(1e-7));
}

TEST_CASE("toeplitz eigenvalue bound") {
  // degenerate at the optimum; either a clean Optimal or a best-iterate exit
  // with a tight gap is acceptable
  const SolveResult r = solve(toeplitz_model());
  REQUIRE((r.status == SolveStatus::Optimal || r.status == SolveStatus::NumericalLimit));
  CHECK(r.duality_gap <= 1e-6);
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("max sense") {
  // max c subject to 2 - c >= 0
  AffineBlock b;
  b.size = 1;
  b.constant = {{0, 0, Rational(2)}};
  b.terms[0] = {{0, 0, Rational(-1)}};
  const SdpModel m = assemble({"c"}, Sense::Max, {Rational(1)}, {b});
  const SolveResult r = solve(m);
  REQUIRE(r.status == SolveStatus::Optimal);
  CHECK(r.objective == doctest::Approx(2.0).epsilon(1e-7));
}

TEST_CASE("dual matrices satisfy the dual constraints") {
  const SdpModel m = toeplitz_model();
  const SolveResult r = solve(m);
  REQUIRE(r.duality_gap <= 1e-6);
  REQUIRE(r.dual.size() == 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(r.dual[0], Eigen::EigenvaluesOnly);
  CHECK(es.eigenvalues().minCoeff() >= -1e-9);
  // <T_1, Y> = c_1 with T_1 = identity here
  CHECK(r.dual[0].trace() == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("equality handling") {
  // min x + u subject to x - 2 >= 0, u >= 0, x + u = 5
  AffineBlock bx, bu;
  bx.size = 1;
  bx.constant = {{0, 0, Rational(-2)}};
  bx.terms[0] = {{0, 0, Rational(1)}};
  bu.size = 1;
  bu.terms[1] = {{0, 0, Rational(1)}};
  Equality e;
  e.coeffs = {{0, Rational(1)}, {1, Rational(1)}};
  e.rhs = Rational(5);
  const SdpModel m = assemble({"x", "u"}, Sense::Min, {Rational(1), Rational(1)}, {bx, bu}, {e});
  const SolveResult r = solve(m);
  REQUIRE(r.duality_gap <= 1e-6);
  CHECK(r.x[0] + r.x[1] == doctest::Approx(5.0).epsilon(1e-6));
  CHECK(r.eq_multipliers.size() == 1);
}

TEST_CASE("infeasible model is flagged") {
  // x - 2 >= 0 and -x - 2 >= 0 cannot both hold
  AffineBlock b1, b2;
  b1.size = 1;
  b1.constant = {{0, 0, Rational(-2)}};
  b1.terms[0] = {{0, 0, Rational(1)}};
  b2.size = 1;
  b2.constant = {{0, 0, Rational(-2)}};
  b2.terms[0] = {{0, 0, Rational(-1)}};
  const SdpModel m = assemble({"x"}, Sense::Min, {Rational(1)}, {b1, b2});
  const SolveResult r = solve(m);
  CHECK(r.status != SolveStatus::Optimal);
}

TEST_CASE("unbounded model is flagged") {
  // min x subject to 1 >= 0 (x unconstrained)
  AffineBlock b;
  b.size = 1;
  b.constant = {{0, 0, Rational(1)}};
  const SdpModel m = assemble({"x"}, Sense::Min, {Rational(1)}, {b});
  const SolveResult r = solve(m);
  CHECK(r.status != SolveStatus::Optimal);
}

TEST_CASE("deterministic iterate sequence") {
  std::ostringstream log1, log2;
  SolverSettings s1;
  s1.iteration_log = &log1;
  SolverSettings s2;
  s2.iteration_log = &log2;
  solve(toeplitz_model(), s1);
  solve(toeplitz_model(), s2);
  CHECK(log1.str() == log2.str());
  CHECK(!log1.str().empty());
}

TEST_CASE("dimension cap is enforced") {
  AffineBlock b;
  b.size = 300;
  b.constant = {{0, 0, Rational(1)}};
  const SdpModel m = assemble({}, Sense::Min, {}, {b});
  CHECK_THROWS_AS(solve(m), std::invalid_argument);
}
