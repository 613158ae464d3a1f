#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>

#include "codebound/sdpmodel.hpp"
#include "support.hpp"

using namespace codebound;

namespace {

// min x subject to x - 2 >= 0
SdpModel tiny_model() {
  AffineBlock b;
  b.size = 1;
  b.constant = {{0, 0, Rational(-2)}};
  b.terms[0] = {{0, 0, Rational(1)}};
  return assemble({"x"}, Sense::Min, {Rational(1)}, {b});
}

}  // namespace

TEST_CASE("assemble validates a one-variable model") {
  const SdpModel m = tiny_model();
  CHECK(m.variables.size() == 1);
  CHECK(m.total_block_dim() == 1);
}

TEST_CASE("assemble rejects bad input") {
  AffineBlock b;
  b.size = 1;
  b.terms[1] = {{0, 0, Rational(1)}};  // undeclared variable index
  CHECK_THROWS_AS(assemble({"x"}, Sense::Min, {Rational(1)}, {b}), std::invalid_argument);

  AffineBlock c;
  c.size = 2;
  c.constant = {{0, 5, Rational(1)}};  // coordinate outside the block
  CHECK_THROWS_AS(assemble({"x"}, Sense::Min, {Rational(1)}, {c}), std::invalid_argument);

  CHECK_THROWS_AS(assemble({"x", "x"}, Sense::Min, {Rational(1), Rational(1)}, {}),
                  std::invalid_argument);
}

TEST_CASE("eval_block") {
  const SdpModel m = tiny_model();
  const BlockValue v = eval_block(m, 0, {3.0});
  CHECK(v.M(0, 0) == doctest::Approx(1.0));
  CHECK(v.min_eig == doctest::Approx(1.0));

  // [[t,1],[1,t]] at t = 1 has eigenvalues {0, 2}
  AffineBlock b;
  b.size = 2;
  b.constant = {{0, 1, Rational(1)}};
  b.terms[0] = {{0, 0, Rational(1)}, {1, 1, Rational(1)}};
  const SdpModel m2 = assemble({"t"}, Sense::Min, {Rational(1)}, {b});
  const BlockValue v2 = eval_block(m2, 0, {1.0});
  CHECK(v2.min_eig == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(v2.M(0, 1) == doctest::Approx(1.0));
}

TEST_CASE("serialization round trip is the identity") {
  AffineBlock b;
  b.size = 2;
  b.constant = {{0, 0, Rational(1, 3)}, {0, 1, Rational(-7, 11)}};
  b.terms[0] = {{1, 1, Rational(2)}};
  b.terms[1] = {{0, 1, Rational(5, 2)}};
  Equality e;
  e.coeffs = {{0, Rational(1)}, {1, Rational(-1, 6)}};
  e.rhs = Rational(4, 9);
  SdpModel m = assemble({"u", "v"}, Sense::Max, {Rational(0), Rational(1)}, {b}, {e});
  m.formulation = "demo";
  m.bound_rule = BoundRule::MaxC;
  m.exact_data = true;

  const std::string text = model_to_json_string(m);
  const SdpModel back = model_from_json_string(text);
  CHECK(model_to_json_string(back) == text);
  CHECK(model_hash(back) == model_hash(m));
  CHECK(back.equalities.size() == 1);
  CHECK(back.equalities[0].rhs == Rational(4, 9));
  CHECK(back.bound_rule == BoundRule::MaxC);
}

TEST_CASE("save/load through a file") {
  const SdpModel m = tiny_model();
  const std::string path = "tmp_model_roundtrip.json";
  save_model(m, path);
  const SdpModel back = load_model(path);
  CHECK(model_hash(back) == model_hash(m));
  std::remove(path.c_str());
}
