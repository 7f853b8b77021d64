#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "approxwidths/expr.hpp"

using namespace approxwidths;

namespace {

double ev(const char* text, double x = 0.0, double k = 0.0) { return evaluate(*parse(text), x, k); }

std::size_t parse_error_at(const char* text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e.position();
  }
  return std::string::npos;
}

}  // namespace

TEST_CASE("arithmetic and precedence") {
  CHECK(ev("1+2*3") == 7.0);
  CHECK(ev("(1+2)*3") == 9.0);
  CHECK(ev("2^3^2") == 512.0);
  CHECK(ev("8/4/2") == 1.0);
  CHECK(ev("1-2-3") == -4.0);
  CHECK(ev("-x^2", 3.0) == 9.0);
  CHECK(ev("0-x^2", 3.0) == -9.0);
  CHECK(ev("--x", 2.0) == 2.0);
  CHECK(ev("2\xE2\x88\x92x", 0.5) == 1.5);
  CHECK(ev("1.5e2") == 150.0);
  CHECK(ev(".5") == 0.5);
}

TEST_CASE("variables, constants and functions") {
  CHECK(ev("x^2", 3.0) == 9.0);
  CHECK(ev("abs(x-0.5)", 0.2) == doctest::Approx(0.3));
  CHECK(std::abs(ev("sin(pi*x)", 1.0)) < 1e-15);
  CHECK(ev("sin(k*x)/k", 0.3, 4.0) == doctest::Approx(std::sin(1.2) / 4.0));
  CHECK(ev("log(e)") == doctest::Approx(1.0));
  CHECK(ev("sqrt(x)+exp(0)+cos(0)+tan(0)", 4.0) == doctest::Approx(4.0));
  CHECK(ev("(-8)^(1/3*3)") == doctest::Approx(-8.0));
}

TEST_CASE("domain errors are reported") {
  CHECK_THROWS_AS(ev("1/x", 0.0), EvalError);
  CHECK_THROWS_AS(ev("log(x)", 0.0), EvalError);
  CHECK_THROWS_AS(ev("sqrt(x)", -1.0), EvalError);
  CHECK_THROWS_AS(ev("x^0.5", -1.0), EvalError);
  CHECK_THROWS_AS(ev("0^(-1)"), EvalError);
  CHECK_THROWS_AS(ev("exp(x)", 1000.0), EvalError);
  CHECK_NOTHROW(ev("x^2", -1.0));
}

TEST_CASE("parse errors carry positions") {
  CHECK(parse_error_at("1+") == 2);
  CHECK(parse_error_at("foo(x)") == 0);
  CHECK(parse_error_at("x + y") == 4);
  CHECK(parse_error_at("(1+2") == 4);
  CHECK(parse_error_at("sin x") == 4);
  CHECK(parse_error_at("sin(1, 2)") == 6);
  CHECK(parse_error_at("1 2") == 2);
  CHECK(parse_error_at("x(2)") == 1);
  CHECK(parse_error_at("") == 0);
  CHECK_THROWS_AS(parse("1e999"), ParseError);
}

TEST_CASE("printing round-trips") {
  const char* cases[] = {"1+2*3",       "(1+2)*3",      "-x^2",        "-(x^2)",
                         "2^3^2",       "(2^3)^2",      "1-(2-3)",     "x/(k*x)",
                         "sin(k*x)/k",  "abs(x-0.5)",   "--x",         "-(1+x)",
                         "2^-x",        "(x+1)^(k-1)",  "e*pi",        "1.25e-7*x"};
  for (const char* c : cases) {
    const ExprPtr e = parse(c);
    const std::string once = print(*e);
    const std::string twice = print(*parse(once));
    CHECK_MESSAGE(once == twice, c);
    for (double x : {0.3, 1.7})
      CHECK(evaluate(*parse(once), x, 2.0) == doctest::Approx(evaluate(*e, x, 2.0)));
  }
  CHECK(print(*parse("1 +2* 3")) == "1 + 2*3");
  CHECK(print(*parse("(((x)))")) == "x");
}

TEST_CASE("random expressions survive print and parse") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> pick(0, 9);
  const std::function<std::string(int)> gen = [&](int depth) -> std::string {
    const int r = depth <= 0 ? pick(rng) % 3 : pick(rng);
    switch (r) {
      case 0: return "x";
      case 1: return "k";
      case 2: return std::to_string(1 + pick(rng));
      case 3: return "-" + gen(depth - 1);
      case 4: return "(" + gen(depth - 1) + "+" + gen(depth - 1) + ")";
      case 5: return "(" + gen(depth - 1) + "-" + gen(depth - 1) + ")";
      case 6: return gen(depth - 1) + "*" + gen(depth - 1);
      case 7: return "(" + gen(depth - 1) + ")/(" + gen(depth - 1) + ")";
      case 8: return "(" + gen(depth - 1) + ")^2";
      default: return "cos(" + gen(depth - 1) + ")";
    }
  };
  for (int t = 0; t < 200; ++t) {
    const std::string src = gen(4);
    const ExprPtr e = parse(src);
    const std::string p = print(*e);
    CHECK_MESSAGE(print(*parse(p)) == p, src);
    double a = 0.0, b = 0.0;
    bool fa = false, fb = false;
    try { a = evaluate(*e, 0.7, 3.0); } catch (const EvalError&) { fa = true; }
    try { b = evaluate(*parse(p), 0.7, 3.0); } catch (const EvalError&) { fb = true; }
    CHECK(fa == fb);
    if (!fa) CHECK(a == doctest::Approx(b).epsilon(1e-12));
  }
}

TEST_CASE("materialize a family on a grid") {
  auto g = make_grid(Grid::uniform(0.0, 1.0, 5));
  const auto fam = materialize_family(*parse("k*x"), {1.0, 2.0}, g, SpaceKind::grid_sup);
  REQUIRE(fam.size() == 2);
  CHECK(fam[1].values()(4) == 2.0);
  CHECK(fam[0].kind() == SpaceKind::grid_sup);
  try {
    materialize_family(*parse("1/(x-k/4)"), {1.0}, g, SpaceKind::grid_sup);
    FAIL("expected an evaluation error");
  } catch (const EvalError& e) {
    CHECK(std::string(e.what()).find("k index 0, node index 1") != std::string::npos);
  }
}

TEST_CASE("worked examples") {
  CHECK(parse("x")->kind == ExprKind::variable);
  const ExprPtr e = parse("sin(k*x)/k");
  CHECK(e->kind == ExprKind::binary);
  CHECK(e->op == '/');
  CHECK(e->args[0]->kind == ExprKind::call);
  CHECK(e->args[1]->kind == ExprKind::variable);
  CHECK(print(*parse(print(*e))) == print(*e));

  auto g = make_grid(Grid::chebyshev(0.0, std::numbers::pi, 64));
  const auto fam = materialize_family(*e, {1.0, 2.0, 3.0}, g, SpaceKind::grid_sup);
  CHECK(norm(fam[0]) > norm(fam[1]));
  CHECK(norm(fam[1]) > norm(fam[2]));
  const auto same = materialize_family(*parse("2.5"), {1.0, 2.0}, g, SpaceKind::grid_sup);
  CHECK(distance(same[0], same[1]) == 0.0);
  CHECK_THROWS_AS(materialize_family(*e, {}, g, SpaceKind::grid_sup), PreconditionError);
}
