#include <doctest.h>

#include <treefn/poly_decompose.hpp>

#include "test_rng.hpp"

using namespace treefn;

namespace {
RatPoly P(const char* s, int n) { return RatPoly::parse(s, n); }
}

TEST_CASE("solve_composition on worked cases") {
  // a = (x+y)^2, xi = x+y  ->  h(t) = t^2
  auto h = solve_composition(P("x1^2 + 2*x1*x2 + x2^2", 2), P("x1 + x2", 2));
  REQUIRE(h.has_value());
  CHECK(*h == P("x1^2", 1));

  // degree obstruction: x is not a polynomial in x^2
  CHECK(!solve_composition(P("x1", 1), P("x1^2", 1)).has_value());

  CHECK_THROWS_AS(solve_composition(P("x1", 1), P("3", 1)), domain_error);

  // constants compose trivially
  auto hc = solve_composition(P("5", 2), P("x1 + x2", 2));
  REQUIRE(hc.has_value());
  CHECK(*hc == P("5", 1));
}

TEST_CASE("solve_composition recovers h from h(xi) for random xi") {
  test_rng rng(4);
  RatPoly h_true = P("x1^3 + -2*x1 + 5", 1);
  for (int iter = 0; iter < 10; ++iter) {
    RatPoly xi(3);
    for (int t = 0; t < 4; ++t) {
      RatPoly::Exponents e(3, 0);
      for (int v = 0; v < 3; ++v) e[v] = uint32_t(rng.range(0, 1));
      xi.add_term(std::move(e), Rational(rng.range(-2, 2)));
    }
    if (xi.is_constant()) continue;
    RatPoly a = h_true.compose({xi});
    auto h = solve_composition(a, xi);
    REQUIRE(h.has_value());
    CHECK(h->compose({xi}) == a);
  }
}

TEST_CASE("decompose_polynomial on the worked ternary cases") {
  Tree t = Tree::parse("((x,y),z)");

  DecompResult r1 = decompose_polynomial(P("x1*x2*x3", 3), t);
  REQUIRE(r1.ok());
  CHECK(r1.decomposition.evaluate(t) == P("x1*x2*x3", 3));

  // f = (x+y)z + (x+y)
  RatPoly f2 = P("x1*x3 + x2*x3 + x1 + x2", 3);
  DecompResult r2 = decompose_polynomial(f2, t);
  REQUIRE(r2.ok());
  CHECK(r2.decomposition.evaluate(t) == f2);
  CHECK(r2.decomposition.node_fn.count("L") == 1);
  CHECK(r2.decomposition.node_fn.count("") == 1);

  DecompResult r3 = decompose_polynomial(P("x1*x2*x3 + x1 + x2 + x3", 3), t);
  CHECK(r3.status == DecompStatus::constraint_violated);
  for (const Tree& shape : enumerate_tree_shapes(3))
    CHECK(decompose_polynomial(P("x1*x2*x3 + x1 + x2 + x3", 3), shape).status ==
          DecompStatus::constraint_violated);
}

TEST_CASE("decompose_polynomial handles dead variables") {
  Tree t = Tree::parse("((x1,x2),x3)");
  RatPoly f = P("x1*x3", 3);  // independent of x2
  DecompResult r = decompose_polynomial(f, t);
  REQUIRE(r.ok());
  CHECK(r.decomposition.evaluate(t) == f);

  RatPoly g = P("x3^2 + 1", 3);  // depends on the right side only
  DecompResult rg = decompose_polynomial(g, t);
  REQUIRE(rg.ok());
  CHECK(rg.decomposition.evaluate(t) == g);

  RatPoly c = P("7", 3);
  DecompResult rc = decompose_polynomial(c, t);
  REQUIRE(rc.ok());
  CHECK(rc.decomposition.evaluate(t) == c);
}

TEST_CASE("decompose_polynomial on a single leaf and a cherry") {
  Tree leaf = Tree::parse("x1");
  RatPoly u = P("3*x1^2 + 1/2", 1);
  DecompResult r = decompose_polynomial(u, leaf);
  REQUIRE(r.ok());
  CHECK(r.decomposition.evaluate(leaf) == u);

  Tree cherry = Tree::parse("(x1,x2)");
  RatPoly f = P("x1^2*x2 + -1*x2 + 2", 2);
  DecompResult rc = decompose_polynomial(f, cherry);
  REQUIRE(rc.ok());
  CHECK(rc.decomposition.evaluate(cherry) == f);
  CHECK(rc.decomposition.node_fn.at("") == f);
}

TEST_CASE("decompose_polynomial on deeper trees with two internal root children") {
  Tree t = Tree::parse("((x1,x2),(x3,x4))");
  // (x1 + x2 x1) * (x3 x4) + 2
  RatPoly f = P("x1*x2", 2).compose({P("x1 + 3*x2", 4), P("x3*x4 + 1", 4)}) +
              RatPoly::constant(4, Rational(2));
  DecompResult r = decompose_polynomial(f, t);
  REQUIRE(r.ok());
  CHECK(r.decomposition.evaluate(t) == f);
}

TEST_CASE("nonlinear wrappers around internal children decompose") {
  // the slice of a sub-tree value w seen through a degree->=2 wrapper is a
  // non-injective polynomial of w; these cases need the generator refinement
  Tree t3 = Tree::parse("((x1,x2),x3)");
  RatPoly h = P("x1*x2 + x1", 3);
  RatPoly g_cubic = P("x1^3 + x1*x2 + x2^2", 2);
  RatPoly f = g_cubic.compose({h, P("x3", 3)});
  DecompResult r = decompose_polynomial(f, t3);
  REQUIRE(r.ok());
  CHECK(r.decomposition.evaluate(t3) == f);

  Tree t4 = Tree::parse("((x1,x2),(x3,x4))");
  RatPoly h1 = P("x1*x2 + x2", 4);
  RatPoly h2 = P("x3 + x4^2", 4);
  RatPoly g_both = P("x1^3 + x1^2*x2 + x2^3 + x1", 2);
  RatPoly f4 = g_both.compose({h1, h2});
  DecompResult r4 = decompose_polynomial(f4, t4);
  REQUIRE(r4.ok());
  CHECK(r4.decomposition.evaluate(t4) == f4);

  // quadratic wrapper over a deeper sub-tree inside a 4-leaf caterpillar
  Tree t4c = Tree::parse("((x2,(x1,x4)),x3)");
  RatPoly inner = P("x1 + 2*x2", 2).compose({P("x1", 4), P("x4", 4)});
  RatPoly mid = P("2*x1^2 + x1*x2 + x2^2 + x2", 2).compose({P("x2", 4), inner});
  RatPoly f4c = P("x1 + x1*x2", 2).compose({mid, P("x3", 4)});
  DecompResult r4c = decompose_polynomial(f4c, t4c);
  REQUIRE(r4c.ok());
  CHECK(r4c.decomposition.evaluate(t4c) == f4c);
}

TEST_CASE("sufficiency round trip on random composed instances") {
  test_rng rng(0);
  int decomposed = 0;
  for (int iter = 0; iter < 15; ++iter) {
    int n = rng.range(3, 5);
    auto [t, f] = rng.random_tree_polynomial(n, 3);
    DecompResult r = decompose_polynomial(f, t);
    if (r.status == DecompStatus::non_vanishing_failed) continue;
    REQUIRE(r.ok());
    CHECK(r.decomposition.evaluate(t) == f);
    ++decomposed;
  }
  CHECK(decomposed >= 10);
}

TEST_CASE("PolyDecomposition JSON carries node paths and the base point") {
  Tree t = Tree::parse("((x,y),z)");
  DecompResult r = decompose_polynomial(P("x1*x2*x3", 3), t);
  REQUIRE(r.ok());
  auto j = r.decomposition.to_json();
  CHECK(j["nodes"].contains(""));
  CHECK(j["nodes"].contains("L"));
  CHECK(j["base_point"].size() == 3);
}
