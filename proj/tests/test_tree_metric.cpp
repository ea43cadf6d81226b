#include <doctest.h>

#include <treefn/tree_metric.hpp>

using namespace treefn;

TEST_CASE("distance of a tree to itself is zero") {
  Tree t = Tree::parse("((x,y),(z,w))");
  TreeDistance d = distance(t, t);
  CHECK(d.intersection == BigInt(520));
  CHECK(d.value() == Rational(0));
}

TEST_CASE("worked distances for the 4-leaf trees") {
  Tree sym = Tree::parse("((x,y),(z,w))");
  Tree asym = Tree::parse("(((x,y),z),w)");
  TreeDistance d1 = distance(sym, asym);
  CHECK(d1.intersection == BigInt(296));
  CHECK(d1.total == BigInt(520));
  CHECK(d1.fraction_string() == "224/520");
  CHECK(d1.value() == Rational(224, 520));
  CHECK(d1.value().to_decimal_string(4) == "0.4308");

  // brute-force verified: every pair of distinct symmetric labelings shares
  // exactly 176 functions (the common set includes complemented products
  // such as xy+1 on top of the univariate products and sums)
  Tree relabeled = Tree::parse("((x,z),(y,w))");
  TreeDistance d2 = distance(sym, relabeled);
  CHECK(d2.intersection == BigInt(176));
  CHECK(d2.fraction_string() == "344/520");
  CHECK(d2.value() == Rational(43, 65));

  Tree relabeled2 = Tree::parse("((x,w),(y,z))");
  CHECK(distance(sym, relabeled2).intersection == BigInt(176));
  CHECK(distance(relabeled, relabeled2).intersection == BigInt(176));
}

TEST_CASE("the symmetric-pair intersection against the assignment-enumeration oracle") {
  Tree t1 = Tree::parse("((x,y),(z,w))");
  Tree t2 = Tree::parse("((x,z),(y,w))");
  FunctionSpace b1 = brute_force_space(t1);
  FunctionSpace b2 = brute_force_space(t2);
  long long common = 0;
  for (uint64_t m : b1.members) common += b2.members.count(m);
  CHECK(common == 176);
  CHECK(distance(t1, t2).intersection == BigInt(common));
  // xy+1 is a shared function: left-subtree output in t1, x*y+1 across t2's root
  uint64_t xy1 = (w64::variable(4, 1) & w64::variable(4, 2)) ^ w64::full(4);
  CHECK(b1.members.count(xy1) == 1);
  CHECK(b2.members.count(xy1) == 1);
}

TEST_CASE("distance requires one label set") {
  CHECK_THROWS_AS(distance(Tree::parse("(x,y)"), Tree::parse("(x,z)")), domain_error);
}

TEST_CASE("distance JSON rendering") {
  auto j = distance(Tree::parse("((x,y),(z,w))"), Tree::parse("(((x,y),z),w)")).to_json();
  CHECK(j["intersection"] == 296);
  CHECK(j["total"] == 520);
  CHECK(j["distance"] == "224/520");
  CHECK(j["decimal"] == doctest::Approx(0.4308));
}

TEST_CASE("distance matrix over Tree_4 is a metric") {
  std::vector<Tree> trees = enumerate_tree_shapes(4);
  REQUIRE(trees.size() == 15);
  auto d = distance_matrix(trees);
  for (size_t i = 0; i < trees.size(); ++i) {
    CHECK(d[i][i] == Rational(0));
    for (size_t j = 0; j < trees.size(); ++j) {
      CHECK(d[i][j] == d[j][i]);
      if (i != j) CHECK(d[i][j] > Rational(0));  // metric, not pseudo-metric
      for (size_t k = 0; k < trees.size(); ++k)
        CHECK(d[i][k] <= d[i][j] + d[j][k]);  // triangle inequality, exhaustive
    }
  }
}

TEST_CASE("reconstruct_tree round-trips the 3-leaf trees") {
  for (const Tree& t : enumerate_tree_shapes(3)) {
    Tree r = reconstruct_tree(enumerate_space(t));
    CHECK(r.canonical_key() == t.canonical_key());
  }
}

TEST_CASE("reconstruct_tree round-trips all of Tree_4") {
  for (const Tree& t : enumerate_tree_shapes(4)) {
    Tree r = reconstruct_tree(enumerate_space(t));
    CHECK(r.canonical_key() == t.canonical_key());
  }
}

TEST_CASE("reconstruct_tree handles the degenerate arities") {
  CHECK(reconstruct_tree(enumerate_space(Tree::parse("x1"))).serialize() == "x1");
  CHECK(reconstruct_tree(enumerate_space(Tree::parse("(x1,x2)"))).canonical_key() ==
        Tree::parse("(x1,x2)").canonical_key());
}

TEST_CASE("a missing witness is reported as an inconsistent space") {
  Tree t = Tree::parse("((x1,x2),x3)");
  FunctionSpace s = enumerate_space(t);
  // remove (x1+x2)x3, the witness for outsider x3
  uint64_t witness = (w64::variable(3, 0) ^ w64::variable(3, 1)) & w64::variable(3, 2);
  REQUIRE(s.members.count(witness) == 1);
  s.members.erase(witness);
  CHECK_THROWS_AS(reconstruct_tree(s), inconsistent_space);
}
