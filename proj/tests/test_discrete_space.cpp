#include <doctest.h>

#include <treefn/discrete_space.hpp>

using namespace treefn;

TEST_CASE("space_size closed form") {
  CHECK(space_size(1) == BigInt(4));
  CHECK(space_size(2) == BigInt(16));
  CHECK(space_size(3) == BigInt(88));
  CHECK(space_size(4) == BigInt(520));
  CHECK(space_size(5) == BigInt(3112));
  CHECK(space_size(20) == (BigInt(2) * BigInt::pow(BigInt(6), 20) + BigInt(8)) / BigInt(5));
  CHECK_THROWS_AS(space_size(0), domain_error);
}

TEST_CASE("enumerate_space base cases") {
  FunctionSpace s1 = enumerate_space(Tree::parse("x1"));
  CHECK(s1.members == std::unordered_set<uint64_t>{0b00, 0b11, 0b10, 0b01});

  FunctionSpace s2 = enumerate_space(Tree::parse("(x1,x2)"));
  CHECK(s2.members.size() == 16);  // a single node realizes every bivariate function
}

TEST_CASE("enumerate_space equals the brute-force oracle") {
  for (const char* s : {"((x1,x2),x3)", "((x1,x3),x2)", "((x2,x3),x1)"}) {
    Tree t = Tree::parse(s);
    FunctionSpace fast = enumerate_space(t);
    FunctionSpace slow = brute_force_space(t);
    CHECK(fast.members.size() == 88);
    CHECK(fast.members == slow.members);
  }
  Tree t4 = Tree::parse("((x1,x2),(x3,x4))");
  CHECK(enumerate_space(t4).members.size() == 520);
  CHECK(enumerate_space(t4).members == brute_force_space(t4).members);
}

TEST_CASE("enumeration count matches the formula up to n = 5") {
  Tree t5 = Tree::parse("(((x1,x2),x3),(x4,x5))");
  CHECK(BigInt((unsigned long long)enumerate_space(t5, 5).members.size()) == space_size(5));
}

TEST_CASE("spaces are closed under complement") {
  FunctionSpace s = enumerate_space(Tree::parse("((x1,x2),(x3,x4))"));
  uint64_t ones = w64::full(4);
  for (uint64_t m : s.members) CHECK(s.members.count(m ^ ones) == 1);
}

TEST_CASE("enumeration preconditions") {
  CHECK_THROWS_AS(enumerate_space(Tree::parse("(x1,x2,x3)")), domain_error);
  CHECK_THROWS_AS(enumerate_space(Tree::parse("((x,y),(x,z))")), domain_error);
  CHECK_THROWS_AS(enumerate_space(Tree::parse("(((x1,x2),(x3,x4)),((x5,x6),x7))"), 5),
                  limit_error);
  CHECK_THROWS_AS(brute_force_space(Tree::parse("(((x1,x2),(x3,x4)),x5)")), limit_error);
}

TEST_CASE("is_member on worked cases") {
  Gf2Poly non_example = Gf2Poly::parse("x1 + x2 + x3 + x1*x2*x3", 3);
  Gf2Poly member = Gf2Poly::parse("x1*x3 + x2*x3", 3);
  for (const Tree& t : enumerate_tree_shapes(3)) CHECK(!is_member(t, non_example));
  CHECK(is_member(Tree::parse("((x1,x2),x3)"), member));
  CHECK(!is_member(Tree::parse("((x1,x3),x2)"), member));
  CHECK_THROWS_AS(is_member(Tree::parse("((x1,x2),x3)"), Gf2Poly::zero(4)), domain_error);
}

TEST_CASE("is_member agrees with enumerated membership, exhaustively for n = 3") {
  for (const Tree& t : enumerate_tree_shapes(3)) {
    FunctionSpace space = enumerate_space(t);
    for (uint64_t bits = 0; bits < 256; ++bits) {
      Gf2Poly p = Gf2Poly::from_truth_table(TruthTable::from_word(3, bits));
      CHECK(is_member(t, p) == space.contains(bits));
    }
  }
}

TEST_CASE("at n = 4 the constraints are necessary but no longer sufficient") {
  // brute-force verified: every member passes, and each shape admits a fixed
  // surplus of constraint-satisfiers outside the space (32 for the caterpillar
  // shapes, 48 for the balanced ones)
  for (const Tree& t : enumerate_tree_shapes(4)) {
    FunctionSpace space = enumerate_space(t);
    long long satisfiers = 0;
    for (uint64_t bits = 0; bits < 65536; ++bits) {
      Gf2Poly p = Gf2Poly::from_truth_table(TruthTable::from_word(4, bits));
      bool ok = is_member(t, p);
      if (space.contains(bits)) CHECK(ok);  // necessity, every member
      satisfiers += ok;
    }
    bool balanced = t.root().children[0].children.size() == 2 &&
                    t.root().children[1].children.size() == 2;
    CHECK(satisfiers == 520 + (balanced ? 48 : 32));
  }
}

TEST_CASE("the multiplexer-style counterexample passes constraints yet is unrealizable") {
  Tree t = Tree::parse("(((x1,x4),x3),x2)");
  // x1x2x3(1+x4) + (1+x1)(1+x2)(1+x3)x4, truth table 0x0180
  Gf2Poly p = Gf2Poly::from_truth_table(TruthTable::from_word(4, 0x0180));
  CHECK(is_member(t, p));
  CHECK(!enumerate_space(t).contains(p));
  CHECK(!brute_force_space(t).contains(p));
  CHECK_THROWS_AS(decompose(t, p), not_representable);
}

TEST_CASE("decompose the triple product") {
  Tree t = Tree::parse("((x1,x2),x3)");
  NodeAssignment a = decompose(t, Gf2Poly::parse("x1*x2*x3", 3));
  CHECK(a.node_fn.at("") == 0b1000);   // root: ab
  CHECK(a.node_fn.at("L") == 0b1000);  // inner: ab
  CHECK(evaluate_assignment(t, a).word() == Gf2Poly::parse("x1*x2*x3", 3).truth_table().word());
}

TEST_CASE("decompose rejects the non-example on every 3-leaf tree") {
  Gf2Poly p = Gf2Poly::parse("x1 + x2 + x3 + x1*x2*x3", 3);
  for (const Tree& t : enumerate_tree_shapes(3))
    CHECK_THROWS_AS(decompose(t, p), not_representable);
}

TEST_CASE("decompose round-trips every member of every 3-leaf space") {
  for (const Tree& t : enumerate_tree_shapes(3)) {
    FunctionSpace space = enumerate_space(t);
    for (uint64_t m : space.members) {
      Gf2Poly p = Gf2Poly::from_truth_table(TruthTable::from_word(3, m));
      NodeAssignment a = decompose(t, p);
      CHECK(evaluate_assignment(t, a).word() == m);
    }
  }
}

TEST_CASE("decompose handles the single-leaf tree via the unary slot") {
  Tree leaf = Tree::parse("x1");
  for (uint64_t bits = 0; bits < 4; ++bits) {
    Gf2Poly p = Gf2Poly::from_truth_table(TruthTable::from_word(1, bits));
    NodeAssignment a = decompose(leaf, p);
    CHECK(evaluate_assignment(leaf, a).word() == bits);
  }
}

TEST_CASE("node assignment JSON uses path keys") {
  Tree t = Tree::parse("((x1,x2),x3)");
  NodeAssignment a = decompose(t, Gf2Poly::parse("x1*x2*x3", 3));
  auto j = a.to_json();
  CHECK(j["nodes"]["L"] == 8);
  CHECK(j["nodes"][""] == 8);
}

TEST_CASE("function space hex export is sorted") {
  FunctionSpace s1 = enumerate_space(Tree::parse("x1"));
  CHECK(s1.sorted_hex() == std::vector<std::string>{"0", "1", "2", "3"});
}

TEST_CASE("tree functions stay sparse: union over Tree_n within 24^n, ratio shrinking") {
  // 15 * 520 < 2^16, and the union-bound ratio against 2^(2^n) trends down
  CHECK(BigInt(15) * space_size(4) < BigInt::pow2(16));
  double prev_ratio = 2.0;
  for (int n = 3; n <= 5; ++n) {
    BigInt shapes((unsigned long long)enumerate_tree_shapes(n).size());
    BigInt total = shapes * space_size(n);
    CHECK(total <= BigInt::pow(BigInt(24), (uint64_t)n));
    double ratio = total.to_double() / BigInt::pow2(uint64_t(1) << n).to_double();
    CHECK(ratio < prev_ratio);
    prev_ratio = ratio;
  }
}

TEST_CASE("enumeration limit honors TREEFN_ENUM_LIMIT with a hard cap of 6") {
  CHECK(enumeration_limit() == 5);
  setenv("TREEFN_ENUM_LIMIT", "6", 1);
  CHECK(enumeration_limit() == 6);
  setenv("TREEFN_ENUM_LIMIT", "99", 1);
  CHECK(enumeration_limit() == 6);
  setenv("TREEFN_ENUM_LIMIT", "3", 1);
  CHECK(enumeration_limit() == 3);
  unsetenv("TREEFN_ENUM_LIMIT");
  CHECK(enumeration_limit() == 5);
}
