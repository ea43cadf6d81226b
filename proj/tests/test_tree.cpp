#include <doctest.h>

#include <set>
#include <treefn/tree.hpp>

#include "test_rng.hpp"

using namespace treefn;

TEST_CASE("parse and serialize round-trip") {
  for (const char* s : {"((x1,x2),x3)", "x1", "(x,y)", "((x,y),(x,z))", "(a,b,c)",
                        "(((x1,x2),x3),(x4,x5))"}) {
    Tree t = Tree::parse(s);
    CHECK(t.serialize() == s);
    CHECK(Tree::parse(t.serialize()).serialize() == s);
  }
  Tree ws = Tree::parse("  ( ( x1 , x2 ) , x3 )  ");
  CHECK(ws.serialize() == "((x1,x2),x3)");
}

TEST_CASE("parse rejects malformed input") {
  CHECK_THROWS_AS(Tree::parse("(x1)"), parse_error);  // one-child node
  CHECK_THROWS_AS(Tree::parse("()"), parse_error);
  CHECK_THROWS_AS(Tree::parse("((x1,x2)"), parse_error);
  CHECK_THROWS_AS(Tree::parse("(x1,x2) extra"), parse_error);
  CHECK_THROWS_AS(Tree::parse("(x1,,x2)"), parse_error);
  CHECK_THROWS_AS(Tree::parse(""), parse_error);
  CHECK_THROWS_AS(Tree::parse("(1x,y)"), parse_error);
}

TEST_CASE("parse basics from worked cases") {
  Tree t = Tree::parse("((x1,x2),x3)");
  CHECK(t.leaf_count() == 3);
  CHECK(t.is_binary());
  CHECK(t.variables() == std::vector<std::string>{"x1", "x2", "x3"});
  CHECK(!t.has_repeated_labels());

  Tree rep = Tree::parse("((x,y),(x,z))");
  CHECK(rep.leaf_count() == 4);
  CHECK(rep.var_count() == 3);
  CHECK(rep.has_repeated_labels());
}

TEST_CASE("variable order is natural: x2 before x10, w before x") {
  Tree t = Tree::parse("((x10,x2),x1)");
  CHECK(t.variables() == std::vector<std::string>{"x1", "x2", "x10"});
  Tree u = Tree::parse("((x,y),(z,w))");
  CHECK(u.variables() == std::vector<std::string>{"w", "x", "y", "z"});
}

TEST_CASE("JSON form round-trips") {
  Tree t = Tree::parse("((x1,x2),x3)");
  auto j = t.to_json();
  CHECK(j.dump() == R"({"node":[{"node":[{"leaf":"x1"},{"leaf":"x2"}]},{"leaf":"x3"}]})");
  CHECK(Tree::from_json(j).serialize() == t.serialize());
}

TEST_CASE("canonical form ignores sibling order and is idempotent") {
  Tree a = Tree::parse("((x1,x2),x3)");
  Tree b = Tree::parse("((x2,x1),x3)");
  Tree c = Tree::parse("(x3,(x2,x1))");
  CHECK(a.canonical_key() == b.canonical_key());
  CHECK(a.canonical_key() == c.canonical_key());
  Tree d = Tree::parse("((x1,x3),x2)");
  CHECK(a.canonical_key() != d.canonical_key());
  CHECK(a.canonical().canonical_key() == a.canonical_key());
  CHECK(a.canonical().serialize() == a.canonical().canonical().serialize());
}

TEST_CASE("outsider on worked triples") {
  Tree t1 = Tree::parse("((x,y),z)");
  int x = t1.var_index("x"), y = t1.var_index("y"), z = t1.var_index("z");
  CHECK(t1.outsider(x, y, z) == z);
  CHECK(t1.outsider(y, x, z) == z);  // symmetric in the first two

  // independently checkable by inspecting the 4-leaf trees
  Tree t2 = Tree::parse("((x,y),(z,w))");
  CHECK(t2.outsider(t2.var_index("x"), t2.var_index("z"), t2.var_index("w")) ==
        t2.var_index("x"));
  Tree t3 = Tree::parse("(((x,y),z),w)");
  CHECK(t3.outsider(t3.var_index("x"), t3.var_index("y"), t3.var_index("w")) ==
        t3.var_index("w"));

  CHECK_THROWS_AS(t1.outsider(x, x, z), domain_error);
  CHECK_THROWS_AS(t1.outsider(0, 1, 7), domain_error);
}

TEST_CASE("outsider triples count C(n,3) and each triple has exactly one outsider") {
  CHECK(Tree::parse("((x1,x2),x3)").outsider_triples().size() == 1);
  CHECK(Tree::parse("((x1,x2),(x3,x4))").outsider_triples().size() == 4);
  Tree t10 = Tree::parse("(((((((((x1,x2),x3),x4),x5),x6),x7),x8),x9),x10)");
  CHECK(t10.outsider_triples().size() == 120);
  for (const Triple& tr : t10.outsider_triples()) {
    CHECK(tr.i < tr.j);
    CHECK(t10.outsider(tr.i, tr.j, tr.l) == tr.l);
  }
  CHECK_THROWS_AS(Tree::parse("((x,y),(x,z))").outsider_triples(), domain_error);
}

TEST_CASE("node_count and is_binary follow the node-bound lemma") {
  Tree a = Tree::parse("((x1,x2),x3)");
  CHECK(a.node_count() == 2);
  CHECK(a.is_binary());
  Tree b = Tree::parse("(x1,x2,x3)");
  CHECK(b.node_count() == 1);
  CHECK(!b.is_binary());
  CHECK(b.node_count() <= b.leaf_count() - 1);
}

TEST_CASE("node bound holds with equality iff binary, over random trees") {
  test_rng rng(0);
  for (int iter = 0; iter < 200; ++iter) {
    int n = 2 + int(rng.next() % 7);
    Tree t = rng.random_tree(n, /*allow_non_binary=*/true);
    CHECK(t.node_count() <= t.leaf_count() - 1);
    CHECK((t.node_count() == t.leaf_count() - 1) == t.is_binary());
  }
}

TEST_CASE("outsider is symmetric in the first two arguments, over random binary trees") {
  test_rng rng(5);
  for (int iter = 0; iter < 30; ++iter) {
    int n = rng.range(3, 7);
    Tree t = rng.random_tree(n);
    for (const Triple& tr : t.outsider_triples()) {
      CHECK(t.outsider(tr.j, tr.i, tr.l) == tr.l);
      CHECK(t.outsider(tr.l, tr.i, tr.j) == tr.l);  // argument order is irrelevant
    }
  }
}

namespace {

// oracle: generate all binary trees over labels by brute-force nested-pair
// strings and dedupe canonically
std::set<std::string> brute_force_shapes(int n) {
  std::vector<std::string> labels;
  for (int i = 1; i <= n; ++i) labels.push_back("x" + std::to_string(i));
  std::set<std::string> out;
  std::function<void(std::vector<std::string>)> go = [&](std::vector<std::string> items) {
    if (items.size() == 1) {
      out.insert(Tree::parse(items[0]).canonical_key());
      return;
    }
    for (size_t i = 0; i < items.size(); ++i)
      for (size_t j = i + 1; j < items.size(); ++j) {
        std::vector<std::string> next;
        next.push_back("(" + items[i] + "," + items[j] + ")");
        for (size_t k = 0; k < items.size(); ++k)
          if (k != i && k != j) next.push_back(items[k]);
        go(std::move(next));
      }
  };
  go(labels);
  return out;
}

}  // namespace

TEST_CASE("enumerate_tree_shapes matches brute force and (2n-3)!!") {
  // oracle counts, frozen: 1, 1, 3, 15, 105, 945
  int expected[] = {0, 1, 1, 3, 15, 105, 945};
  for (int n = 1; n <= 6; ++n) {
    auto shapes = enumerate_tree_shapes(n);
    CHECK(int(shapes.size()) == expected[n]);
    std::set<std::string> keys;
    for (const Tree& t : shapes) {
      CHECK(t.is_binary());
      CHECK(t.leaf_count() == n);
      keys.insert(t.canonical_key());
    }
    CHECK(keys.size() == shapes.size());  // duplicate-free
    if (n >= 2) CHECK(keys == brute_force_shapes(n));
  }
  CHECK_THROWS_AS(enumerate_tree_shapes(40), limit_error);
  CHECK_THROWS_AS(enumerate_tree_shapes(0), domain_error);
}
