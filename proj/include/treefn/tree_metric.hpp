#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "bigint.hpp"
#include "discrete_space.hpp"
#include "errors.hpp"
#include "gf2.hpp"
#include "tree.hpp"

namespace treefn {

/// Symmetric-difference distance between two labeled binary trees:
/// d = |F_bin(T1) \ F_bin(T2)| / |F_bin(T1)|, with both space sizes equal by
/// the closed-form count.
struct TreeDistance {
  BigInt intersection;  // |F_bin(T1) n F_bin(T2)|
  BigInt total;         // |F_bin(T1)| = |F_bin(T2)|

  Rational value() const { return Rational(total - intersection, total); }

  /// Unreduced rendering, e.g. "224/520".
  std::string fraction_string() const {
    return (total - intersection).to_string() + "/" + total.to_string();
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["intersection"] = nlohmann::json::parse(intersection.to_string());
    j["total"] = nlohmann::json::parse(total.to_string());
    j["distance"] = fraction_string();
    j["decimal"] = std::stod(value().to_decimal_string(4));
    return j;
  }
};

namespace detail {

inline BigInt intersection_count(const FunctionSpace& a, const FunctionSpace& b) {
  const auto& small = a.members.size() <= b.members.size() ? a.members : b.members;
  const auto& large = a.members.size() <= b.members.size() ? b.members : a.members;
  unsigned long long c = 0;
  for (uint64_t m : small)
    if (large.count(m)) ++c;
  return BigInt(c);
}

inline void require_same_labels(const Tree& a, const Tree& b, const char* op) {
  if (a.variables() != b.variables())
    throw domain_error(std::string(op) + ": trees must share one label set");
}

}  // namespace detail

inline TreeDistance distance(const FunctionSpace& a, const FunctionSpace& b) {
  detail::require_same_labels(a.tree, b.tree, "distance");
  BigInt sa(static_cast<unsigned long long>(a.members.size()));
  BigInt sb(static_cast<unsigned long long>(b.members.size()));
  if (sa != sb) throw error("distance: unequal space sizes (internal error)");
  return TreeDistance{detail::intersection_count(a, b), sa};
}

inline TreeDistance distance(const Tree& t1, const Tree& t2,
                             int limit = enumeration_limit()) {
  detail::require_same_labels(t1, t2, "distance");
  return distance(enumerate_space(t1, limit), enumerate_space(t2, limit));
}

/// Pairwise distances; each space is enumerated once. Diagonal is zero and
/// the matrix is symmetric.
inline std::vector<std::vector<Rational>> distance_matrix(
    const std::vector<Tree>& trees, int limit = enumeration_limit()) {
  size_t m = trees.size();
  for (size_t i = 1; i < m; ++i) detail::require_same_labels(trees[0], trees[i], "distance_matrix");
  std::vector<FunctionSpace> spaces;
  spaces.reserve(m);
  for (const Tree& t : trees) spaces.push_back(enumerate_space(t, limit));
  std::vector<std::vector<Rational>> d(m, std::vector<Rational>(m, Rational(0)));
  for (size_t i = 0; i < m; ++i)
    for (size_t j = i + 1; j < m; ++j) {
      Rational v = distance(spaces[i], spaces[j]).value();
      d[i][j] = v;
      d[j][i] = v;
    }
  return d;
}

/// Recovers the unique binary tree whose function space is `members`, given
/// labels x1..xn. For each triple exactly one of the three witness functions
/// (x_i + x_j) x_l must be a member; the marked outsiders then pin the root
/// bipartition recursively.
inline Tree reconstruct_tree(const std::unordered_set<uint64_t>& members, int n) {
  if (n < 1 || n > 6) throw domain_error("reconstruct_tree: n must be in 1..6");
  auto leaf_name = [](int i) { return "x" + std::to_string(i + 1); };
  if (n == 1) return Tree(TreeNode::leaf(leaf_name(0)));
  if (n == 2)
    return Tree(TreeNode::node({TreeNode::leaf(leaf_name(0)), TreeNode::leaf(leaf_name(1))}));

  // outsider[{a,b,c}] via witness membership
  std::map<std::vector<int>, int> outsider;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int c = b + 1; c < n; ++c) {
        auto witness = [&](int i, int j, int l) {
          return (w64::variable(n, i) ^ w64::variable(n, j)) & w64::variable(n, l);
        };
        int found = -1;
        int hits = 0;
        if (members.count(witness(a, b, c))) { found = c; ++hits; }
        if (members.count(witness(b, c, a))) { found = a; ++hits; }
        if (members.count(witness(a, c, b))) { found = b; ++hits; }
        if (hits != 1)
          throw inconsistent_space("triple {" + std::to_string(a + 1) + "," +
                                   std::to_string(b + 1) + "," + std::to_string(c + 1) +
                                   "} has " + std::to_string(hits) + " member witnesses");
        outsider[{a, b, c}] = found;
      }
  auto outsider_of = [&](int a, int b, int c) {
    std::vector<int> k{a, b, c};
    std::sort(k.begin(), k.end());
    return outsider.at(k);
  };

  // two leaves share a root side of the sub-tree over S iff some third leaf
  // of S is the outsider of their triple
  std::function<TreeNode(std::vector<int>)> build = [&](std::vector<int> s) -> TreeNode {
    if (s.size() == 1) return TreeNode::leaf(leaf_name(s[0]));
    if (s.size() == 2)
      return TreeNode::node({TreeNode::leaf(leaf_name(s[0])), TreeNode::leaf(leaf_name(s[1]))});
    std::map<int, int> comp;
    for (int v : s) comp[v] = v;
    std::function<int(int)> find = [&](int v) {
      while (comp[v] != v) v = comp[v] = comp[comp[v]];
      return v;
    };
    for (size_t i = 0; i < s.size(); ++i)
      for (size_t j = i + 1; j < s.size(); ++j) {
        bool same_side = false;
        for (int m : s)
          if (m != s[i] && m != s[j] && outsider_of(s[i], s[j], m) == m) {
            same_side = true;
            break;
          }
        if (same_side) comp[find(s[i])] = find(s[j]);
      }
    std::map<int, std::vector<int>> classes;
    for (int v : s) classes[find(v)].push_back(v);
    if (classes.size() != 2)
      throw inconsistent_space("outsider relation does not split into two root sub-trees");
    auto it = classes.begin();
    std::vector<int> left = it->second;
    std::vector<int> right = std::next(it)->second;
    return TreeNode::node({build(left), build(right)});
  };

  std::vector<int> all;
  for (int i = 0; i < n; ++i) all.push_back(i);
  Tree result = Tree(build(all)).canonical();

  // full validation: the rebuilt tree must reproduce every recorded outsider
  for (const auto& [key, o] : outsider)
    if (result.outsider(key[0], key[1], key[2]) != o)
      throw inconsistent_space("no tree realizes the recorded outsider relation");
  return result;
}

inline Tree reconstruct_tree(const FunctionSpace& space) {
  return reconstruct_tree(space.members, space.n);
}

}  // namespace treefn
