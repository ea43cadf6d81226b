#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "errors.hpp"

namespace treefn {

/// A vertex of a rooted tree: a labeled leaf or an internal node with >= 2
/// ordered children. Child order is storage order; tree equality modulo
/// sibling reordering goes through canonical().
struct TreeNode {
  std::string label;               // non-empty iff leaf
  std::vector<TreeNode> children;  // empty iff leaf

  bool is_leaf() const { return children.empty(); }

  static TreeNode leaf(std::string name) { return TreeNode{std::move(name), {}}; }
  static TreeNode node(std::vector<TreeNode> kids) { return TreeNode{{}, std::move(kids)}; }
};

/// A triple of leaf variables (0-based indices into the tree's variable
/// order); `l` is the outsider, separated from `i`, `j` by a rooted sub-tree.
struct Triple {
  int i, j, l;
};

namespace detail {

/// Orders labels so that x2 < x10: compares (alphabetic prefix, numeric
/// suffix), falling back to plain string comparison.
inline bool natural_less(const std::string& a, const std::string& b) {
  auto split = [](const std::string& s) -> std::pair<std::string_view, long long> {
    size_t i = s.size();
    while (i > 0 && std::isdigit(static_cast<unsigned char>(s[i - 1]))) --i;
    long long num = -1;
    if (i < s.size() && s.size() - i <= 18) num = std::stoll(s.substr(i));
    return {std::string_view(s).substr(0, i), num};
  };
  auto [pa, na] = split(a);
  auto [pb, nb] = split(b);
  if (pa != pb) return pa < pb;
  if (na != nb) return na < nb;
  return a < b;
}

}  // namespace detail

/// A rooted tree with labeled leaves. Leaf labels map to variable indices in
/// a fixed order (natural sort of the distinct labels), which every other
/// module uses for constraint triples and truth-table bit positions.
class Tree {
public:
  explicit Tree(TreeNode root) : root_(std::move(root)) { init(); }

  /// Parses a nested parenthesized expression, e.g. "((x1,x2),x3)".
  /// Identifiers match [A-Za-z_][A-Za-z0-9_]*; whitespace is insignificant.
  static Tree parse(std::string_view text) {
    size_t pos = 0;
    TreeNode root = parse_expr(text, pos);
    skip_ws(text, pos);
    if (pos != text.size()) throw parse_error("trailing input after tree", pos);
    return Tree(std::move(root));
  }

  const TreeNode& root() const { return root_; }

  /// Number of leaves, counted with multiplicity.
  int leaf_count() const { return leaf_count_; }

  /// Number of distinct leaf labels.
  int var_count() const { return static_cast<int>(vars_.size()); }

  /// Distinct labels in the fixed variable order.
  const std::vector<std::string>& variables() const { return vars_; }

  int var_index(const std::string& label) const {
    for (size_t i = 0; i < vars_.size(); ++i)
      if (vars_[i] == label) return static_cast<int>(i);
    throw domain_error("unknown variable label: " + label);
  }

  bool has_repeated_labels() const { return leaf_count_ != var_count(); }
  bool is_binary() const { return is_binary_node(root_); }
  int node_count() const { return count_internal(root_); }
  int max_children() const { return max_children_of(root_); }

  std::string serialize() const { return serialize_node(root_); }

  nlohmann::json to_json() const { return node_to_json(root_); }

  static Tree from_json(const nlohmann::json& j) { return Tree(node_from_json(j)); }

  /// Sorts the children of every node by their canonical serialization.
  /// Two trees are equal in Tree_n iff their canonical forms serialize
  /// identically.
  Tree canonical() const {
    TreeNode c = root_;
    canonicalize(c);
    return Tree(std::move(c));
  }

  std::string canonical_key() const { return canonical().serialize(); }

  friend bool operator==(const Tree& a, const Tree& b) {
    return a.canonical_key() == b.canonical_key();
  }

  /// The member of {i, j, l} lying outside the smallest rooted sub-tree that
  /// contains the other two. Indices are variable indices; requires a binary
  /// tree with distinct labels.
  int outsider(int i, int j, int l) const {
    require_distinct_binary("outsider");
    check_var(i);
    check_var(j);
    check_var(l);
    if (i == j || i == l || j == l)
      throw domain_error("outsider: indices must be pairwise distinct");
    int result = -1;
    find_outsider(root_, i, j, l, result);
    if (result < 0) throw error("outsider: no separating sub-tree found");
    return result;
  }

  /// All C(n,3) leaf triples with their outsiders marked; i < j always.
  std::vector<Triple> outsider_triples() const {
    require_distinct_binary("outsider_triples");
    int n = var_count();
    std::vector<Triple> out;
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b)
        for (int c = b + 1; c < n; ++c) {
          int o = outsider(a, b, c);
          Triple t{};
          if (o == c)
            t = {a, b, c};
          else if (o == b)
            t = {a, c, b};
          else
            t = {b, c, a};
          out.push_back(t);
        }
    return out;
  }

  /// Bitmask of variable indices appearing under each child of the root;
  /// helper for root-split driven algorithms. Requires <= 64 variables.
  std::vector<uint64_t> root_split_masks() const {
    std::vector<uint64_t> masks;
    for (const auto& c : root_.children) masks.push_back(leafset_mask(c));
    return masks;
  }

  uint64_t leafset_mask(const TreeNode& node) const {
    if (var_count() > 64) throw limit_error("leafset masks support at most 64 variables");
    if (node.is_leaf()) return uint64_t(1) << var_of(node.label);
    uint64_t m = 0;
    for (const auto& c : node.children) m |= leafset_mask(c);
    return m;
  }

private:
  TreeNode root_;
  std::vector<std::string> vars_;
  std::map<std::string, int> var_index_;
  int leaf_count_ = 0;

  int var_of(const std::string& label) const { return var_index_.at(label); }

  void init() {
    validate(root_);
    std::vector<std::string> labels;
    collect_labels(root_, labels);
    leaf_count_ = static_cast<int>(labels.size());
    std::sort(labels.begin(), labels.end(), detail::natural_less);
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    vars_ = std::move(labels);
    for (size_t i = 0; i < vars_.size(); ++i) var_index_[vars_[i]] = static_cast<int>(i);
  }

  static void validate(const TreeNode& n) {
    if (n.is_leaf()) {
      if (n.label.empty()) throw domain_error("leaf with empty label");
      return;
    }
    if (n.children.size() < 2)
      throw domain_error("internal node with fewer than 2 children");
    for (const auto& c : n.children) validate(c);
  }

  static void collect_labels(const TreeNode& n, std::vector<std::string>& out) {
    if (n.is_leaf()) {
      out.push_back(n.label);
      return;
    }
    for (const auto& c : n.children) collect_labels(c, out);
  }

  static bool is_binary_node(const TreeNode& n) {
    if (n.is_leaf()) return true;
    if (n.children.size() != 2) return false;
    for (const auto& c : n.children)
      if (!is_binary_node(c)) return false;
    return true;
  }

  static int count_internal(const TreeNode& n) {
    if (n.is_leaf()) return 0;
    int c = 1;
    for (const auto& k : n.children) c += count_internal(k);
    return c;
  }

  static int max_children_of(const TreeNode& n) {
    if (n.is_leaf()) return 0;
    int m = static_cast<int>(n.children.size());
    for (const auto& k : n.children) m = std::max(m, max_children_of(k));
    return m;
  }

  static std::string serialize_node(const TreeNode& n) {
    if (n.is_leaf()) return n.label;
    std::string s = "(";
    for (size_t i = 0; i < n.children.size(); ++i) {
      if (i) s += ",";
      s += serialize_node(n.children[i]);
    }
    s += ")";
    return s;
  }

  static nlohmann::json node_to_json(const TreeNode& n) {
    if (n.is_leaf()) return nlohmann::json{{"leaf", n.label}};
    nlohmann::json kids = nlohmann::json::array();
    for (const auto& c : n.children) kids.push_back(node_to_json(c));
    return nlohmann::json{{"node", kids}};
  }

  static TreeNode node_from_json(const nlohmann::json& j) {
    if (j.contains("leaf")) return TreeNode::leaf(j.at("leaf").get<std::string>());
    if (j.contains("node")) {
      std::vector<TreeNode> kids;
      for (const auto& c : j.at("node")) kids.push_back(node_from_json(c));
      return TreeNode::node(std::move(kids));
    }
    throw domain_error("tree JSON: expected {\"leaf\":...} or {\"node\":[...]}");
  }

  static std::string canonicalize(TreeNode& n) {
    if (n.is_leaf()) return n.label;
    std::vector<std::pair<std::string, size_t>> keys;
    for (size_t i = 0; i < n.children.size(); ++i)
      keys.emplace_back(canonicalize(n.children[i]), i);
    std::sort(keys.begin(), keys.end());
    std::vector<TreeNode> sorted;
    std::string s = "(";
    for (size_t i = 0; i < keys.size(); ++i) {
      if (i) s += ",";
      s += keys[i].first;
      sorted.push_back(std::move(n.children[keys[i].second]));
    }
    s += ")";
    n.children = std::move(sorted);
    return s;
  }

  void check_var(int v) const {
    if (v < 0 || v >= var_count()) throw domain_error("variable index out of range");
  }

  void require_distinct_binary(const char* op) const {
    if (!is_binary()) throw domain_error(std::string(op) + ": tree must be binary");
    if (has_repeated_labels())
      throw domain_error(std::string(op) + ": tree must have distinct labels");
  }

  // Returns the leafset mask of `n`; sets `result` when a separating sub-tree
  // is found. The deepest separating sub-tree determines the same outsider as
  // any other, so the first hit wins.
  uint64_t find_outsider(const TreeNode& n, int i, int j, int l, int& result) const {
    uint64_t mask = 0;
    if (n.is_leaf()) {
      mask = uint64_t(1) << var_of(n.label);
    } else {
      for (const auto& c : n.children) mask |= find_outsider(c, i, j, l, result);
    }
    if (result >= 0) return mask;
    bool hi = mask >> i & 1, hj = mask >> j & 1, hl = mask >> l & 1;
    if (hi && hj && !hl)
      result = l;
    else if (hi && hl && !hj)
      result = j;
    else if (hj && hl && !hi)
      result = i;
    return mask;
  }

  static void skip_ws(std::string_view s, size_t& pos) {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }

  static TreeNode parse_expr(std::string_view s, size_t& pos) {
    skip_ws(s, pos);
    if (pos >= s.size()) throw parse_error("unexpected end of input", pos);
    if (s[pos] == '(') {
      size_t open = pos;
      ++pos;
      std::vector<TreeNode> kids;
      kids.push_back(parse_expr(s, pos));
      skip_ws(s, pos);
      while (pos < s.size() && s[pos] == ',') {
        ++pos;
        kids.push_back(parse_expr(s, pos));
        skip_ws(s, pos);
      }
      if (pos >= s.size() || s[pos] != ')')
        throw parse_error("expected ',' or ')'", pos);
      ++pos;
      if (kids.size() < 2)
        throw parse_error("internal node needs at least 2 children", open);
      return TreeNode::node(std::move(kids));
    }
    if (std::isalpha(static_cast<unsigned char>(s[pos])) || s[pos] == '_') {
      size_t start = pos;
      while (pos < s.size() &&
             (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
        ++pos;
      return TreeNode::leaf(std::string(s.substr(start, pos - start)));
    }
    throw parse_error("expected identifier or '('", pos);
  }
};

/// All elements of Tree_n: binary rooted trees with leaves x1..xn, modulo
/// isomorphism, built by recursive bipartition of the label set. The result
/// is canonicalized and duplicate-free; |Tree_n| = (2n-3)!! for n >= 2.
inline std::vector<Tree> enumerate_tree_shapes(int n, int limit = 8) {
  if (n < 1) throw domain_error("enumerate_tree_shapes: n must be >= 1");
  if (n > limit)
    throw limit_error("enumerate_tree_shapes: n exceeds limit " + std::to_string(limit));

  std::vector<std::string> labels;
  for (int i = 1; i <= n; ++i) labels.push_back("x" + std::to_string(i));

  // trees over the label subset encoded by mask
  std::map<uint64_t, std::vector<TreeNode>> memo;
  auto lowbit_index = [](uint64_t m) { return __builtin_ctzll(m); };

  std::function<const std::vector<TreeNode>&(uint64_t)> gen =
      [&](uint64_t mask) -> const std::vector<TreeNode>& {
    auto it = memo.find(mask);
    if (it != memo.end()) return it->second;
    std::vector<TreeNode> out;
    if (__builtin_popcountll(mask) == 1) {
      out.push_back(TreeNode::leaf(labels[lowbit_index(mask)]));
    } else {
      uint64_t pinned = uint64_t(1) << lowbit_index(mask);
      uint64_t rest = mask ^ pinned;
      // iterate non-empty proper subsets of `rest` joined with the pinned leaf
      for (uint64_t sub = (rest - 1) & rest;; sub = (sub - 1) & rest) {
        uint64_t left = pinned | sub;
        uint64_t right = mask ^ left;
        if (right) {
          for (const auto& lt : gen(left))
            for (const auto& rt : gen(right))
              out.push_back(TreeNode::node({lt, rt}));
        }
        if (sub == 0) break;
      }
    }
    return memo[mask] = std::move(out);
  };

  uint64_t full = n == 64 ? ~uint64_t(0) : (uint64_t(1) << n) - 1;
  std::vector<Tree> result;
  for (const auto& node : gen(full)) result.push_back(Tree(node).canonical());
  return result;
}

}  // namespace treefn
