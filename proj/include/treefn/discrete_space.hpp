#pragma once

#include <cstdint>
#include <cstdlib>
#include <map>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "bigint.hpp"
#include "errors.hpp"
#include "gf2.hpp"
#include "tree.hpp"

namespace treefn {

namespace w64 {

// One-word truth tables (arity <= 6): bit v = output at input mask v.
inline uint64_t full(int n) { return n >= 6 ? ~uint64_t(0) : (uint64_t(1) << (1 << n)) - 1; }

inline uint64_t variable(int n, int i) {
  static constexpr uint64_t kVar[6] = {
      0xaaaaaaaaaaaaaaaaull, 0xccccccccccccccccull, 0xf0f0f0f0f0f0f0f0ull,
      0xff00ff00ff00ff00ull, 0xffff0000ffff0000ull, 0xffffffff00000000ull};
  return kVar[i] & full(n);
}

/// t'(v) = t(v ^ e_i)
inline uint64_t shift_input(uint64_t t, int i) {
  uint64_t lo = detail::BitBlock::kLowMask[i];
  int s = 1 << i;
  return ((t & lo) << s) | ((t >> s) & lo);
}

/// Formal derivative: t(v + e_i) + t(v); independent of x_i.
inline uint64_t derivative(uint64_t t, int i) { return t ^ shift_input(t, i); }

inline bool constraint(uint64_t t, int i, int j, int l) {
  uint64_t d_il = derivative(derivative(t, i), l);
  uint64_t d_jl = derivative(derivative(t, j), l);
  return (d_il & derivative(t, j)) == (d_jl & derivative(t, i));
}

}  // namespace w64

/// |F_bin(T)| = (2 * 6^n + 8) / 5 for any binary tree with n leaves.
inline BigInt space_size(int n) {
  if (n < 1) throw domain_error("space_size: n must be >= 1");
  return (BigInt(2) * BigInt::pow(BigInt(6), static_cast<uint64_t>(n)) + BigInt(8)) / BigInt(5);
}

/// Default cap on discrete enumeration; overridable via TREEFN_ENUM_LIMIT.
/// Hard ceiling is 6 (one machine word per truth table).
inline int enumeration_limit() {
  if (const char* env = std::getenv("TREEFN_ENUM_LIMIT")) {
    int v = std::atoi(env);
    if (v >= 1) return std::min(v, 6);
  }
  return 5;
}

/// The finite set of bit-valued functions implementable on a binary tree,
/// keyed by packed truth-table words.
struct FunctionSpace {
  Tree tree;
  int n;
  std::unordered_set<uint64_t> members;

  bool contains(uint64_t table) const { return members.count(table) != 0; }
  bool contains(const TruthTable& t) const { return contains(t.word()); }
  bool contains(const Gf2Poly& p) const { return contains(p.truth_table().word()); }

  /// Sorted truth-table hex strings, one per member.
  std::vector<std::string> sorted_hex() const {
    std::vector<uint64_t> keys(members.begin(), members.end());
    std::sort(keys.begin(), keys.end());
    std::vector<std::string> out;
    out.reserve(keys.size());
    for (uint64_t k : keys) out.push_back(TruthTable::from_word(n, k).to_hex());
    return out;
  }
};

namespace detail {

inline void require_enumerable(const Tree& t, int limit, const char* op) {
  if (!t.is_binary()) throw domain_error(std::string(op) + ": tree must be binary");
  if (t.has_repeated_labels())
    throw domain_error(std::string(op) + ": repeated labels are not supported");
  if (t.var_count() > limit)
    throw limit_error(std::string(op) + ": leaf count exceeds enumeration limit " +
                      std::to_string(limit));
}

// Members of the sub-space rooted at `node`, as n-variable tables.
inline std::vector<uint64_t> enumerate_node(const TreeNode& node, const Tree& t, int n) {
  if (node.is_leaf()) {
    uint64_t x = w64::variable(n, t.var_index(node.label));
    return {0, w64::full(n), x, x ^ w64::full(n)};
  }
  std::vector<uint64_t> left = enumerate_node(node.children[0], t, n);
  std::vector<uint64_t> right = enumerate_node(node.children[1], t, n);
  uint64_t ones = w64::full(n);
  auto non_constant = [&](const std::vector<uint64_t>& v) {
    std::vector<uint64_t> out;
    out.reserve(v.size());
    for (uint64_t f : v)
      if (f != 0 && f != ones) out.push_back(f);
    return out;
  };
  std::vector<uint64_t> l = non_constant(left), r = non_constant(right);

  // the six disjoint families: products, complemented products, sums with
  // the left part vanishing at 0, each side alone, and the constants
  std::vector<uint64_t> out;
  out.reserve(2 * l.size() * r.size() + l.size() * r.size() / 2 + l.size() + r.size() + 2);
  for (uint64_t f1 : l)
    for (uint64_t f2 : r) {
      out.push_back(f1 & f2);
      out.push_back((f1 & f2) ^ ones);
    }
  for (uint64_t f1 : l) {
    if (f1 & 1) continue;  // F1(0) must be 0
    for (uint64_t f2 : r) out.push_back(f1 ^ f2);
  }
  for (uint64_t f1 : l) out.push_back(f1);
  for (uint64_t f2 : r) out.push_back(f2);
  out.push_back(0);
  out.push_back(ones);
  return out;
}

}  // namespace detail

/// Builds F_bin(T) by the recursive disjoint-union construction. The result
/// is checked against the closed-form count, which simultaneously verifies
/// that the six families are disjoint.
inline FunctionSpace enumerate_space(const Tree& t, int limit = enumeration_limit()) {
  detail::require_enumerable(t, limit, "enumerate_space");
  int n = t.var_count();
  std::vector<uint64_t> all = detail::enumerate_node(t.root(), t, n);
  FunctionSpace space{t, n, {}};
  space.members.reserve(all.size() * 2);
  space.members.insert(all.begin(), all.end());
  if (BigInt(static_cast<unsigned long long>(space.members.size())) != space_size(n))
    throw error("enumerate_space: family sizes do not sum to the closed-form count");
  return space;
}

/// Oracle: evaluates every assignment of one of the 16 bivariate functions to
/// each internal node. Exponential; limited to n <= 4.
inline FunctionSpace brute_force_space(const Tree& t) {
  detail::require_enumerable(t, 4, "brute_force_space");
  int n = t.var_count();

  // flatten internal nodes; children references by index, leaves by variable
  struct Flat {
    int left, right;      // node indices, or -1 when the child is a leaf
    int lvar, rvar;       // leaf variable indices when applicable
  };
  std::vector<Flat> nodes;
  std::function<int(const TreeNode&)> flatten = [&](const TreeNode& node) -> int {
    Flat f{-1, -1, -1, -1};
    const TreeNode& lc = node.children[0];
    const TreeNode& rc = node.children[1];
    if (lc.is_leaf())
      f.lvar = t.var_index(lc.label);
    else
      f.left = flatten(lc);
    if (rc.is_leaf())
      f.rvar = t.var_index(rc.label);
    else
      f.right = flatten(rc);
    nodes.push_back(f);
    return static_cast<int>(nodes.size()) - 1;
  };

  FunctionSpace space{t, n, {}};
  if (t.root().is_leaf()) {
    space.members = {0, w64::full(n), w64::variable(n, 0), w64::variable(n, 0) ^ w64::full(n)};
    return space;
  }
  int root = flatten(t.root());
  size_t count = nodes.size();

  std::vector<int> code(count, 0);
  std::vector<int> value(count, 0);
  while (true) {
    uint64_t table = 0;
    for (size_t v = 0; v < (size_t(1) << n); ++v) {
      for (size_t k = 0; k < count; ++k) {  // children precede parents
        const Flat& f = nodes[k];
        int a = f.left >= 0 ? value[f.left] : (v >> f.lvar & 1);
        int b = f.right >= 0 ? value[f.right] : (v >> f.rvar & 1);
        value[k] = code[k] >> (a + 2 * b) & 1;
      }
      if (value[root]) table |= uint64_t(1) << v;
    }
    space.members.insert(table);
    size_t k = 0;
    while (k < count && ++code[k] == 16) code[k++] = 0;
    if (k == count) break;
  }
  return space;
}

/// Tests the full family of outsider-triple constraints. Every implementable
/// function passes; the converse holds for n <= 3 but fails from n = 4 on
/// (some constraint-satisfiers fit no root split form), so this is a
/// necessary filter, not an exact membership test. Exact membership is
/// FunctionSpace::contains.
inline bool is_member(const Tree& t, const Gf2Poly& p) {
  if (!t.is_binary()) throw domain_error("is_member: tree must be binary");
  if (t.has_repeated_labels()) throw domain_error("is_member: repeated labels unsupported");
  if (p.n() != t.var_count()) throw domain_error("is_member: arity mismatch");
  for (const Triple& tr : t.outsider_triples())
    if (!discrete_constraint(p, tr)) return false;
  return true;
}

/// Bivariate node functions, addressed by root path ("" = root, then 'L'/'R'
/// per step). Code bit (a + 2b) = g(a, b). `leaf_unary` carries the unary
/// function (bit a = g(a)) when the whole tree is a single leaf.
struct NodeAssignment {
  std::map<std::string, int> node_fn;
  std::optional<int> leaf_unary;

  nlohmann::json to_json() const {
    nlohmann::json j;
    nlohmann::json fns = nlohmann::json::object();
    for (const auto& [path, code] : node_fn) fns[path] = code;
    j["nodes"] = fns;
    if (leaf_unary) j["leaf_unary"] = *leaf_unary;
    return j;
  }
};

/// Bottom-up evaluation of a node assignment over the tree.
inline TruthTable evaluate_assignment(const Tree& t, const NodeAssignment& a) {
  int n = t.var_count();
  if (n > 6) throw limit_error("evaluate_assignment: at most 6 variables");
  std::function<uint64_t(const TreeNode&, const std::string&)> eval =
      [&](const TreeNode& node, const std::string& path) -> uint64_t {
    if (node.is_leaf()) {
      uint64_t x = w64::variable(n, t.var_index(node.label));
      if (path.empty() && a.leaf_unary) {
        int u = *a.leaf_unary;
        uint64_t r = 0;
        if (u & 1) r |= ~x;
        if (u & 2) r |= x;
        return r & w64::full(n);
      }
      return x;
    }
    uint64_t l = eval(node.children[0], path + "L");
    uint64_t r = eval(node.children[1], path + "R");
    auto it = a.node_fn.find(path);
    if (it == a.node_fn.end()) throw domain_error("assignment missing node " + (path.empty() ? std::string("\"\"") : path));
    int code = it->second;
    uint64_t ones = w64::full(n);
    uint64_t out = 0;
    if (code & 1) out |= ~l & ~r;
    if (code & 2) out |= l & ~r;
    if (code & 4) out |= ~l & r;
    if (code & 8) out |= l & r;
    return out & ones;
  };
  return TruthTable::from_word(n, eval(t.root(), ""));
}

namespace detail {

// assigns g(a,b) = a below `node` so it outputs its leftmost leaf variable
inline void fill_raw(const TreeNode& node, const std::string& path, NodeAssignment& out) {
  if (node.is_leaf()) return;
  out.node_fn[path] = 0b1010;  // (a,b) -> a
  fill_raw(node.children[0], path + "L", out);
  fill_raw(node.children[1], path + "R", out);
}

struct DiscreteDecomposer {
  const Tree& t;
  int n;
  uint64_t ones;
  NodeAssignment out;

  bool depends(uint64_t f, uint64_t var_mask) const {
    for (int i = 0; i < n; ++i)
      if ((var_mask >> i & 1) && w64::derivative(f, i) != 0) return true;
    return false;
  }

  // freezes the variables of `mask` to the corresponding bits of `point`:
  // picks the sub-table where x_i = point_i and broadcasts it over x_i
  uint64_t restrict_to(uint64_t f, uint64_t mask, uint64_t point) const {
    for (int i = 0; i < n; ++i)
      if (mask >> i & 1) {
        uint64_t lo = detail::BitBlock::kLowMask[i];
        int s = 1 << i;
        uint64_t half = (point >> i & 1) ? ((f >> s) & lo) : (f & lo);
        f = half | (half << s);
      }
    return f & ones;
  }

  void rec(const TreeNode& node, uint64_t f, const std::string& path) {
    const TreeNode& lc = node.children[0];
    const TreeNode& rc = node.children[1];
    uint64_t v1 = t.leafset_mask(lc), v2 = t.leafset_mask(rc);
    bool dep1 = depends(f, v1), dep2 = depends(f, v2);

    if (!dep1 && !dep2) {
      out.node_fn[path] = (f & 1) ? 0b1111 : 0b0000;
      fill_raw(lc, path + "L", out);
      fill_raw(rc, path + "R", out);
      return;
    }
    if (dep1 != dep2) {
      const TreeNode& live = dep1 ? lc : rc;
      const TreeNode& dead = dep1 ? rc : lc;
      std::string live_path = path + (dep1 ? "L" : "R");
      std::string dead_path = path + (dep1 ? "R" : "L");
      fill_raw(dead, dead_path, out);
      if (live.is_leaf()) {
        // f is a unary function of the live leaf; absorb it into this node
        int var = t.var_index(live.label);
        uint64_t x = w64::variable(n, var);
        int g0 = static_cast<int>(f & ~x & 1ull);                       // value at x=0
        int g1 = (f & x) != 0 ? 1 : 0;                                  // value at x=1
        int code;
        if (dep1)
          code = (g0 ? 0b0101 : 0) | (g1 ? 0b1010 : 0);
        else
          code = (g0 ? 0b0011 : 0) | (g1 ? 0b1100 : 0);
        out.node_fn[path] = code;
        return;
      }
      out.node_fn[path] = dep1 ? 0b1010 : 0b1100;  // project the live side
      rec(live, f, live_path);
      return;
    }

    // depends on both sides: sum form first, then the two product forms
    uint64_t f1 = 0, f2 = 0;
    int code = -1;
    bool is_sum = true;
    for (int i = 0; i < n && is_sum; ++i)
      if (v1 >> i & 1)
        for (int j = 0; j < n && is_sum; ++j)
          if ((v2 >> j & 1) && w64::derivative(w64::derivative(f, i), j) != 0) is_sum = false;
    if (is_sum) {
      f1 = restrict_to(f, v2, 0);
      f2 = restrict_to(f, v1, 0) ^ ((f & 1) ? ones : 0);
      code = 0b0110;  // a + b
    } else {
      auto try_product = [&](uint64_t g) -> bool {
        if (g == 0) return false;
        uint64_t witness = static_cast<uint64_t>(__builtin_ctzll(g));
        uint64_t g1 = restrict_to(g, v2, witness);
        uint64_t g2 = restrict_to(g, v1, witness);
        if ((g1 & g2) == g) {
          f1 = g1;
          f2 = g2;
          return true;
        }
        return false;
      };
      if (try_product(f)) {
        code = 0b1000;  // a * b
      } else if (try_product(f ^ ones)) {
        code = 0b0111;  // a * b + 1
      } else {
        // reachable: the triple constraints are necessary but not sufficient
        // for n >= 4, so a constraint-satisfier can still fail every form
        throw not_representable(
            "function satisfies all triple constraints but fits no root split form");
      }
    }
    out.node_fn[path] = code;
    descend(lc, f1, path + "L");
    descend(rc, f2, path + "R");
  }

  // recurse into a child, absorbing unary adjustments when it is a leaf
  void descend(const TreeNode& child, uint64_t target, const std::string& path) {
    if (!child.is_leaf()) {
      rec(child, target, path);
      return;
    }
    int var = t.var_index(child.label);
    uint64_t x = w64::variable(n, var);
    if (target == x) return;  // raw variable, nothing to absorb
    if (target != (x ^ ones))
      throw error("decompose: leaf target is not a unary function of its variable");
    // complement: rewrite this argument of the parent's function
    std::string parent = path.substr(0, path.size() - 1);
    bool left = path.back() == 'L';
    int g = out.node_fn.at(parent);
    int swapped;
    if (left)
      swapped = ((g & 0b0101) << 1) | ((g & 0b1010) >> 1);
    else
      swapped = ((g & 0b0011) << 2) | ((g & 0b1100) >> 2);
    out.node_fn[parent] = swapped;
  }
};

}  // namespace detail

/// Constructs node functions realizing `p` on `t`, following the recursive
/// sum / product / complemented-product case split; throws not_representable
/// when the constraints fail. The result is verified by re-evaluation.
inline NodeAssignment decompose(const Tree& t, const Gf2Poly& p) {
  if (!is_member(t, p)) throw not_representable("polynomial fails a tree constraint");
  int n = t.var_count();
  if (n > 6) throw limit_error("decompose: at most 6 variables");
  uint64_t table = p.truth_table().word();

  NodeAssignment out;
  if (t.root().is_leaf()) {
    uint64_t x = w64::variable(n, 0);
    int g0 = static_cast<int>(table & 1);
    int g1 = (table & x & 2) ? 1 : 0;
    out.leaf_unary = g0 | (g1 << 1);
  } else {
    detail::DiscreteDecomposer d{t, n, w64::full(n), {}};
    d.rec(t.root(), table, "");
    out = std::move(d.out);
  }
  if (evaluate_assignment(t, out).word() != table)
    throw error("decompose: verification by evaluation failed (internal error)");
  return out;
}

}  // namespace treefn
