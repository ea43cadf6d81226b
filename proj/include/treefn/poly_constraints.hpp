#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "bigint.hpp"
#include "errors.hpp"
#include "ratpoly.hpp"
#include "tree.hpp"

namespace treefn {

/// Result of checking F_{xi xl} F_{xj} = F_{xj xl} F_{xi} over all outsider
/// triples; `residual` is the left-minus-right polynomial.
struct ConstraintEntry {
  Triple triple;
  bool holds;
  RatPoly residual;
};

struct ConstraintReport {
  std::vector<ConstraintEntry> entries;
  bool all_hold = true;

  nlohmann::json to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& e : entries) {
      arr.push_back({{"i", e.triple.i + 1},
                     {"j", e.triple.j + 1},
                     {"outsider", e.triple.l + 1},
                     {"holds", e.holds},
                     {"residual", e.residual.to_string()}});
    }
    return nlohmann::json{{"all_hold", all_hold}, {"constraints", arr}};
  }
};

inline RatPoly constraint_residual(const RatPoly& f, const Triple& t) {
  return f.derivative(t.i).derivative(t.l) * f.derivative(t.j) -
         f.derivative(t.j).derivative(t.l) * f.derivative(t.i);
}

/// Evaluates the residual for every outsider triple of a binary tree with
/// distinct labels; the constraint holds iff the residual is identically 0.
inline ConstraintReport constraint_check(const RatPoly& f, const Tree& t) {
  if (f.n() != t.var_count()) throw domain_error("constraint_check: arity mismatch");
  ConstraintReport report;
  for (const Triple& tr : t.outsider_triples()) {
    RatPoly r = constraint_residual(f, tr);
    bool ok = r.is_zero();
    report.all_hold = report.all_hold && ok;
    report.entries.push_back({tr, ok, std::move(r)});
  }
  return report;
}

/// One identity of the reduced constraint set: the products of derivatives
/// on the two sides must be equal. Each factor is the multi-index of a
/// partial derivative of F.
struct ReducedConstraint {
  std::vector<std::vector<int>> lhs, rhs;

  RatPoly residual(const RatPoly& f) const {
    auto side = [&](const std::vector<std::vector<int>>& factors) {
      RatPoly acc = RatPoly::constant(f.n(), Rational(1));
      for (const auto& d : factors) acc *= f.derivative(d);
      return acc;
    };
    return side(lhs) - side(rhs);
  }

  bool holds(const RatPoly& f) const { return residual(f).is_zero(); }

  std::string to_string() const {
    auto side = [](const std::vector<std::vector<int>>& factors) {
      std::string s;
      for (const auto& d : factors) {
        s += "F[";
        for (size_t k = 0; k < d.size(); ++k) {
          if (k) s += ",";
          s += "x" + std::to_string(d[k] + 1);
        }
        s += "]";
      }
      return s;
    };
    return side(lhs) + " = " + side(rhs);
  }
};

/// The C(n-1,2) ratio-chain identities that generically imply the full
/// C(n,3) set: per root split with sides V1, V2 and reference pair (a, b),
/// every other cross pair (i, j) is chained to the reference; recursion adds
/// each sub-tree's own identities. When the pair shares an index with the
/// reference the common first-derivative factor is cancelled, leaving a
/// plain triple constraint.
inline std::vector<ReducedConstraint> reduced_constraints(const Tree& t) {
  if (!t.is_binary()) throw domain_error("reduced_constraints: tree must be binary");
  if (t.has_repeated_labels())
    throw domain_error("reduced_constraints: repeated labels unsupported");

  std::vector<ReducedConstraint> out;
  std::function<void(const TreeNode&)> emit = [&](const TreeNode& node) {
    if (node.is_leaf()) return;
    auto vars_of = [&](const TreeNode& c) {
      uint64_t m = t.leafset_mask(c);
      std::vector<int> v;
      for (int i = 0; i < t.var_count(); ++i)
        if (m >> i & 1) v.push_back(i);
      return v;
    };
    std::vector<int> v1 = vars_of(node.children[0]);
    std::vector<int> v2 = vars_of(node.children[1]);
    int a = v1.front(), b = v2.front();
    for (int i : v1)
      for (int j : v2) {
        if (i == a && j == b) continue;
        ReducedConstraint rc;
        if (i == a) {
          // cancel F_{xa}: triple constraint with outsider a
          rc.lhs = {{a, j}, {b}};
          rc.rhs = {{a, b}, {j}};
        } else if (j == b) {
          // cancel F_{xb}: triple constraint with outsider b
          rc.lhs = {{i, b}, {a}};
          rc.rhs = {{a, b}, {i}};
        } else {
          rc.lhs = {{i, j}, {a}, {b}};
          rc.rhs = {{a, b}, {i}, {j}};
        }
        out.push_back(std::move(rc));
      }
    emit(node.children[0]);
    emit(node.children[1]);
  };
  emit(t.root());
  return out;
}

/// Upper bound n(k^2+1) on dim Var_T^k and the ambient dimension C(k+n, n).
struct VarietyDims {
  BigInt bound, ambient;
};

inline BigInt binomial(uint64_t n, uint64_t k) {
  if (k > n) return BigInt(0);
  k = std::min(k, n - k);
  BigInt r(1);
  for (uint64_t i = 1; i <= k; ++i) {
    r = r * BigInt(static_cast<unsigned long long>(n - k + i));
    r = r / BigInt(static_cast<unsigned long long>(i));
  }
  return r;
}

inline VarietyDims variety_dims(int n, int k) {
  if (n < 1 || k < 0) throw domain_error("variety_dims: need n >= 1, k >= 0");
  BigInt bound = BigInt(n) * (BigInt(k) * BigInt(k) + BigInt(1));
  BigInt ambient = binomial(static_cast<uint64_t>(k) + static_cast<uint64_t>(n),
                            static_cast<uint64_t>(n));
  return {bound, ambient};
}

namespace detail {

/// Determinant of a square polynomial matrix by Laplace expansion along rows
/// with memoization over column subsets. Structural zeros prune the work.
inline RatPoly poly_determinant(const std::vector<std::vector<RatPoly>>& m) {
  size_t k = m.size();
  int n = m[0][0].n();
  std::map<uint64_t, RatPoly> memo;
  std::function<RatPoly(size_t, uint64_t)> det = [&](size_t row, uint64_t cols) -> RatPoly {
    if (row == k) return RatPoly::constant(n, Rational(1));
    auto it = memo.find(cols);
    if (it != memo.end()) return it->second;
    RatPoly acc(n);
    int parity = 0;
    for (size_t c = 0; c < k; ++c) {
      if (!(cols >> c & 1)) continue;
      if (!m[row][c].is_zero()) {
        RatPoly sub = det(row + 1, cols & ~(uint64_t(1) << c));
        RatPoly term = m[row][c] * sub;
        acc = parity % 2 == 0 ? acc + term : acc - term;
      }
      ++parity;
    }
    return memo[cols] = std::move(acc);
  };
  return det(0, (uint64_t(1) << k) - 1);
}

}  // namespace detail

struct DetCheckResult {
  bool identically_zero;
  RatPoly determinant;
};

/// Necessary condition for F(x,y,z) = g(f(x,y), h(x,z)): the 7x7 determinant
/// of first-column derivatives in x adjoined to the linear-system matrix in
/// (A, B, A_y, B_z, A_yy, B_zz) must vanish identically. Not sufficient.
inline DetCheckResult repeated_label_det_check(const RatPoly& f) {
  if (f.n() != 3) throw domain_error("repeated_label_det_check: needs exactly 3 variables");
  const int X = 0, Y = 1, Z = 2;
  auto d = [&](std::vector<int> vars) { return f.derivative(vars); };
  RatPoly z = RatPoly::zero(3);

  std::vector<std::vector<RatPoly>> m = {
      {d({X}), d({Y}), d({Z}), z, z, z, z},
      {d({X, Y}), d({Y, Y}), d({Y, Z}), d({Y}), z, z, z},
      {d({X, Z}), d({Y, Z}), d({Z, Z}), z, d({Z}), z, z},
      {d({X, Y, Z}), d({Y, Y, Z}), d({Y, Z, Z}), d({Y, Z}), d({Y, Z}), z, z},
      {d({X, Y, Y}), d({Y, Y, Y}), d({Y, Y, Z}), Rational(2) * d({Y, Y}), z, d({Y}), z},
      {d({X, Z, Z}), d({Y, Z, Z}), d({Z, Z, Z}), z, Rational(2) * d({Z, Z}), z, d({Z})},
      {d({X, Y, Z, Z}), d({Y, Y, Z, Z}), d({Y, Z, Z, Z}), d({Y, Z, Z}),
       Rational(2) * d({Y, Z, Z}), z, d({Y, Z})},
  };
  RatPoly det = detail::poly_determinant(m);
  return {det.is_zero(), std::move(det)};
}

}  // namespace treefn
