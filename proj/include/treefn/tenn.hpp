#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "bigint.hpp"
#include "errors.hpp"
#include "tree.hpp"

namespace treefn {

/// Layered feed-forward network: layer 0 is the named inputs; every later
/// node lists its inputs from the previous layer only; a single output node
/// sits in the last layer.
struct LayeredNetwork {
  std::vector<std::string> inputs;
  struct Node {
    std::string id;
    std::vector<std::string> in;
  };
  std::vector<std::vector<Node>> layers;

  /// {"inputs":["x","y"],"layers":[[{"id":"f","in":["x","y"]}],...]}
  static LayeredNetwork from_json(const nlohmann::json& j) {
    LayeredNetwork net;
    for (const auto& s : j.at("inputs")) net.inputs.push_back(s.get<std::string>());
    for (const auto& layer : j.at("layers")) {
      std::vector<Node> nodes;
      for (const auto& nj : layer) {
        Node n;
        n.id = nj.at("id").get<std::string>();
        for (const auto& s : nj.at("in")) n.in.push_back(s.get<std::string>());
        nodes.push_back(std::move(n));
      }
      net.layers.push_back(std::move(nodes));
    }
    net.validate();
    return net;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["inputs"] = inputs;
    nlohmann::json ls = nlohmann::json::array();
    for (const auto& layer : layers) {
      nlohmann::json lj = nlohmann::json::array();
      for (const auto& n : layer) lj.push_back({{"id", n.id}, {"in", n.in}});
      ls.push_back(lj);
    }
    j["layers"] = ls;
    return j;
  }

  void validate() const {
    if (inputs.empty()) throw domain_error("network: no inputs");
    if (layers.empty()) throw domain_error("network: no layers");
    if (layers.back().size() != 1) throw domain_error("network: needs exactly one output node");
    std::set<std::string> seen(inputs.begin(), inputs.end());
    if (seen.size() != inputs.size()) throw domain_error("network: duplicate input name");
    std::set<std::string> prev = seen;
    for (const auto& layer : layers) {
      if (layer.empty()) throw domain_error("network: empty layer");
      std::set<std::string> cur;
      for (const auto& n : layer) {
        if (n.id.empty()) throw domain_error("network: empty node id");
        if (!seen.insert(n.id).second) throw domain_error("network: duplicate id " + n.id);
        if (n.in.empty()) throw domain_error("network: node " + n.id + " has no inputs");
        for (const auto& src : n.in)
          if (!prev.count(src))
            throw domain_error("network: node " + n.id + " reads " + src +
                               " which is not in the previous layer");
        cur.insert(n.id);
      }
      prev = std::move(cur);
    }
  }

  /// Max fan-in among function nodes, floored at 2 (pass-throughs count as
  /// unary but the capacity formulas need c >= 2).
  int max_in_degree() const {
    size_t c = 2;
    for (const auto& layer : layers)
      for (const auto& n : layer) c = std::max(c, n.in.size());
    return static_cast<int>(c);
  }
};

struct TennResult {
  Tree tree;
  BigInt leaf_count;  // L(N), leaves counted with multiplicity
  int max_children;   // c
};

/// Expands a network to its tree: each tree vertex is an ascending path from
/// a network vertex to the output, so nodes feeding several upper nodes are
/// duplicated. In-degree-1 nodes collapse to pass-throughs (a tree node needs
/// >= 2 children), which leaves the computed function unchanged.
inline TennResult expand_tenn(const LayeredNetwork& net) {
  net.validate();
  std::map<std::string, const LayeredNetwork::Node*> by_id;
  for (const auto& layer : net.layers)
    for (const auto& n : layer) by_id[n.id] = &n;
  std::set<std::string> input_set(net.inputs.begin(), net.inputs.end());

  std::function<TreeNode(const std::string&)> expand = [&](const std::string& id) -> TreeNode {
    if (input_set.count(id)) return TreeNode::leaf(id);
    const auto* node = by_id.at(id);
    if (node->in.size() == 1) return expand(node->in[0]);  // unary pass-through
    std::vector<TreeNode> kids;
    for (const auto& src : node->in) kids.push_back(expand(src));
    return TreeNode::node(std::move(kids));
  };

  Tree tree(expand(net.layers.back()[0].id));
  return TennResult{tree, BigInt(static_cast<long long>(tree.leaf_count())),
                    std::max(2, tree.max_children())};
}

/// Orbit count of the (Z_2)^m shift action on multilinear m-variate GF(2)
/// polynomials: 2^(2^(m-1) - m) (2^(2^(m-1)) + 2^m - 1).
inline BigInt burnside_classes(int m) {
  if (m < 1) throw domain_error("burnside_classes: m must be >= 1");
  uint64_t half = uint64_t(1) << (m - 1);
  return BigInt::pow2(half - static_cast<uint64_t>(m)) *
         (BigInt::pow2(half) + BigInt::pow2(static_cast<uint64_t>(m)) - BigInt(1));
}

/// Per-leaf capacity base: gamma_2 = 6; gamma_c = 2^(2^(c-1)-c+2)(2^(2^(c-1))
/// + 2^c - 1) for c >= 3. Always smaller than 2^(2^c).
inline BigInt gamma(int c) {
  if (c < 2) throw domain_error("gamma: c must be >= 2");
  BigInt g = c == 2 ? BigInt(6)
                    : BigInt::pow2((uint64_t(1) << (c - 1)) - c + 2) *
                          (BigInt::pow2(uint64_t(1) << (c - 1)) +
                           BigInt::pow2(static_cast<uint64_t>(c)) - BigInt(1));
  if (!(g < BigInt::pow2(uint64_t(1) << c)))
    throw error("gamma: bound gamma_c < 2^(2^c) violated (internal error)");
  return g;
}

/// |F_bin(T)| <= 4^n * burnside_classes(c)^(n-1) for any tree with n leaves
/// and fan-out at most c.
inline BigInt space_size_bound(int n, int c) {
  if (n < 1) throw domain_error("space_size_bound: n must be >= 1");
  if (c < 2) throw domain_error("space_size_bound: c must be >= 2");
  return BigInt::pow(BigInt(4), static_cast<uint64_t>(n)) *
         BigInt::pow(burnside_classes(c), static_cast<uint64_t>(n - 1));
}

/// Smallest n passing the necessary counting condition for implementing all
/// of {0,1}^p -> {0,1}: for c = 2, (2*6^n+8)/5 >= 2^(2^p); for c >= 3,
/// gamma_c^(n-1) >= 2^(2^p - 2). Exact integer comparisons throughout;
/// necessary, not sufficient.
inline int universal_threshold(int p, int c) {
  if (p < 1) throw domain_error("universal_threshold: p must be >= 1");
  if (c < 2) throw domain_error("universal_threshold: c must be >= 2");
  if (p > 24) throw limit_error("universal_threshold: p too large");
  BigInt needed = BigInt::pow2(uint64_t(1) << p);
  if (c == 2) {
    BigInt six_pow(6);  // 6^n at n = 1
    int n = 1;
    while ((BigInt(2) * six_pow + BigInt(8)) / BigInt(5) < needed) {
      ++n;
      six_pow *= BigInt(6);
    }
    return n;
  }
  BigInt target = (uint64_t(1) << p) >= 2 ? BigInt::pow2((uint64_t(1) << p) - 2) : BigInt(1);
  BigInt g = gamma(c);
  BigInt pow(1);  // gamma^(n-1) at n = 1
  int n = 1;
  while (pow < target) {
    ++n;
    pow *= g;
  }
  return n;
}

/// Capacity bounds for the network via its TENN: the asymptotic witness
/// gamma_c^L and the rigorous finite bound 4^L * burnside_classes(c)^(L-1).
/// For c = 2 the expanded tree is binary and duplicate-free labeling would
/// give the exact closed-form count, reported alongside.
struct CapacityBound {
  TennResult tenn;
  BigInt gamma_base;
  BigInt gamma_power;     // gamma_c^L, base-and-exponent witness of the O(.) bound
  BigInt rigorous_bound;  // 4^L * burnside(c)^(L-1), certifiable
  std::optional<BigInt> exact_binary_count;  // (2*6^L+8)/5 when c == 2

  nlohmann::json to_json() const {
    nlohmann::json j{{"tree", tenn.tree.serialize()},
                     {"leaf_count", tenn.leaf_count.to_string()},
                     {"max_children", tenn.max_children},
                     {"gamma", gamma_base.to_string()},
                     {"gamma_power_bound", gamma_power.to_string()},
                     {"rigorous_bound", rigorous_bound.to_string()}};
    if (exact_binary_count) j["exact_binary_count"] = exact_binary_count->to_string();
    return j;
  }
};

inline CapacityBound nn_capacity_bound(const LayeredNetwork& net) {
  TennResult tenn = expand_tenn(net);
  uint64_t leaves = tenn.leaf_count.to_u64();
  int c = tenn.max_children;
  CapacityBound b{tenn, gamma(c), BigInt::pow(gamma(c), leaves),
                  space_size_bound(static_cast<int>(leaves), c), std::nullopt};
  if (c == 2)
    b.exact_binary_count =
        (BigInt(2) * BigInt::pow(BigInt(6), leaves) + BigInt(8)) / BigInt(5);
  return b;
}

}  // namespace treefn
