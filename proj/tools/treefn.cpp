// treefn: decide, construct, enumerate and bound tree-function spaces from
// the command line. All outputs are deterministic; exit codes: 0 affirmative,
// 1 negative result (e.g. not a member), 2 usage or input error.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <treefn/treefn.hpp>

using nlohmann::json;
using namespace treefn;

namespace {

struct CliConfig {
  std::string output = "json";  // json | text
  int limit = enumeration_limit();
  uint64_t seed = 0;  // reserved; current subcommands are fully deterministic
};

int fail_input(const CliConfig& cfg, const std::string& type, const std::string& message) {
  if (cfg.output == "json") {
    std::cout << json{{"error", {{"type", type}, {"message", message}}}}.dump() << "\n";
  } else {
    std::cerr << "error (" << type << "): " << message << "\n";
  }
  return 2;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw error("cannot open file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const CliConfig& cfg, const json& j, const std::string& text) {
  if (cfg.output == "json")
    std::cout << j.dump() << "\n";
  else
    std::cout << text;
}

int cmd_enumerate(const CliConfig& cfg, const std::string& tree_text, bool count_only) {
  Tree t = Tree::parse(tree_text);
  if (count_only) {
    // the closed-form count needs no enumeration and works for any n
    if (!t.is_binary() || t.has_repeated_labels())
      return fail_input(cfg, "domain_error", "count is defined for binary trees with distinct labels");
    BigInt size = space_size(t.var_count());
    emit(cfg, json{{"tree", t.serialize()}, {"n", t.var_count()}, {"size", size.to_string()}},
         size.to_string() + "\n");
    return 0;
  }
  FunctionSpace s = enumerate_space(t, cfg.limit);
  auto hex = s.sorted_hex();
  if (cfg.output == "json") {
    emit(cfg, json{{"tree", t.serialize()}, {"n", s.n}, {"size", hex.size()}, {"members", hex}}, "");
  } else {
    std::string lines;
    for (const auto& h : hex) lines += h + "\n";
    emit(cfg, {}, lines);
  }
  return 0;
}

int cmd_check(const CliConfig& cfg, const std::string& tree_text, const std::string& poly_text,
              const std::string& mode, bool reduced) {
  Tree t = Tree::parse(tree_text);
  if (mode == "gf2") {
    if (reduced) return fail_input(cfg, "usage", "--reduced applies to --mode rat only");
    Gf2Poly p = Gf2Poly::parse(poly_text, t.var_count());
    json constraints = json::array();
    bool member = true;
    for (const Triple& tr : t.outsider_triples()) {
      bool holds = discrete_constraint(p, tr);
      member = member && holds;
      constraints.push_back({{"i", tr.i + 1}, {"j", tr.j + 1}, {"outsider", tr.l + 1}, {"holds", holds}});
    }
    emit(cfg,
         json{{"tree", t.serialize()}, {"poly", p.to_string()}, {"member", member},
              {"constraints", constraints}},
         std::string(member ? "member" : "not a member") + "\n");
    return member ? 0 : 1;
  }
  if (mode == "rat") {
    RatPoly f = RatPoly::parse(poly_text, t.var_count());
    if (reduced) {
      auto rcs = reduced_constraints(t);
      json arr = json::array();
      bool all = true;
      for (const auto& rc : rcs) {
        RatPoly res = rc.residual(f);
        bool holds = res.is_zero();
        all = all && holds;
        arr.push_back({{"identity", rc.to_string()}, {"holds", holds}, {"residual", res.to_string()}});
      }
      emit(cfg, json{{"tree", t.serialize()}, {"count", rcs.size()}, {"all_hold", all}, {"constraints", arr}},
           std::string(all ? "all reduced constraints hold" : "a reduced constraint fails") + "\n");
      return all ? 0 : 1;
    }
    ConstraintReport report = constraint_check(f, t);
    std::string text;
    for (const auto& e : report.entries)
      text += "(" + std::to_string(e.triple.i + 1) + "," + std::to_string(e.triple.j + 1) +
              "; outsider " + std::to_string(e.triple.l + 1) + "): " +
              (e.holds ? "holds" : "fails, residual " + e.residual.to_string()) + "\n";
    emit(cfg, report.to_json(), text);
    return report.all_hold ? 0 : 1;
  }
  return fail_input(cfg, "usage", "--mode must be gf2 or rat");
}

int cmd_decompose(const CliConfig& cfg, const std::string& tree_text,
                  const std::string& poly_text, const std::string& mode) {
  Tree t = Tree::parse(tree_text);
  if (mode == "gf2") {
    Gf2Poly p = Gf2Poly::parse(poly_text, t.var_count());
    NodeAssignment a;
    try {
      a = decompose(t, p);
    } catch (const not_representable& e) {
      emit(cfg, json{{"status", "NotRepresentable"}, {"detail", e.what()}},
           std::string("not representable: ") + e.what() + "\n");
      return 1;
    }
    json j = a.to_json();
    j["status"] = "ok";
    j["tree"] = t.serialize();
    std::string text;
    for (const auto& [path, code] : a.node_fn)
      text += (path.empty() ? "<root>" : path) + ": " + std::to_string(code) + "\n";
    emit(cfg, j, text);
    return 0;
  }
  if (mode == "rat") {
    RatPoly f = RatPoly::parse(poly_text, t.var_count());
    DecompResult r = decompose_polynomial(f, t);
    if (!r.ok()) {
      emit(cfg, json{{"status", to_string(r.status)}, {"detail", r.detail}},
           std::string(to_string(r.status)) + ": " + r.detail + "\n");
      return 1;
    }
    json j = r.decomposition.to_json();
    j["status"] = "ok";
    j["tree"] = t.serialize();
    std::string text;
    for (const auto& [path, p] : r.decomposition.node_fn)
      text += (path.empty() ? "<root>" : path) + ": " + p.to_string() + "\n";
    emit(cfg, j, text);
    return 0;
  }
  return fail_input(cfg, "usage", "--mode must be gf2 or rat");
}

int cmd_distance(const CliConfig& cfg, const std::vector<std::string>& tree_texts) {
  Tree t1 = Tree::parse(tree_texts[0]);
  Tree t2 = Tree::parse(tree_texts[1]);
  TreeDistance d = distance(t1, t2, cfg.limit);
  emit(cfg, d.to_json(),
       "intersection " + d.intersection.to_string() + " of " + d.total.to_string() +
           ", distance " + d.fraction_string() + " = " + d.value().to_decimal_string(4) + "\n");
  return 0;
}

int cmd_distance_matrix(const CliConfig& cfg, int n) {
  std::vector<Tree> trees = enumerate_tree_shapes(n);
  auto m = distance_matrix(trees, cfg.limit);
  json jt = json::array(), jm = json::array();
  std::string text;
  for (const auto& t : trees) jt.push_back(t.serialize());
  for (size_t i = 0; i < m.size(); ++i) {
    json row = json::array();
    for (size_t j = 0; j < m.size(); ++j) {
      row.push_back(m[i][j].to_string());
      text += (j ? " " : "") + m[i][j].to_decimal_string(4);
    }
    jm.push_back(row);
    text += "\n";
  }
  emit(cfg, json{{"trees", jt}, {"matrix", jm}}, text);
  return 0;
}

int cmd_reconstruct(const CliConfig& cfg, const std::string& space_file, int n) {
  std::istringstream in(read_file(space_file));
  std::unordered_set<uint64_t> members;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty()) continue;
    members.insert(TruthTable::from_hex(n, line).word());
  }
  Tree t = reconstruct_tree(members, n);
  emit(cfg, json{{"tree", t.serialize()}, {"tree_json", t.to_json()}}, t.serialize() + "\n");
  return 0;
}

int cmd_tenn(const CliConfig& cfg, const std::string& network_file) {
  LayeredNetwork net = LayeredNetwork::from_json(json::parse(read_file(network_file)));
  CapacityBound b = nn_capacity_bound(net);
  std::string text = "tree " + b.tenn.tree.serialize() + "\nL(N) = " +
                     b.tenn.leaf_count.to_string() + ", c = " +
                     std::to_string(b.tenn.max_children) + "\ngamma_c^L = " +
                     b.gamma_power.to_string() + "\nrigorous bound = " +
                     b.rigorous_bound.to_string() + "\n";
  json j = b.to_json();
  j["tree_json"] = b.tenn.tree.to_json();
  emit(cfg, j, text);
  return 0;
}

int cmd_bounds(const CliConfig& cfg, int burnside_m, int gamma_c,
               const std::vector<int>& threshold, const std::vector<int>& variety) {
  json j;
  std::string text;
  int given = (burnside_m >= 0) + (gamma_c >= 0) + !threshold.empty() + !variety.empty();
  if (given != 1)
    return fail_input(cfg, "usage",
                      "give exactly one of --burnside, --gamma, --threshold, --variety");
  if (burnside_m >= 0) {
    BigInt v = burnside_classes(burnside_m);
    j = json{{"burnside", v.to_string()}};
    text = v.to_string() + "\n";
  } else if (gamma_c >= 0) {
    BigInt v = gamma(gamma_c);
    j = json{{"gamma", v.to_string()}};
    text = v.to_string() + "\n";
  } else if (!threshold.empty()) {
    int n = universal_threshold(threshold[0], threshold[1]);
    j = json{{"threshold", n}};
    text = std::to_string(n) + "\n";
  } else {
    auto d = variety_dims(variety[0], variety[1]);
    j = json{{"bound", d.bound.to_string()}, {"ambient", d.ambient.to_string()}};
    text = d.bound.to_string() + " " + d.ambient.to_string() + "\n";
  }
  emit(cfg, j, text);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tree function spaces: membership, decomposition, metrics and bounds"};
  app.require_subcommand(1);

  CliConfig cfg;
  app.add_option("--output", cfg.output, "output format")->check(CLI::IsMember({"json", "text"}));
  app.add_option("--limit", cfg.limit, "enumeration limit (default 5, or TREEFN_ENUM_LIMIT)");
  app.add_option("--seed", cfg.seed, "random seed (reserved; outputs are deterministic)");

  std::string tree_text, poly_text, mode = "gf2", space_file, network_file;
  std::vector<std::string> tree_texts;
  bool count_only = false, reduced = false;
  int mat_n = 4, rec_n = 0;
  int burnside_m = -1, gamma_c = -1;
  std::vector<int> threshold, variety;

  auto* enumerate = app.add_subcommand("enumerate", "enumerate a discrete function space");
  enumerate->add_option("--tree", tree_text, "tree expression")->required();
  enumerate->add_flag("--count-only", count_only, "print the closed-form size only");

  auto* check = app.add_subcommand("check", "test membership / constraint satisfaction");
  check->add_option("--tree", tree_text)->required();
  check->add_option("--poly", poly_text)->required();
  check->add_option("--mode", mode)->check(CLI::IsMember({"gf2", "rat"}));
  check->add_flag("--reduced", reduced, "use the reduced C(n-1,2) constraint set (rat mode)");

  auto* decompose_cmd = app.add_subcommand("decompose", "construct a superposition on the tree");
  decompose_cmd->add_option("--tree", tree_text)->required();
  decompose_cmd->add_option("--poly", poly_text)->required();
  decompose_cmd->add_option("--mode", mode)->check(CLI::IsMember({"gf2", "rat"}));

  auto* dist = app.add_subcommand("distance", "symmetric-difference distance of two trees");
  dist->add_option("--tree", tree_texts, "tree expression (give twice)")->expected(2);

  auto* dmat = app.add_subcommand("distance-matrix", "pairwise distances over Tree_n");
  dmat->add_option("--n", mat_n, "leaf count")->required();

  auto* rec = app.add_subcommand("reconstruct", "recover the tree from its function space");
  rec->add_option("--space", space_file, "file of truth-table hex lines")->required();
  rec->add_option("--n", rec_n, "arity")->required();

  auto* tenn_cmd = app.add_subcommand("tenn", "expand a layered network and bound its capacity");
  tenn_cmd->add_option("--network", network_file, "network JSON file")->required();

  auto* bounds = app.add_subcommand("bounds", "closed-form counting bounds");
  bounds->add_option("--burnside", burnside_m, "orbit count of the shift action on m-variate polynomials");
  bounds->add_option("--gamma", gamma_c, "per-leaf capacity base gamma_c");
  bounds->add_option("--threshold", threshold, "P C: minimal leaf count for universality")->expected(2);
  bounds->add_option("--variety", variety, "N K: tree-variety dimension bound and ambient dimension")->expected(2);

  CLI11_PARSE(app, argc, argv);

  try {
    if (enumerate->parsed()) return cmd_enumerate(cfg, tree_text, count_only);
    if (check->parsed()) return cmd_check(cfg, tree_text, poly_text, mode, reduced);
    if (decompose_cmd->parsed()) return cmd_decompose(cfg, tree_text, poly_text, mode);
    if (dist->parsed()) {
      if (tree_texts.size() != 2) return fail_input(cfg, "usage", "distance needs --tree given twice");
      return cmd_distance(cfg, tree_texts);
    }
    if (dmat->parsed()) return cmd_distance_matrix(cfg, mat_n);
    if (rec->parsed()) return cmd_reconstruct(cfg, space_file, rec_n);
    if (tenn_cmd->parsed()) return cmd_tenn(cfg, network_file);
    if (bounds->parsed()) return cmd_bounds(cfg, burnside_m, gamma_c, threshold, variety);
  } catch (const parse_error& e) {
    return fail_input(cfg, "parse_error", e.what());
  } catch (const limit_error& e) {
    return fail_input(cfg, "limit_error", e.what());
  } catch (const inconsistent_space& e) {
    return fail_input(cfg, "inconsistent_space", e.what());
  } catch (const domain_error& e) {
    return fail_input(cfg, "domain_error", e.what());
  } catch (const std::exception& e) {
    return fail_input(cfg, "error", e.what());
  }
  return 2;
}
