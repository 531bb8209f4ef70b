#include "fendi/fored.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>

#include "fendi/detail/peel.hpp"
#include "fendi/error.hpp"
#include "fendi/lp.hpp"
#include "fendi/pricing.hpp"

namespace fendi {

int quantize_length(double zeta, double theta) {
  if (!(theta > 0.0)) throw InvalidArgument("quantization factor must be positive");
  if (zeta < 0.0) throw InvalidArgument("lengths must be nonnegative");
  const double x = theta * zeta;
  return static_cast<int>(std::floor(x + 1e-12 * std::max(1.0, std::abs(x)))) + 1;
}

Quantization Quantization::from_theta(const Network& net, double theta) {
  Quantization q;
  q.theta = theta;
  for (const auto& l : net.links()) q.link_len.push_back(quantize_length(l.length(), theta));
  for (const auto& n : net.nodes()) q.node_len.push_back(quantize_length(n.params.length(), theta));
  return q;
}

Quantization Quantization::from_lengths(const Network& net, std::vector<int> link_len,
                                        std::vector<int> node_len) {
  if (static_cast<int>(link_len.size()) != net.num_links() ||
      static_cast<int>(node_len.size()) != net.num_nodes()) {
    throw InvalidArgument("one quantized length per link and per node is required");
  }
  for (int v : link_len) {
    if (v < 1) throw InvalidArgument("quantized lengths must be positive integers");
  }
  for (int v : node_len) {
    if (v < 1) throw InvalidArgument("quantized lengths must be positive integers");
  }
  Quantization q;
  q.link_len = std::move(link_len);
  q.node_len = std::move(node_len);
  return q;
}

int Quantization::walk_length(const Walk& w) const {
  int z = 0;
  for (LinkIndex l : w.links) z += link_len[l];
  for (std::size_t i = 1; i + 1 < w.nodes.size(); ++i) z += node_len[w.nodes[i]];
  return z;
}

int Quantization::tree_length(const PflowTree& tree) const {
  int z = 0;
  for (const auto& n : tree.nodes) z += n.is_gen() ? link_len[n.link] : node_len[n.k];
  return z;
}

LayeredEflow LayeredEflow::zero(const Network& net, NodeIndex s, NodeIndex t, int Z,
                                Quantization q) {
  LayeredEflow lef;
  lef.s = s;
  lef.t = t;
  lef.Z = Z;
  lef.quant = std::move(q);
  lef.g.assign(net.num_links(), 0.0);
  return lef;
}

namespace {

Enode low_child(const LevelSwapKey& k) { return make_enode(k.target.m, k.k); }
Enode high_child(const LevelSwapKey& k) { return make_enode(k.k, k.target.n); }
int high_level(const LayeredEflow& lef, const LevelSwapKey& k) {
  return k.z - k.z1 - lef.quant.node_len[k.k];
}

using ExtKey = std::pair<Enode, int>;

struct LayeredBalance {
  std::map<ExtKey, double> produced;
  std::map<ExtKey, double> consumed;
};

LayeredBalance layered_balance(const LayeredEflow& lef, const Network& net) {
  LayeredBalance b;
  for (int l = 0; l < net.num_links(); ++l) {
    if (lef.g[l] == 0.0) continue;
    const Link& link = net.link(l);
    b.produced[{make_enode(link.a, link.b), lef.quant.link_len[l]}] +=
        link.q * link.capacity * lef.g[l];
  }
  for (const auto& [key, v] : lef.x) {
    b.produced[{key.target, key.z}] += net.node(key.k).params.q * v;
    b.consumed[{low_child(key), key.z1}] += v;
    b.consumed[{high_child(key), high_level(lef, key)}] += v;
  }
  return b;
}

std::string ext_name(const Network& net, Enode e, int z) {
  return enode_key(net, e) + "/" + std::to_string(z);
}

}  // namespace

double layered_I(const LayeredEflow& lef, const Network& net, Enode mn, int z) {
  double r = 0.0;
  for (LinkIndex l : net.links_between(mn.m, mn.n)) {
    if (lef.quant.link_len[l] == z) r += net.link(l).q * net.link(l).capacity * lef.g[l];
  }
  for (auto it = lef.x.lower_bound(LevelSwapKey{mn, z, -1, 0});
       it != lef.x.end() && it->first.target == mn && it->first.z == z; ++it) {
    r += net.node(it->first.k).params.q * it->second;
  }
  return r;
}

double layered_Omega(const LayeredEflow& lef, const Network&, Enode mn, int z) {
  double r = 0.0;
  for (const auto& [key, v] : lef.x) {
    if (low_child(key) == mn && key.z1 == z) r += v;
    if (high_child(key) == mn && high_level(lef, key) == z) r += v;
  }
  return r;
}

ValidationReport validate_layered(const Network& net, const LayeredEflow& lef, double tol) {
  ValidationReport rep;
  auto fail = [&](std::string what, double mag) {
    rep.ok = false;
    rep.violations.push_back({std::move(what), mag});
  };
  if (static_cast<int>(lef.g.size()) != net.num_links() ||
      static_cast<int>(lef.quant.link_len.size()) != net.num_links() ||
      static_cast<int>(lef.quant.node_len.size()) != net.num_nodes()) {
    fail("size mismatch with network", 1.0);
    return rep;
  }
  const double scale = std::max(1.0, std::abs(lef.eta));
  for (int l = 0; l < net.num_links(); ++l) {
    if (lef.g[l] < -tol || lef.g[l] > 1.0 + tol) fail("g[" + link_key(net, l) + "] out of [0,1]", lef.g[l]);
    if (lef.g[l] > 0.0 && lef.quant.link_len[l] > lef.Z) {
      fail("g[" + link_key(net, l) + "] generates above the length bound", lef.g[l]);
    }
  }
  for (const auto& [key, v] : lef.x) {
    const std::string name = ext_name(net, key.target, key.z) + " via " + net.node(key.k).id;
    if (v < -tol * scale) fail("x[" + name + "] negative", -v);
    if (contains(key.target, key.k)) fail("x[" + name + "] swaps at an endpoint", v);
    if (key.z > lef.Z || key.z1 < 1 || high_level(lef, key) < 1) {
      fail("x[" + name + "] has an invalid level split", v);
    }
  }
  const auto b = layered_balance(lef, net);
  const Enode st = lef.sd();
  double eta = 0.0;
  std::set<ExtKey> keys;
  for (const auto& [k, _] : b.produced) keys.insert(k);
  for (const auto& [k, _] : b.consumed) keys.insert(k);
  for (const auto& k : keys) {
    const double in = b.produced.count(k) ? b.produced.at(k) : 0.0;
    const double out = b.consumed.count(k) ? b.consumed.at(k) : 0.0;
    if (k.first == st) {
      eta += in;
      if (out > tol * scale) fail("Omega(" + ext_name(net, k.first, k.second) + ") must be 0", out);
    } else if (std::abs(in - out) > tol * scale) {
      fail("conservation at " + ext_name(net, k.first, k.second), std::abs(in - out));
    }
  }
  if (std::abs(eta - lef.eta) > tol * scale) fail("eta differs from the SD production", std::abs(eta - lef.eta));
  return rep;
}

Eflow aggregate(const LayeredEflow& lef, const Network& net) {
  Eflow ef = Eflow::zero(net, lef.s, lef.t);
  ef.g = lef.g;
  for (const auto& [key, v] : lef.x) ef.x[SwapKey{key.target, key.k}] += v;
  ef.eta = compute_I(ef, net, ef.sd());
  return ef;
}

namespace {

pricing::Instance make_instance(const Network& net, NodeIndex s, NodeIndex t,
                                const Quantization& q, int Z) {
  pricing::Instance inst;
  inst.num_nodes = net.num_nodes();
  inst.s = s;
  inst.t = t;
  inst.Z = Z;
  inst.node_len = q.node_len;
  for (const auto& n : net.nodes()) inst.node_q.push_back(n.params.q);
  std::vector<std::pair<NodeIndex, NodeIndex>> ends;
  std::vector<double> link_q;
  const auto comp = net.component_of(s);
  for (int l = 0; l < net.num_links(); ++l) {
    const Link& link = net.link(l);
    ends.push_back({link.a, link.b});
    link_q.push_back(comp[link.a] ? link.q : 0.0);
    if (comp[link.a] && link.q > 0.0 && q.link_len[l] <= Z) {
      inst.leaves.push_back({l, link.a, link.b, q.link_len[l], 0.0});
    }
  }
  pricing::fill_bounds(inst, ends, q.link_len, link_q);
  return inst;
}

PflowTree tree_from_labels(const pricing::Table& table, NodeIndex s, NodeIndex t, int label) {
  PflowTree tree;
  std::function<int(NodeIndex, NodeIndex, int)> build = [&](NodeIndex u, NodeIndex v, int li) {
    const NodeIndex m = std::min(u, v);
    const NodeIndex n = std::max(u, v);
    const pricing::Label& L = table.of(m, n)[li];
    const int idx = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back(PflowNode{u, v, L.z, -1, -1, -1, -1});
    if (L.link >= 0) {
      tree.nodes[idx].link = L.link;
      return idx;
    }
    const NodeIndex k = L.k;
    tree.nodes[idx].k = k;
    int left, right;
    if (u == m) {
      left = build(u, k, L.low);
      right = build(k, v, L.high);
    } else {
      left = build(u, k, L.high);
      right = build(k, v, L.low);
    }
    tree.nodes[idx].left = left;
    tree.nodes[idx].right = right;
    return idx;
  };
  tree.root = build(s, t, label);
  return tree;
}

std::string signature(const PflowTree& tree) {
  std::ostringstream out;
  for (const auto& n : tree.nodes) {
    out << n.u << ',' << n.v << ',' << n.level << ',' << n.link << ',' << n.k << ';';
  }
  return out.str();
}

struct Column {
  PflowTree tree;
  RatioMaps ratio;
};

LayeredEflow compose(const Network& net, NodeIndex s, NodeIndex t, int Z, const Quantization& q,
                     const std::vector<Column>& cols, const std::vector<double>& values) {
  LayeredEflow lef = LayeredEflow::zero(net, s, t, Z, q);
  for (std::size_t c = 0; c < cols.size(); ++c) {
    const double v = values[c];
    if (!(v > 0.0)) continue;
    for (auto [l, r] : cols[c].ratio.g) lef.g[l] += v * r;
    for (const auto& [key, r] : cols[c].ratio.f) lef.x[key] += v * r;
  }
  for (double& g : lef.g) g = std::min(g, 1.0);
  double eta = 0.0;
  for (int z = 1; z <= Z; ++z) eta += layered_I(lef, net, lef.sd(), z);
  lef.eta = eta;
  return lef;
}

ForedResult solve_by_columns(const Network& net, NodeIndex s, NodeIndex t, const Quantization& q,
                             int Z, const ForedOptions& opts) {
  ForedResult res;
  res.layered = LayeredEflow::zero(net, s, t, Z, q);
  pricing::Instance inst = make_instance(net, s, t, q, Z);
  std::vector<double> y(net.num_links(), 0.0);
  std::vector<Column> cols;
  std::set<std::string> seen;
  std::vector<double> values;
  constexpr double kThreshold = 1.0 - 1e-9;

  for (int round = 0;; ++round) {
    if (round >= opts.max_rounds) throw lp::NumericalError("fored: column generation did not converge");
    for (auto& leaf : inst.leaves) {
      const Link& link = net.link(leaf.link);
      leaf.cost = y[leaf.link] / (link.q * link.capacity);
    }
    const pricing::Table table = pricing::price(inst, opts.exec);
    const auto& sd_labels = table.of(std::min(s, t), std::max(s, t));
    int added = 0;
    for (int li = 0; li < static_cast<int>(sd_labels.size()); ++li) {
      if (!(sd_labels[li].cost < kThreshold)) continue;
      PflowTree tree = tree_from_labels(table, s, t, li);
      if (!seen.insert(signature(tree)).second) continue;
      cols.push_back(Column{tree, ratios(tree, net)});
      ++added;
    }
    res.stats.rounds = round + 1;
    if (added == 0) break;

    lp::Problem master;
    std::vector<std::vector<lp::Term>> rows(net.num_links());
    for (std::size_t c = 0; c < cols.size(); ++c) {
      auto v = master.add_variable("col" + std::to_string(c), 0.0, lp::kInfinity, 1.0);
      for (auto [l, r] : cols[c].ratio.g) rows[l].push_back({v, r});
    }
    std::vector<int> row_of(net.num_links(), -1);
    for (int l = 0; l < net.num_links(); ++l) {
      if (!rows[l].empty()) row_of[l] = master.add_constraint(std::move(rows[l]), lp::Sense::kLessEqual, 1.0);
    }
    const auto sol = lp::solve(master);
    if (sol.status != lp::Status::kOptimal) throw lp::NumericalError("fored: master LP not optimal");
    res.stats.lp_iterations += sol.iterations;
    values = sol.values;
    for (int l = 0; l < net.num_links(); ++l) {
      y[l] = row_of[l] >= 0 ? std::max(0.0, sol.duals[row_of[l]]) : 0.0;
    }
  }
  res.stats.columns = static_cast<int>(cols.size());
  if (cols.empty()) return res;
  res.layered = compose(net, s, t, Z, q, cols, values);
  res.eta = res.layered.eta;
  return res;
}

ForedResult solve_direct(const Network& net, NodeIndex s, NodeIndex t, const Quantization& q, int Z) {
  ForedResult res;
  res.layered = LayeredEflow::zero(net, s, t, Z, q);
  const pricing::Instance inst = make_instance(net, s, t, q, Z);
  const int n = net.num_nodes();
  const Enode st = make_enode(s, t);
  auto dense = [n](Enode e) { return e.m * n + e.n; };
  auto valid = [&](Enode e, int z) {
    const int d = dense(e);
    return inst.reach[d] < pricing::kUnreachable && inst.completion[d] < pricing::kUnreachable &&
           z >= inst.reach[d] && z + inst.completion[d] <= Z;
  };
  lp::Problem p;
  std::map<ExtKey, std::vector<lp::Term>> balance;
  std::vector<int> g_var(net.num_links(), -1);
  for (const auto& leaf : inst.leaves) {
    const Enode e = make_enode(leaf.a, leaf.b);
    if (!valid(e, leaf.len)) continue;
    const Link& link = net.link(leaf.link);
    auto v = p.add_variable("g_" + link_key(net, leaf.link), 0.0, 1.0);
    g_var[leaf.link] = v.index;
    balance[{e, leaf.len}].push_back({v, link.q * link.capacity});
  }
  std::vector<std::pair<LevelSwapKey, int>> x_var;
  constexpr int kMaxVariables = 40000;
  for (int m = 0; m < n; ++m) {
    for (int o = m + 1; o < n; ++o) {
      const Enode target{m, o};
      for (int z = 1; z <= Z; ++z) {
        if (!valid(target, z)) continue;
        for (NodeIndex k = 0; k < n; ++k) {
          if (k == m || k == o || !(inst.node_q[k] > 0.0)) continue;
          const Enode lo = make_enode(m, k);
          const Enode hi = make_enode(k, o);
          if (lo == st || hi == st) continue;
          for (int z1 = 1; z1 <= z; ++z1) {
            const int z2 = z - z1 - q.node_len[k];
            if (z2 < 1) break;
            if (!valid(lo, z1) || !valid(hi, z2)) continue;
            LevelSwapKey key{target, z, k, z1};
            auto v = p.add_variable("x_" + ext_name(net, target, z) + "_" + net.node(k).id + "_" +
                                    std::to_string(z1));
            if (p.num_variables() > kMaxVariables) {
              throw InvalidArgument("fored: direct LP too large; use column generation");
            }
            x_var.emplace_back(key, v.index);
            balance[{target, z}].push_back({v, inst.node_q[k]});
            balance[{lo, z1}].push_back({v, -1.0});
            balance[{hi, z2}].push_back({v, -1.0});
          }
        }
      }
    }
  }
  for (auto& [key, terms] : balance) {
    if (key.first == st) {
      for (const auto& term : terms) {
        if (term.coef > 0) p.set_objective(term.var, p.variables()[term.var.index].objective + term.coef);
      }
    } else {
      p.add_constraint(std::move(terms), lp::Sense::kEqual, 0.0);
    }
  }
  res.stats.lp_variables = p.num_variables();
  if (p.num_variables() == 0) return res;
  const auto sol = lp::solve(p);
  if (sol.status != lp::Status::kOptimal) throw lp::NumericalError("fored: direct LP not optimal");
  res.stats.lp_iterations = sol.iterations;
  for (int l = 0; l < net.num_links(); ++l) {
    if (g_var[l] >= 0) res.layered.g[l] = std::clamp(sol.values[g_var[l]], 0.0, 1.0);
  }
  for (const auto& [key, var] : x_var) {
    if (sol.values[var] > 0.0) res.layered.x[key] = sol.values[var];
  }
  double eta = 0.0;
  for (int z = 1; z <= Z; ++z) eta += layered_I(res.layered, net, st, z);
  res.layered.eta = eta;
  res.eta = eta;
  return res;
}

}  // namespace

ForedResult solve_fored(const Network& net, NodeIndex s, NodeIndex t, const Quantization& q, int Z,
                        const ForedOptions& opts) {
  if (s == t) throw InvalidArgument("source and destination must differ");
  if (Z < 1) throw InvalidArgument("length bound Z must be at least 1");
  if (static_cast<int>(q.link_len.size()) != net.num_links() ||
      static_cast<int>(q.node_len.size()) != net.num_nodes()) {
    throw InvalidArgument("quantization does not match the network");
  }
  if (!net.component_of(s)[t]) {
    ForedResult r;
    r.layered = LayeredEflow::zero(net, s, t, Z, q);
    return r;
  }
  return opts.method == ForedMethod::kDirectLp ? solve_direct(net, s, t, q, Z)
                                               : solve_by_columns(net, s, t, q, Z, opts);
}

TestOutcome fored_test(const Network& net, NodeIndex s, NodeIndex t, double delta, double z_bound,
                       double eps, const ForedOptions& opts) {
  if (net.num_nodes() < 2) throw InvalidArgument("at least two nodes are required");
  if (!(z_bound > 0.0) || !(eps > 0.0) || !(delta > 0.0)) {
    throw InvalidArgument("length bound, accuracy and EDR bound must be positive");
  }
  const int span = 2 * net.num_nodes() - 3;
  TestOutcome out;
  out.theta = span / (eps * z_bound);
  const double scaled = out.theta * z_bound;
  out.Z = static_cast<int>(std::floor(scaled + 1e-12 * std::max(1.0, scaled))) + span;
  out.result = solve_fored(net, s, t, Quantization::from_theta(net, out.theta), out.Z, opts);
  out.pass = out.result.eta > 0.0 && out.result.eta >= delta * (1.0 - 1e-6);
  return out;
}

std::vector<Pflow> decompose_layered(const LayeredEflow& lef, const Network& net, double tol) {
  const auto rep = validate_layered(net, lef, tol);
  if (!rep.ok) throw DecompositionError("layered eflow fails validation: " + rep.summary());
  detail::PeelGraph pg;
  std::map<ExtKey, int> slot_of;
  auto slot = [&](Enode e, int z) {
    auto [it, fresh] = slot_of.emplace(ExtKey{e, z}, static_cast<int>(pg.ways.size()));
    if (fresh) {
      pg.ways.emplace_back();
      pg.slots.push_back(detail::PeelSlot{e.m, e.n, z});
      pg.slot_names.push_back(ext_name(net, e, z));
    }
    return it->second;
  };
  for (int l = 0; l < net.num_links(); ++l) {
    pg.values.push_back(lef.g[l]);
    if (lef.g[l] <= 0.0) continue;
    const Link& link = net.link(l);
    const int sl = slot(make_enode(link.a, link.b), lef.quant.link_len[l]);
    pg.ways[sl].push_back(detail::PeelWay{true, l, link.q * link.capacity, -1, -1, l, -1});
  }
  for (const auto& [key, v] : lef.x) {
    const int var = static_cast<int>(pg.values.size());
    pg.values.push_back(v);
    const int target = slot(key.target, key.z);
    const int lo = slot(low_child(key), key.z1);
    const int hi = slot(high_child(key), high_level(lef, key));
    pg.ways[target].push_back(
        detail::PeelWay{false, var, net.node(key.k).params.q, lo, hi, -1, key.k});
  }
  for (int z = 1; z <= lef.Z; ++z) {
    auto it = slot_of.find(ExtKey{lef.sd(), z});
    if (it != slot_of.end()) pg.roots.push_back(it->second);
  }
  const auto res = detail::peel(pg, lef.eta);
  std::vector<Pflow> out;
  for (const auto& tr : res.trees) out.push_back(pflow_from_peel(pg, tr, net, lef.s, lef.t));
  return out;
}

double max_supported_length(const LayeredEflow& lef, const Network& net) {
  std::map<ExtKey, double> memo;
  std::function<double(Enode, int)> longest = [&](Enode e, int z) -> double {
    auto it = memo.find({e, z});
    if (it != memo.end()) return it->second;
    double best = -1.0;
    for (LinkIndex l : net.links_between(e.m, e.n)) {
      if (lef.g[l] > 0.0 && lef.quant.link_len[l] == z) best = std::max(best, net.link(l).length());
    }
    for (auto jt = lef.x.lower_bound(LevelSwapKey{e, z, -1, 0});
         jt != lef.x.end() && jt->first.target == e && jt->first.z == z; ++jt) {
      if (!(jt->second > 0.0)) continue;
      const double a = longest(low_child(jt->first), jt->first.z1);
      const double b = longest(high_child(jt->first), high_level(lef, jt->first));
      if (a < 0.0 || b < 0.0) continue;
      best = std::max(best, a + b + net.node(jt->first.k).params.length());
    }
    memo[{e, z}] = best;
    return best;
  };
  double out = 0.0;
  for (int z = 1; z <= lef.Z; ++z) {
    if (layered_I(lef, net, lef.sd(), z) > 0.0) out = std::max(out, longest(lef.sd(), z));
  }
  return out;
}

int count_nonzero(const LayeredEflow& lef) {
  int c = 0;
  for (double v : lef.g) c += v > 0.0;
  for (const auto& [_, v] : lef.x) c += v > 0.0;
  return c;
}

nlohmann::json layered_to_json(const LayeredEflow& lef, const Network& net) {
  nlohmann::json link_len = nlohmann::json::object();
  nlohmann::json g = nlohmann::json::object();
  for (int l = 0; l < net.num_links(); ++l) {
    link_len[link_key(net, l)] = lef.quant.link_len[l];
    if (lef.g[l] > 0.0) g[link_key(net, l)] = lef.g[l];
  }
  nlohmann::json node_len = nlohmann::json::object();
  for (int n = 0; n < net.num_nodes(); ++n) node_len[net.node(n).id] = lef.quant.node_len[n];
  nlohmann::json x = nlohmann::json::object();
  for (const auto& [key, v] : lef.x) {
    if (!(v > 0.0)) continue;
    x[enode_key(net, key.target) + "|" + std::to_string(key.z) + "|" + net.node(key.k).id + "|" +
      std::to_string(key.z1)] = v;
  }
  nlohmann::json sd = nlohmann::json::object();
  for (int z = 1; z <= lef.Z; ++z) {
    const double r = layered_I(lef, net, lef.sd(), z);
    if (r > 0.0) sd[enode_key(net, lef.sd()) + "|" + std::to_string(z)] = r;
  }
  return {{"s", net.node(lef.s).id}, {"t", net.node(lef.t).id}, {"Z", lef.Z},
          {"theta", lef.quant.theta}, {"eta", lef.eta}, {"link_len", link_len},
          {"node_len", node_len}, {"g", g}, {"x", x}, {"sd_levels", sd}};
}

LayeredEflow layered_from_json(const nlohmann::json& doc, const Network& net) {
  try {
    const NodeIndex s = net.node_index(doc.at("s").get<std::string>());
    const NodeIndex t = net.node_index(doc.at("t").get<std::string>());
    std::vector<int> link_len(net.num_links(), 0);
    std::vector<int> node_len(net.num_nodes(), 0);
    for (const auto& [key, v] : doc.at("link_len").items()) link_len[parse_link_key(net, key)] = v.get<int>();
    for (const auto& [key, v] : doc.at("node_len").items()) node_len[net.node_index(key)] = v.get<int>();
    Quantization q = Quantization::from_lengths(net, link_len, node_len);
    q.theta = doc.value("theta", 0.0);
    LayeredEflow lef = LayeredEflow::zero(net, s, t, doc.at("Z").get<int>(), q);
    for (const auto& [key, v] : doc.at("g").items()) lef.g[parse_link_key(net, key)] = v.get<double>();
    for (const auto& [key, v] : doc.at("x").items()) {
      std::vector<std::string> parts;
      std::stringstream in(key);
      std::string part;
      while (std::getline(in, part, '|')) parts.push_back(part);
      if (parts.size() != 5) throw ParseError("bad layered swap key '" + key + "'");
      LevelSwapKey k{make_enode(net.node_index(parts[0]), net.node_index(parts[1])),
                     std::stoi(parts[2]), net.node_index(parts[3]), std::stoi(parts[4])};
      lef.x[k] = v.get<double>();
    }
    lef.eta = doc.at("eta").get<double>();
    return lef;
  } catch (const ParseError&) {
    throw;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("layered eflow: ") + e.what());
  } catch (const std::logic_error& e) {
    throw ParseError(std::string("layered eflow: ") + e.what());
  } catch (const Error& e) {
    throw ParseError(std::string("layered eflow: ") + e.what());
  }
}

}  // namespace fendi
