#include "fendi/pflow.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

#include "fendi/detail/plain_peel.hpp"
#include "fendi/error.hpp"
#include "fendi/lp.hpp"

namespace fendi {

namespace {

void in_order(const PflowTree& tree, int i, std::vector<LinkIndex>& links,
              std::vector<NodeIndex>& swaps) {
  const PflowNode& n = tree.nodes[i];
  if (n.is_gen()) {
    links.push_back(n.link);
    return;
  }
  in_order(tree, n.left, links, swaps);
  swaps.push_back(n.k);
  in_order(tree, n.right, links, swaps);
}

void collect_ratios(const PflowTree& tree, const Network& net, int i, double psi, RatioMaps& out) {
  const PflowNode& n = tree.nodes[i];
  if (n.is_gen()) {
    const Link& link = net.link(n.link);
    const double rate = link.q * link.capacity;
    if (!(rate > 0.0)) throw InvalidArgument("unreachable rate: link with zero success probability");
    out.g[n.link] += psi / rate;
    return;
  }
  const double q = net.node(n.k).params.q;
  if (!(q > 0.0)) throw InvalidArgument("unreachable rate: swap node with zero success probability");
  const double r = psi / q;
  const int low_child = n.u < n.v ? n.left : n.right;
  out.f[LevelSwapKey{n.enode(), n.level, n.k, tree.nodes[low_child].level}] += r;
  collect_ratios(tree, net, n.left, r, out);
  collect_ratios(tree, net, n.right, r, out);
}

}  // namespace

std::vector<LinkIndex> PflowTree::leaf_links() const {
  std::vector<LinkIndex> links;
  std::vector<NodeIndex> swaps;
  if (!nodes.empty()) in_order(*this, root, links, swaps);
  return links;
}

std::vector<NodeIndex> PflowTree::swap_nodes() const {
  std::vector<LinkIndex> links;
  std::vector<NodeIndex> swaps;
  if (!nodes.empty()) in_order(*this, root, links, swaps);
  return swaps;
}

Walk PflowTree::walk() const {
  Walk w;
  if (nodes.empty()) return w;
  std::vector<NodeIndex> swaps;
  in_order(*this, root, w.links, swaps);
  w.nodes.push_back(nodes[root].u);
  w.nodes.insert(w.nodes.end(), swaps.begin(), swaps.end());
  w.nodes.push_back(nodes[root].v);
  return w;
}

RatioMaps ratios(const PflowTree& tree, const Network& net) {
  RatioMaps out;
  if (!tree.nodes.empty()) collect_ratios(tree, net, tree.root, 1.0, out);
  return out;
}

double tree_length(const PflowTree& tree, const Network& net) {
  double len = 0.0;
  for (const auto& n : tree.nodes) {
    len += n.is_gen() ? net.link(n.link).length() : net.node(n.k).params.length();
  }
  return len;
}

double pflow_fidelity(const Pflow& p, const Network& net) {
  std::vector<Link> links;
  for (LinkIndex l : p.tree.leaf_links()) links.push_back(net.link(l));
  std::vector<NodeParams> swaps;
  for (NodeIndex k : p.tree.swap_nodes()) swaps.push_back(net.node(k).params);
  return path_fidelity(links, swaps);
}

PflowTree left_deep_tree(const Network& net, const Walk& walk) {
  if (walk.links.empty() || walk.nodes.size() != walk.links.size() + 1) {
    throw InvalidArgument("walk must have one more node than links");
  }
  PflowTree tree;
  int cur = -1;
  for (std::size_t i = 0; i < walk.links.size(); ++i) {
    const Link& link = net.link(walk.links[i]);
    const NodeIndex a = walk.nodes[i];
    const NodeIndex b = walk.nodes[i + 1];
    if (!((link.a == a && link.b == b) || (link.a == b && link.b == a))) {
      throw InvalidArgument("walk link does not join consecutive walk nodes");
    }
    tree.nodes.push_back(PflowNode{a, b, 0, walk.links[i], -1, -1, -1});
    const int leaf = static_cast<int>(tree.nodes.size()) - 1;
    if (cur < 0) {
      cur = leaf;
      continue;
    }
    tree.nodes.push_back(PflowNode{walk.nodes[0], b, 0, -1, a, cur, leaf});
    cur = static_cast<int>(tree.nodes.size()) - 1;
  }
  tree.root = cur;
  return tree;
}

Pflow make_pflow(const PflowTree& tree, const Network& net, double value) {
  Pflow p;
  p.tree = tree;
  p.walk = tree.walk();
  p.ratio = ratios(tree, net);
  p.value = value;
  p.length = tree_length(tree, net);
  p.fidelity = fidelity_from_length(p.length);
  p.quantized_length = tree.nodes.empty() ? 0 : tree.nodes[tree.root].level;
  return p;
}

Pflow pflow_from_peel(const detail::PeelGraph& g, const detail::PeelTree& t, const Network& net,
                      NodeIndex s, NodeIndex t_node) {
  PflowTree tree;
  std::function<int(int, NodeIndex, NodeIndex)> build = [&](int i, NodeIndex u, NodeIndex v) {
    const detail::PeelNode& pn = t.nodes[i];
    const detail::PeelWay& way = g.ways[pn.slot][pn.way];
    const detail::PeelSlot& slot = g.slots[pn.slot];
    const int idx = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back(PflowNode{u, v, slot.z, -1, -1, -1, -1});
    if (way.gen) {
      tree.nodes[idx].link = way.link;
      return idx;
    }
    const NodeIndex k = way.k;
    tree.nodes[idx].k = k;
    int left, right;
    if (u == slot.m) {
      left = build(pn.low, u, k);
      right = build(pn.high, k, v);
    } else {
      left = build(pn.high, u, k);
      right = build(pn.low, k, v);
    }
    tree.nodes[idx].left = left;
    tree.nodes[idx].right = right;
    return idx;
  };
  tree.root = build(0, s, t_node);
  return make_pflow(tree, net, t.value);
}

std::vector<Pflow> decompose(const Eflow& ef, const Network& net, double tol) {
  const auto rep = validate_eflow(net, ef, tol);
  if (!rep.ok) throw DecompositionError("eflow fails validation: " + rep.summary());
  auto pp = detail::build_plain_peel(ef, net);
  const auto res = detail::peel(pp.graph, ef.eta);
  std::vector<Pflow> out;
  out.reserve(res.trees.size());
  for (const auto& tr : res.trees) out.push_back(pflow_from_peel(pp.graph, tr, net, ef.s, ef.t));
  return out;
}

Eflow recompose(const std::vector<Pflow>& pflows, const Network& net, NodeIndex s, NodeIndex t) {
  Eflow ef = Eflow::zero(net, s, t);
  for (const auto& p : pflows) {
    for (auto [l, r] : p.ratio.g) ef.g[l] += p.value * r;
    for (const auto& [key, r] : p.ratio.f) ef.x[SwapKey{key.target, key.k}] += p.value * r;
  }
  ef.eta = compute_I(ef, net, ef.sd());
  return ef;
}

std::vector<Walk> enumerate_simple_paths(const Network& net, NodeIndex s, NodeIndex t) {
  std::vector<Walk> out;
  std::vector<char> on_path(net.num_nodes(), 0);
  Walk cur;
  cur.nodes.push_back(s);
  on_path[s] = 1;
  std::function<void(NodeIndex)> dfs = [&](NodeIndex u) {
    if (u == t) {
      out.push_back(cur);
      return;
    }
    for (LinkIndex l : net.incident(u)) {
      const NodeIndex v = net.link(l).other(u);
      if (on_path[v]) continue;
      on_path[v] = 1;
      cur.nodes.push_back(v);
      cur.links.push_back(l);
      dfs(v);
      cur.nodes.pop_back();
      cur.links.pop_back();
      on_path[v] = 0;
    }
  };
  if (s != t) dfs(s);
  return out;
}

namespace {

// For links i..j of a path, the per-leaf swap multipliers of every binary
// tree shape (deduplicated).
using Shape = std::vector<double>;

const std::vector<Shape>& shapes_of(int i, int j, const std::vector<double>& inv_q,
                                    std::map<std::pair<int, int>, std::vector<Shape>>& memo) {
  auto it = memo.find({i, j});
  if (it != memo.end()) return it->second;
  std::set<Shape> acc;
  if (i == j) {
    acc.insert(Shape{1.0});
  } else {
    for (int split = i; split < j; ++split) {
      const double f = inv_q[split];  // node between link split and split + 1
      const auto left = shapes_of(i, split, inv_q, memo);
      const auto right = shapes_of(split + 1, j, inv_q, memo);
      for (const auto& a : left) {
        for (const auto& b : right) {
          Shape s;
          s.reserve(a.size() + b.size());
          for (double v : a) s.push_back(v * f);
          for (double v : b) s.push_back(v * f);
          acc.insert(std::move(s));
        }
      }
    }
  }
  return memo[{i, j}] = std::vector<Shape>(acc.begin(), acc.end());
}

}  // namespace

PathLpResult solve_path_lp(const Network& net, NodeIndex s, NodeIndex t,
                           const std::vector<Walk>& paths) {
  PathLpResult res;
  res.values.assign(paths.size(), 0.0);
  if (paths.empty()) return res;
  lp::Problem p;
  std::vector<std::vector<lp::Term>> per_link(net.num_links());
  std::vector<int> owner;
  for (std::size_t pi = 0; pi < paths.size(); ++pi) {
    const Walk& w = paths[pi];
    if (w.nodes.empty() || w.nodes.front() != s || w.nodes.back() != t) {
      throw InvalidArgument("path does not run from source to destination");
    }
    left_deep_tree(net, w);  // validates link/node consistency
    bool usable = true;
    std::vector<double> inv_q;
    for (std::size_t i = 1; i + 1 < w.nodes.size(); ++i) {
      const double q = net.node(w.nodes[i]).params.q;
      usable = usable && q > 0.0;
      inv_q.push_back(q > 0.0 ? 1.0 / q : 0.0);
    }
    for (LinkIndex l : w.links) usable = usable && net.link(l).q > 0.0;
    if (!usable) continue;
    std::map<std::pair<int, int>, std::vector<Shape>> memo;
    const int nl = static_cast<int>(w.links.size());
    for (const Shape& shape : shapes_of(0, nl - 1, inv_q, memo)) {
      auto v = p.add_variable("p" + std::to_string(pi) + "_" + std::to_string(owner.size()), 0.0,
                              lp::kInfinity, 1.0);
      owner.push_back(static_cast<int>(pi));
      std::map<LinkIndex, double> load;
      for (int j = 0; j < nl; ++j) {
        const Link& link = net.link(w.links[j]);
        load[w.links[j]] += shape[j] / (link.q * link.capacity);
      }
      for (auto [l, r] : load) per_link[l].push_back({v, r});
    }
  }
  for (int l = 0; l < net.num_links(); ++l) {
    if (!per_link[l].empty()) {
      p.add_constraint(std::move(per_link[l]), lp::Sense::kLessEqual, 1.0, "link_" + link_key(net, l));
    }
  }
  if (p.num_variables() == 0) return res;
  const auto sol = lp::solve(p);
  if (sol.status != lp::Status::kOptimal) throw lp::NumericalError("path LP did not reach optimality");
  res.eta = sol.objective;
  for (std::size_t c = 0; c < owner.size(); ++c) res.values[owner[c]] += sol.values[c];
  return res;
}

OfredCertificate brute_force_ofred(const Network& net, NodeIndex s, NodeIndex t, double delta,
                                   int max_nodes) {
  if (net.num_nodes() > max_nodes) {
    throw InvalidArgument("brute force limited to " + std::to_string(max_nodes) + " nodes");
  }
  const auto paths = enumerate_simple_paths(net, s, t);
  std::vector<double> lengths;
  for (const auto& w : paths) lengths.push_back(walk_length(net, w));
  std::vector<double> distinct = lengths;
  std::sort(distinct.begin(), distinct.end());
  std::vector<double> levels;
  for (double d : distinct) {
    if (!levels.empty() && d <= levels.back() * (1 + 1e-12) + 1e-15) {
      levels.back() = d;
    } else {
      levels.push_back(d);
    }
  }
  auto attempt = [&](double threshold) {
    std::vector<Walk> sub;
    for (std::size_t i = 0; i < paths.size(); ++i) {
      if (lengths[i] <= threshold) sub.push_back(paths[i]);
    }
    auto r = solve_path_lp(net, s, t, sub);
    return std::make_pair(r, sub);
  };
  const double need = delta * (1.0 - 1e-6);
  if (levels.empty()) throw EdrUnachievable("EDR bound unachievable: no path", 0.0);
  auto [full, full_paths] = attempt(levels.back());
  if (full.eta < need) {
    throw EdrUnachievable("EDR bound unachievable: maximum expected EDR is " +
                              std::to_string(full.eta),
                          full.eta);
  }
  std::size_t lo = 0, hi = levels.size() - 1;  // answer in [lo, hi]
  OfredCertificate best{levels[hi], full.eta, full_paths, full.values};
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    auto [r, sub] = attempt(levels[mid]);
    if (r.eta >= need) {
      hi = mid;
      best = OfredCertificate{levels[mid], r.eta, sub, r.values};
    } else {
      lo = mid + 1;
    }
  }
  return best;
}

nlohmann::json pflows_to_json(const std::vector<Pflow>& pflows, const Network& net) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& p : pflows) {
    nlohmann::json walk = nlohmann::json::array();
    for (NodeIndex n : p.walk.nodes) walk.push_back(net.node(n).id);
    nlohmann::json links = nlohmann::json::array();
    for (LinkIndex l : p.walk.links) links.push_back(link_key(net, l));
    nlohmann::json rec{{"walk", walk}, {"links", links}, {"value", p.value},
                       {"fidelity", p.fidelity}, {"length", p.length}};
    if (p.quantized_length > 0) rec["quantized_length"] = p.quantized_length;
    arr.push_back(std::move(rec));
  }
  return arr;
}

}  // namespace fendi
