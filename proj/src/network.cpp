#include "fendi/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <random>

#include "fendi/error.hpp"

namespace fendi {

namespace {

constexpr double kQuarter = 0.25;

void check_probability(double q, const char* what) {
  if (!(q >= 0.0 && q <= 1.0)) {
    throw InvalidArgument(std::string(what) + " must be a probability in [0, 1], got " +
                          std::to_string(q));
  }
}

void check_node_w(double w) {
  if (!(w > 0.0 && w <= 1.0)) {
    throw DegenerateFidelity("degenerate fidelity: node parameter W must lie in (0, 1], got " +
                             std::to_string(w));
  }
}

// Uniform double in [0, 1) from 53 random bits; independent of the standard
// library's distribution implementation.
double unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double uniform(std::mt19937_64& rng, Range r) { return r.lo + (r.hi - r.lo) * unit(rng); }

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<int>(rng() % span);
}

}  // namespace

double werner_param(double fidelity) {
  if (!(fidelity > kQuarter) || fidelity > 1.0) {
    throw DegenerateFidelity("degenerate fidelity: F must lie in (1/4, 1], got " +
                             std::to_string(fidelity));
  }
  return (4.0 * fidelity - 1.0) / 3.0;
}

double swap_fidelity(double f1, double f2, double node_w) {
  if (f1 < kQuarter || f1 > 1.0 || f2 < kQuarter || f2 > 1.0) {
    throw InvalidArgument("swap_fidelity: fidelities must lie in [1/4, 1]");
  }
  check_node_w(node_w);
  const double w1 = (4.0 * f1 - 1.0) / 3.0;
  const double w2 = (4.0 * f2 - 1.0) / 3.0;
  return 0.25 * (1.0 + 3.0 * w1 * w2 * node_w);
}

double length_of(double w) {
  if (!(w > 0.0) || w > 1.0) {
    throw DegenerateFidelity("degenerate fidelity: W must lie in (0, 1], got " +
                             std::to_string(w));
  }
  return -std::log(w);
}

double fidelity_from_length(double length) {
  if (length < 0.0) throw InvalidArgument("length must be nonnegative");
  return 0.25 * (1.0 + 3.0 * std::exp(-length));
}

double length_bound(double fidelity_bound) { return length_of(werner_param(fidelity_bound)); }

NodeParams NodeParams::from_operations(double q, double bsm_accuracy, double one_qubit,
                                       double two_qubit) {
  const double w = one_qubit * two_qubit * (4.0 * bsm_accuracy * bsm_accuracy - 1.0) / 3.0;
  check_node_w(w);
  return NodeParams{q, w};
}

bool operator==(const NodeParams& x, const NodeParams& y) { return x.q == y.q && x.w == y.w; }

bool operator==(const Link& x, const Link& y) {
  return x.a == y.a && x.b == y.b && x.capacity == y.capacity && x.q == y.q &&
         x.fidelity == y.fidelity;
}

bool operator==(const Network& x, const Network& y) {
  if (x.links_ != y.links_ || x.nodes_.size() != y.nodes_.size()) return false;
  for (std::size_t i = 0; i < x.nodes_.size(); ++i) {
    if (x.nodes_[i].id != y.nodes_[i].id || !(x.nodes_[i].params == y.nodes_[i].params)) {
      return false;
    }
  }
  return true;
}

NodeIndex Network::add_node(std::string id, NodeParams params) {
  if (id.empty()) throw InvalidArgument("node id must be nonempty");
  if (by_id_.count(id)) throw InvalidArgument("duplicate node id '" + id + "'");
  check_probability(params.q, "node q");
  check_node_w(params.w);
  const auto index = static_cast<NodeIndex>(nodes_.size());
  by_id_.emplace(id, index);
  nodes_.push_back(Node{std::move(id), params});
  adjacency_.emplace_back();
  return index;
}

LinkIndex Network::add_link(NodeIndex a, NodeIndex b, int capacity, double q, double fidelity) {
  if (a < 0 || b < 0 || a >= num_nodes() || b >= num_nodes()) {
    throw InvalidArgument("link endpoint out of range");
  }
  if (a == b) throw InvalidArgument("link endpoints must be distinct");
  if (capacity < 1) throw InvalidArgument("link capacity must be a positive integer");
  check_probability(q, "link q");
  werner_param(fidelity);
  const auto index = static_cast<LinkIndex>(links_.size());
  links_.push_back(Link{a, b, capacity, q, fidelity});
  adjacency_[a].push_back(index);
  adjacency_[b].push_back(index);
  return index;
}

LinkIndex Network::add_link(const std::string& a, const std::string& b, int capacity, double q,
                            double fidelity) {
  return add_link(node_index(a), node_index(b), capacity, q, fidelity);
}

std::optional<NodeIndex> Network::find_node(const std::string& id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

NodeIndex Network::node_index(const std::string& id) const {
  auto found = find_node(id);
  if (!found) throw InvalidArgument("unknown node id '" + id + "'");
  return *found;
}

std::vector<LinkIndex> Network::links_between(NodeIndex a, NodeIndex b) const {
  std::vector<LinkIndex> out;
  for (LinkIndex l : adjacency_.at(a)) {
    if (links_[l].other(a) == b) out.push_back(l);
  }
  return out;
}

std::vector<bool> Network::component_of(NodeIndex n) const {
  std::vector<bool> seen(nodes_.size(), false);
  std::vector<NodeIndex> stack{n};
  seen.at(n) = true;
  while (!stack.empty()) {
    NodeIndex u = stack.back();
    stack.pop_back();
    for (LinkIndex l : adjacency_[u]) {
      NodeIndex v = links_[l].other(u);
      if (!seen[v]) {
        seen[v] = true;
        stack.push_back(v);
      }
    }
  }
  return seen;
}

bool Network::connected() const {
  if (nodes_.empty()) return true;
  auto seen = component_of(0);
  return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
}

Network Network::pruned(double threshold, NodeIndex keep_a, NodeIndex keep_b) const {
  Network out;
  for (const auto& n : nodes_) out.add_node(n.id, n.params);
  for (const auto& l : links_) {
    if (l.length() > threshold) continue;
    auto removed = [&](NodeIndex n) {
      return n != keep_a && n != keep_b && nodes_[n].params.length() > threshold;
    };
    if (removed(l.a) || removed(l.b)) continue;
    out.add_link(l.a, l.b, l.capacity, l.q, l.fidelity);
  }
  return out;
}

Network Network::scaled_capacities(int factor) const {
  Network out = *this;
  for (auto& l : out.links_) l.capacity *= factor;
  return out;
}

Network Network::without_link(LinkIndex skip) const {
  Network out;
  for (const auto& n : nodes_) out.add_node(n.id, n.params);
  for (LinkIndex l = 0; l < num_links(); ++l) {
    if (l == skip) continue;
    const auto& k = links_[l];
    out.add_link(k.a, k.b, k.capacity, k.q, k.fidelity);
  }
  return out;
}

double path_fidelity(std::span<const Link> links, std::span<const NodeParams> swap_nodes) {
  if (links.empty()) throw InvalidArgument("path_fidelity: empty link list");
  double product = 1.0;
  for (const auto& l : links) product *= l.w();
  for (const auto& n : swap_nodes) product *= n.w;
  return 0.25 * (1.0 + 3.0 * product);
}

double path_success_probability(std::span<const Link> links,
                                std::span<const NodeParams> swap_nodes) {
  double p = 1.0;
  for (const auto& l : links) p *= l.q;
  for (const auto& n : swap_nodes) p *= n.q;
  return p;
}

double walk_length(const Network& net, const Walk& walk) {
  double total = 0.0;
  for (LinkIndex l : walk.links) total += net.link(l).length();
  for (std::size_t i = 1; i + 1 < walk.nodes.size(); ++i) {
    total += net.node(walk.nodes[i]).params.length();
  }
  return total;
}

double walk_fidelity(const Network& net, const Walk& walk) {
  std::vector<Link> links;
  std::vector<NodeParams> swaps;
  for (LinkIndex l : walk.links) links.push_back(net.link(l));
  for (std::size_t i = 1; i + 1 < walk.nodes.size(); ++i) {
    swaps.push_back(net.node(walk.nodes[i]).params);
  }
  return path_fidelity(links, swaps);
}

double walk_success_probability(const Network& net, const Walk& walk) {
  std::vector<Link> links;
  std::vector<NodeParams> swaps;
  for (LinkIndex l : walk.links) links.push_back(net.link(l));
  for (std::size_t i = 1; i + 1 < walk.nodes.size(); ++i) {
    swaps.push_back(net.node(walk.nodes[i]).params);
  }
  return path_success_probability(links, swaps);
}

int walk_bottleneck_capacity(const Network& net, const Walk& walk) {
  int c = std::numeric_limits<int>::max();
  for (LinkIndex l : walk.links) c = std::min(c, net.link(l).capacity);
  return c;
}

Network waxman_generate(const WaxmanOptions& opts) {
  if (opts.nodes < 2) throw InvalidArgument("waxman_generate: need at least 2 nodes");
  if (!(opts.alpha > 0.0 && opts.alpha <= 1.0) || !(opts.beta > 0.0 && opts.beta <= 1.0)) {
    throw InvalidArgument("waxman_generate: alpha and beta must lie in (0, 1]");
  }
  if (opts.capacity_lo < 1 || opts.capacity_hi < opts.capacity_lo) {
    throw InvalidArgument("waxman_generate: invalid capacity range");
  }
  auto check_range = [](Range r, const char* what) {
    if (r.hi < r.lo) throw InvalidArgument(std::string("waxman_generate: invalid ") + what);
  };
  check_range(opts.node_q, "node q range");
  check_range(opts.node_w, "node w range");
  check_range(opts.link_q, "link q range");
  check_range(opts.link_fidelity, "link fidelity range");

  const int n = opts.nodes;
  std::mt19937_64 rng(opts.seed);
  std::vector<double> xs(n), ys(n);
  std::vector<std::pair<int, int>> edges;

  auto dist = [&](int u, int v) { return std::hypot(xs[u] - xs[v], ys[u] - ys[v]); };

  auto components = [&]() {
    std::vector<int> comp(n, -1);
    std::vector<std::vector<int>> adj(n);
    for (auto [u, v] : edges) {
      adj[u].push_back(v);
      adj[v].push_back(u);
    }
    int count = 0;
    for (int s = 0; s < n; ++s) {
      if (comp[s] >= 0) continue;
      std::vector<int> stack{s};
      comp[s] = count;
      while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (int v : adj[u]) {
          if (comp[v] < 0) {
            comp[v] = count;
            stack.push_back(v);
          }
        }
      }
      ++count;
    }
    return std::pair{comp, count};
  };

  for (int attempt = 0; attempt < std::max(1, opts.max_attempts); ++attempt) {
    for (int i = 0; i < n; ++i) {
      xs[i] = unit(rng);
      ys[i] = unit(rng);
    }
    double max_d = 0.0;
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v) max_d = std::max(max_d, dist(u, v));
    if (max_d <= 0.0) max_d = 1.0;
    edges.clear();
    for (int u = 0; u < n; ++u) {
      for (int v = u + 1; v < n; ++v) {
        double p = opts.beta * std::exp(-dist(u, v) / (opts.alpha * max_d));
        if (unit(rng) < p) edges.emplace_back(u, v);
      }
    }
    if (components().second == 1) break;
  }

  // Stitch remaining components: repeatedly join the closest pair of nodes
  // lying in different components.
  for (auto [comp, count] = components(); count > 1; std::tie(comp, count) = components()) {
    double best = std::numeric_limits<double>::infinity();
    std::pair<int, int> pick{-1, -1};
    for (int u = 0; u < n; ++u) {
      for (int v = u + 1; v < n; ++v) {
        if (comp[u] != comp[v] && dist(u, v) < best) {
          best = dist(u, v);
          pick = {u, v};
        }
      }
    }
    edges.push_back(pick);
  }
  std::sort(edges.begin(), edges.end());

  Network net;
  for (int i = 0; i < n; ++i) {
    NodeParams p{uniform(rng, opts.node_q), uniform(rng, opts.node_w)};
    net.add_node(std::to_string(i), p);
  }
  for (auto [u, v] : edges) {
    int c = uniform_int(rng, opts.capacity_lo, opts.capacity_hi);
    double q = uniform(rng, opts.link_q);
    double f = uniform(rng, opts.link_fidelity);
    net.add_link(u, v, c, q, f);
  }
  return net;
}

}  // namespace fendi
