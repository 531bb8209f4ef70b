#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace fendi {

using NodeIndex = int;
using LinkIndex = int;

// ---------------------------------------------------------------------------
// Fidelity algebra. Werner states are characterised by their fidelity F; the
// fidelity parameter W = (4F - 1) / 3 multiplies along a swapping chain, and
// the length -ln W adds along it.
// ---------------------------------------------------------------------------

// W = (4F - 1) / 3. Throws DegenerateFidelity for F <= 1/4.
double werner_param(double fidelity);

// Fidelity after swapping two Werner ebits at a node with parameter `node_w`.
double swap_fidelity(double f1, double f2, double node_w);

double length_of(double w);
double fidelity_from_length(double length);
// Inverse of fidelity_from_length. Throws DegenerateFidelity for bound <= 1/4.
double length_bound(double fidelity_bound);

struct NodeParams {
  double q = 1.0;  // swap success probability per attempt
  double w = 1.0;  // fidelity parameter of the swap operation, in (0, 1]

  double length() const { return length_of(w); }

  // W_n = o1 * o2 * (4 alpha^2 - 1) / 3.
  static NodeParams from_operations(double q, double bsm_accuracy, double one_qubit,
                                    double two_qubit);
};

struct Link {
  NodeIndex a = 0;
  NodeIndex b = 0;
  int capacity = 1;       // channels per time slot
  double q = 1.0;         // per-channel generation success probability
  double fidelity = 1.0;  // elementary ebit fidelity, in (1/4, 1]

  double w() const { return werner_param(fidelity); }
  double length() const { return length_of(w()); }
  NodeIndex other(NodeIndex n) const { return n == a ? b : a; }
};

struct Node {
  std::string id;
  NodeParams params;
};

// Undirected repeater network. Node and link indices are dense and stable.
// Parallel links between the same pair are permitted (each is a separate
// physical channel group); self-loops are not.
class Network {
 public:
  NodeIndex add_node(std::string id, NodeParams params = {});
  LinkIndex add_link(NodeIndex a, NodeIndex b, int capacity, double q, double fidelity);
  LinkIndex add_link(const std::string& a, const std::string& b, int capacity, double q,
                     double fidelity);

  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  int num_links() const { return static_cast<int>(links_.size()); }
  const Node& node(NodeIndex n) const { return nodes_.at(n); }
  const Link& link(LinkIndex l) const { return links_.at(l); }
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Link>& links() const { return links_; }
  const std::vector<LinkIndex>& incident(NodeIndex n) const { return adjacency_.at(n); }

  std::optional<NodeIndex> find_node(const std::string& id) const;
  // Throws InvalidArgument for unknown ids.
  NodeIndex node_index(const std::string& id) const;
  std::vector<LinkIndex> links_between(NodeIndex a, NodeIndex b) const;

  bool connected() const;
  // Nodes reachable from `n` over links, including `n`.
  std::vector<bool> component_of(NodeIndex n) const;

  // Copy in which every link and every node (other than `keep_a`/`keep_b`)
  // whose length exceeds `threshold` is removed. Removed nodes stay in the
  // index space but lose all incident links, so indices are preserved.
  Network pruned(double threshold, NodeIndex keep_a, NodeIndex keep_b) const;

  // Copy with every capacity multiplied by `factor`.
  Network scaled_capacities(int factor) const;
  Network without_link(LinkIndex l) const;

  friend bool operator==(const Network& x, const Network& y);

 private:
  std::vector<Node> nodes_;
  std::vector<Link> links_;
  std::vector<std::vector<LinkIndex>> adjacency_;
  std::unordered_map<std::string, NodeIndex> by_id_;
};

bool operator==(const NodeParams& x, const NodeParams& y);
bool operator==(const Link& x, const Link& y);

// End-to-end fidelity of an ebit swapped along `links` at `swap_nodes`
// (multisets; order does not matter). Throws InvalidArgument on empty links.
double path_fidelity(std::span<const Link> links, std::span<const NodeParams> swap_nodes);
double path_success_probability(std::span<const Link> links,
                                std::span<const NodeParams> swap_nodes);

// A walk through the network: consecutive links plus the nodes visited.
struct Walk {
  std::vector<NodeIndex> nodes;  // n0, n1, ..., nX+1
  std::vector<LinkIndex> links;  // links[i] joins nodes[i] and nodes[i+1]
};

double walk_length(const Network& net, const Walk& walk);
double walk_fidelity(const Network& net, const Walk& walk);
double walk_success_probability(const Network& net, const Walk& walk);
int walk_bottleneck_capacity(const Network& net, const Walk& walk);

// ---------------------------------------------------------------------------
// Waxman topology generation.
// ---------------------------------------------------------------------------

struct Range {
  double lo;
  double hi;
};

struct WaxmanOptions {
  int nodes = 15;
  double alpha = 0.8;
  double beta = 0.8;
  std::uint64_t seed = 1;
  Range node_q{0.5, 0.5};
  Range node_w{1.0, 1.0};
  Range link_q{0.9, 0.9};
  Range link_fidelity{0.7, 0.95};
  int capacity_lo = 26;
  int capacity_hi = 35;
  int max_attempts = 32;
};

// Nodes scattered uniformly in the unit square; pair (u, v) is joined with
// probability beta * exp(-d(u, v) / (alpha * L)), L the largest pairwise
// distance. If no connected sample appears within `max_attempts`, the last
// sample's components are stitched together by their closest node pairs.
Network waxman_generate(const WaxmanOptions& opts);

}  // namespace fendi
