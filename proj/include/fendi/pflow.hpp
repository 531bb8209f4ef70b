#pragma once

#include <compare>
#include <map>
#include <vector>

#include <json.hpp>

#include "fendi/detail/peel.hpp"
#include "fendi/eflow.hpp"
#include "fendi/network.hpp"

namespace fendi {

// Swap variable with levels: target {m,n} at level z, swapped at k with the
// {min(m,n), k} child at level z1. Plain eflows use z = z1 = 0.
struct LevelSwapKey {
  Enode target;
  int z = 0;
  NodeIndex k = 0;
  int z1 = 0;
  auto operator<=>(const LevelSwapKey&) const = default;
};

// One occurrence of an enode in a swap tree, oriented from u to v so that
// leaves read left to right trace the walk.
struct PflowNode {
  NodeIndex u = 0;
  NodeIndex v = 0;
  int level = 0;
  LinkIndex link = -1;  // set for generation leaves
  NodeIndex k = -1;     // set for swaps
  int left = -1;        // child covering u..k
  int right = -1;       // child covering k..v

  bool is_gen() const { return link >= 0; }
  Enode enode() const { return make_enode(u, v); }
};

struct PflowTree {
  std::vector<PflowNode> nodes;
  int root = 0;

  // Generation leaves from left to right.
  std::vector<LinkIndex> leaf_links() const;
  std::vector<NodeIndex> swap_nodes() const;
  Walk walk() const;
};

struct RatioMaps {
  std::map<LinkIndex, double> g;
  std::map<LevelSwapKey, double> f;
};

// Per delivered end-to-end ebit: ebits generated per channel of each link
// and swaps consumed per swap variable. Throws InvalidArgument ("unreachable
// rate") if a probability on the tree is zero.
RatioMaps ratios(const PflowTree& tree, const Network& net);

struct Pflow {
  PflowTree tree;
  Walk walk;
  RatioMaps ratio;
  double value = 0.0;
  double fidelity = 1.0;
  double length = 0.0;
  int quantized_length = 0;  // root level; 0 for plain eflows
};

double pflow_fidelity(const Pflow& p, const Network& net);
double tree_length(const PflowTree& tree, const Network& net);

// Left-deep swap tree over a walk.
PflowTree left_deep_tree(const Network& net, const Walk& walk);

// Builds a pflow from a tree with `value`, filling walk, ratios, fidelity and
// length.
Pflow make_pflow(const PflowTree& tree, const Network& net, double value);

// Converts an engine tree; `s` orients the root.
Pflow pflow_from_peel(const detail::PeelGraph& g, const detail::PeelTree& t, const Network& net,
                      NodeIndex s, NodeIndex t_node);

// Throws DecompositionError if the eflow does not validate at `tol`.
std::vector<Pflow> decompose(const Eflow& ef, const Network& net, double tol = 1e-6);

// Sum of value * ratios over the pflows (levels ignored).
Eflow recompose(const std::vector<Pflow>& pflows, const Network& net, NodeIndex s, NodeIndex t);

// Simple s-t paths, each parallel link giving a separate path.
std::vector<Walk> enumerate_simple_paths(const Network& net, NodeIndex s, NodeIndex t);

struct PathLpResult {
  double eta = 0.0;
  std::vector<double> values;  // per input path, summed over swap-tree shapes
};
// Path-based LP: every swap-tree shape of every path is a column; each link
// carries at most one unit of generation ratio pressure.
PathLpResult solve_path_lp(const Network& net, NodeIndex s, NodeIndex t,
                           const std::vector<Walk>& paths);

struct OfredCertificate {
  double z_star = 0.0;
  double eta = 0.0;
  std::vector<Walk> paths;
  std::vector<double> values;
};
// Exhaustive reference for small networks: smallest simple-path length
// threshold at which the path LP reaches delta. Throws InvalidArgument above
// `max_nodes` nodes and EdrUnachievable when no threshold suffices.
OfredCertificate brute_force_ofred(const Network& net, NodeIndex s, NodeIndex t, double delta,
                                   int max_nodes = 8);

nlohmann::json pflows_to_json(const std::vector<Pflow>& pflows, const Network& net);

}  // namespace fendi
