#pragma once

#include <string>
#include <vector>

namespace fendi::detail {

// Generic flow-peeling engine shared by plain and level-layered eflows.
// Vertices ("slots") are extended enodes; each slot lists its generation ways
// in tie-break order. The engine repeatedly extracts a swap tree rooted at a
// root slot, assigns it the bottleneck rate and subtracts it.

struct PeelWay {
  bool gen = false;
  int var = -1;         // index into PeelGraph::values
  double factor = 1.0;  // q_l * c_l for generation, q_k for a swap
  int low = -1;         // swap only: slot of the child {min(m,n), k}
  int high = -1;        // swap only: slot of the child {k, max(m,n)}
  int link = -1;        // generation only
  int k = -1;           // swap only
};

struct PeelSlot {
  int m = 0;  // m < n
  int n = 0;
  int z = 0;  // level; 0 for plain eflows
};

struct PeelGraph {
  std::vector<double> values;
  std::vector<std::vector<PeelWay>> ways;  // per slot
  std::vector<int> roots;                  // peeled in order, each to exhaustion
  std::vector<PeelSlot> slots;             // per slot
  std::vector<std::string> slot_names;     // for error messages; may be empty
};

struct PeelNode {
  int slot = -1;
  int way = -1;  // index into ways[slot]
  int low = -1;  // child tree-node indices (swap only)
  int high = -1;
  double psi = 1.0;
};

struct PeelTree {
  std::vector<PeelNode> nodes;  // nodes[0] is the root
  int root = -1;                // slot of nodes[0]
  std::vector<std::pair<int, double>> ratios;  // (var, ratio), one per distinct var
  double value = 0.0;
};

struct PeelResult {
  std::vector<PeelTree> trees;
  std::vector<double> consumed;  // per var: sum of value * ratio over trees
  double total = 0.0;
};

// Zeroes every variable whose slot is not backward-reachable from a root
// over positive ways.
void structural_prune(PeelGraph& g);

// `eta_hint` scales the stopping tolerance. Throws DecompositionError if
// extraction stalls while the root still carries a non-negligible rate.
PeelResult peel(PeelGraph g, double eta_hint);

}  // namespace fendi::detail
