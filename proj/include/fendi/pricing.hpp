#pragma once

#include <limits>
#include <vector>

#include "fendi/kernels.hpp"
#include "fendi/network.hpp"

namespace fendi::pricing {

inline constexpr int kUnreachable = std::numeric_limits<int>::max() / 4;

// Minimum-cost swap trees under an integer length budget. Generation of link
// l costs `cost`; a swap at k costs (left + right) / q_k and adds len_k to
// the level. The SD enode is only ever a root.
struct Instance {
  int num_nodes = 0;
  NodeIndex s = 0;
  NodeIndex t = 1;
  int Z = 0;
  std::vector<int> node_len;
  std::vector<double> node_q;
  struct Leaf {
    LinkIndex link;
    NodeIndex a;
    NodeIndex b;
    int len;
    double cost;
  };
  std::vector<Leaf> leaves;
  // Per dense enode (m * num_nodes + n, m < n): least level any tree above
  // it must add before reaching the SD root; kUnreachable if none.
  std::vector<int> completion;
  // Per dense enode: least level of any tree over it.
  std::vector<int> reach;
};

// Quantized shortest walk lengths (intermediate node lengths included) and
// the derived reach/completion tables. Links with q = 0 and swap nodes with
// q = 0 are unusable.
void fill_bounds(Instance& inst, const std::vector<std::pair<NodeIndex, NodeIndex>>& link_ends,
                 const std::vector<int>& link_len, const std::vector<double>& link_q);

struct Label {
  int z = 0;
  double cost = 0.0;
  LinkIndex link = -1;  // generation label
  NodeIndex k = -1;     // swap label
  int low = -1;         // label index in the {min, k} child
  int high = -1;        // label index in the {k, max} child
};

// Per dense enode, labels in increasing level with strictly decreasing cost
// (the breakpoints of the prefix-minimum cost over levels).
struct Table {
  int num_nodes = 0;
  int Z = 0;
  std::vector<std::vector<Label>> labels;
  const std::vector<Label>& of(NodeIndex m, NodeIndex n) const {
    return labels[static_cast<std::size_t>(m) * num_nodes + n];
  }
};

// Level-synchronous DP. With Exec::kParallel, targets at one level are
// evaluated concurrently; results are identical to the serial run.
Table price(const Instance& inst, kernels::Exec exec);

// Reference: dense exact-level DP without completion pruning. Returns the
// prefix-minimum cost of the SD enode at every level 0..Z (infinity where no
// tree exists).
std::vector<double> price_reference(const Instance& inst);

// Prefix-minimum SD cost per level from a Table.
std::vector<double> sd_prefix_costs(const Table& table, NodeIndex s, NodeIndex t);

}  // namespace fendi::pricing
