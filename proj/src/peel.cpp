#include "fendi/detail/peel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "fendi/error.hpp"

namespace fendi::detail {

namespace {

double slot_rate(const PeelGraph& g, int slot) {
  double r = 0.0;
  for (const auto& w : g.ways[slot]) r += w.factor * g.values[w.var];
  return r;
}

std::string name_of(const PeelGraph& g, int slot) {
  if (slot >= 0 && slot < static_cast<int>(g.slot_names.size())) return g.slot_names[slot];
  return "#" + std::to_string(slot);
}

class Extractor {
 public:
  Extractor(const PeelGraph& g, double zero) : g_(g), zero_(zero),
        choice_(g.ways.size(), -1), state_(g.ways.size(), 0) {}

  bool resolve(int slot) {
    if (choice_[slot] >= 0) return true;
    state_[slot] = 1;
    const auto& ways = g_.ways[slot];
    for (int i = 0; i < static_cast<int>(ways.size()); ++i) {
      const auto& w = ways[i];
      if (g_.values[w.var] <= zero_ || w.factor <= 0.0) continue;
      if (w.gen) {
        choice_[slot] = i;
        break;
      }
      if (state_[w.low] == 1 || state_[w.high] == 1) {
        blocked_ = slot;
        continue;
      }
      if (!resolve(w.low)) continue;
      if (!resolve(w.high)) continue;
      choice_[slot] = i;
      break;
    }
    state_[slot] = 0;
    return choice_[slot] >= 0;
  }

  int choice(int slot) const { return choice_[slot]; }
  int blocked() const { return blocked_; }

 private:
  const PeelGraph& g_;
  double zero_;
  std::vector<int> choice_;
  std::vector<char> state_;
  int blocked_ = -1;
};

int expand(const PeelGraph& g, const Extractor& ex, int slot, double psi, PeelTree& tree,
           std::map<int, double>& ratios) {
  const int idx = static_cast<int>(tree.nodes.size());
  const int way_i = ex.choice(slot);
  tree.nodes.push_back(PeelNode{slot, way_i, -1, -1, psi});
  const PeelWay& w = g.ways[slot][way_i];
  const double r = psi / w.factor;
  ratios[w.var] += r;
  if (!w.gen) {
    const int lo = expand(g, ex, w.low, r, tree, ratios);
    const int hi = expand(g, ex, w.high, r, tree, ratios);
    tree.nodes[idx].low = lo;
    tree.nodes[idx].high = hi;
  }
  return idx;
}

}  // namespace

void structural_prune(PeelGraph& g) {
  std::vector<char> seen(g.ways.size(), 0);
  std::vector<int> stack;
  for (int r : g.roots) {
    if (!seen[r]) {
      seen[r] = 1;
      stack.push_back(r);
    }
  }
  while (!stack.empty()) {
    const int s = stack.back();
    stack.pop_back();
    for (const auto& w : g.ways[s]) {
      if (w.gen || g.values[w.var] <= 0.0) continue;
      for (int c : {w.low, w.high}) {
        if (!seen[c]) {
          seen[c] = 1;
          stack.push_back(c);
        }
      }
    }
  }
  for (std::size_t s = 0; s < g.ways.size(); ++s) {
    if (seen[s]) continue;
    for (const auto& w : g.ways[s]) g.values[w.var] = 0.0;
  }
}

PeelResult peel(PeelGraph g, double eta_hint) {
  PeelResult out;
  out.consumed.assign(g.values.size(), 0.0);
  if (g.roots.empty()) return out;
  double vmax = 0.0;
  for (double& v : g.values) {
    if (v < 0.0) v = 0.0;
    vmax = std::max(vmax, v);
  }
  const double zero = 1e-13 * std::max(1.0, vmax);
  for (double& v : g.values) {
    if (v <= zero) v = 0.0;
  }
  structural_prune(g);
  double initial = 0.0;
  for (int r : g.roots) initial += slot_rate(g, r);
  const double base = std::max({1.0, initial, eta_hint});
  const double stop = 1e-9 * base;

  for (int root : g.roots) {
    while (slot_rate(g, root) > stop) {
      Extractor ex(g, zero);
      if (!ex.resolve(root)) {
        const double left = slot_rate(g, root);
        if (left <= 1e-6 * base) break;
        std::string msg = "decomposition stalled at " + name_of(g, root) + " with residual rate " +
                          std::to_string(left);
        if (ex.blocked() >= 0) msg += "; cyclic dependency through " + name_of(g, ex.blocked());
        throw DecompositionError(msg);
      }
      PeelTree tree;
      tree.root = root;
      std::map<int, double> ratios;
      expand(g, ex, root, 1.0, tree, ratios);
      double bottleneck = std::numeric_limits<double>::infinity();
      int arg = -1;
      for (auto [var, r] : ratios) {
        const double cap = g.values[var] / r;
        if (cap < bottleneck) {
          bottleneck = cap;
          arg = var;
        }
      }
      for (auto [var, r] : ratios) {
        const double used = bottleneck * r;
        out.consumed[var] += used;
        g.values[var] = var == arg ? 0.0 : g.values[var] - used;
        if (g.values[var] <= zero) g.values[var] = 0.0;
      }
      tree.ratios.assign(ratios.begin(), ratios.end());
      tree.value = bottleneck;
      out.total += bottleneck;
      out.trees.push_back(std::move(tree));
    }
  }
  return out;
}

}  // namespace fendi::detail
