#include "fendi/pricing.hpp"

#include <algorithm>
#include <cmath>

namespace fendi::pricing {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

inline int dense(int n, NodeIndex a, NodeIndex b) {
  return a < b ? a * n + b : b * n + a;
}

}  // namespace

void fill_bounds(Instance& inst, const std::vector<std::pair<NodeIndex, NodeIndex>>& link_ends,
                 const std::vector<int>& link_len, const std::vector<double>& link_q) {
  const int n = inst.num_nodes;
  std::vector<long> d(static_cast<std::size_t>(n) * n, kUnreachable);
  auto at = [&](int a, int b) -> long& { return d[static_cast<std::size_t>(a) * n + b]; };
  for (std::size_t l = 0; l < link_ends.size(); ++l) {
    if (!(link_q[l] > 0.0)) continue;
    auto [a, b] = link_ends[l];
    at(a, b) = std::min<long>(at(a, b), link_len[l]);
    at(b, a) = at(a, b);
  }
  for (int k = 0; k < n; ++k) {
    if (!(inst.node_q[k] > 0.0)) continue;
    for (int i = 0; i < n; ++i) {
      if (i == k || at(i, k) >= kUnreachable) continue;
      for (int j = 0; j < n; ++j) {
        if (j == k || j == i || at(k, j) >= kUnreachable) continue;
        const long via = at(i, k) + inst.node_len[k] + at(k, j);
        if (via < at(i, j)) at(i, j) = via;
      }
    }
  }
  auto clamp = [](long v) { return static_cast<int>(std::min<long>(v, kUnreachable)); };
  inst.reach.assign(static_cast<std::size_t>(n) * n, kUnreachable);
  inst.completion.assign(static_cast<std::size_t>(n) * n, kUnreachable);
  // Cost of extending a segment ending at junction a out to endpoint e.
  auto extend = [&](NodeIndex e, NodeIndex a) -> long {
    if (a == e) return 0;
    if (!(inst.node_q[a] > 0.0) || at(e, a) >= kUnreachable) return kUnreachable;
    return at(e, a) + inst.node_len[a];
  };
  for (int m = 0; m < n; ++m) {
    for (int o = m + 1; o < n; ++o) {
      const int e = m * n + o;
      inst.reach[e] = clamp(at(m, o));
      long best = kUnreachable;
      for (auto [a, b] : {std::pair{m, o}, std::pair{o, m}}) {
        if (a == inst.t && b == inst.s) continue;
        const long lhs = extend(inst.s, a);
        const long rhs = extend(inst.t, b);
        if (lhs < kUnreachable && rhs < kUnreachable) best = std::min(best, lhs + rhs);
      }
      inst.completion[e] = clamp(best);
    }
  }
  inst.completion[dense(n, inst.s, inst.t)] = 0;
}

Table price(const Instance& inst, kernels::Exec exec) {
  const int n = inst.num_nodes;
  const int Z = inst.Z;
  const int sd = dense(n, inst.s, inst.t);
  Table table;
  table.num_nodes = n;
  table.Z = Z;
  table.labels.resize(static_cast<std::size_t>(n) * n);

  std::vector<int> targets;
  for (int m = 0; m < n; ++m) {
    for (int o = m + 1; o < n; ++o) {
      const int e = m * n + o;
      if (inst.reach[e] >= kUnreachable || inst.completion[e] >= kUnreachable) continue;
      if (inst.reach[e] + inst.completion[e] <= Z) targets.push_back(e);
    }
  }
  if (Z < 1 || targets.empty()) return table;

  std::vector<std::vector<int>> prefix(static_cast<std::size_t>(n) * n);
  for (int e : targets) prefix[e].assign(Z + 1, -1);
  // Generation leaves per enode, indexed by level.
  std::vector<std::vector<std::pair<int, int>>> gens(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < static_cast<int>(inst.leaves.size()); ++i) {
    const auto& leaf = inst.leaves[i];
    gens[dense(n, leaf.a, leaf.b)].push_back({leaf.len, i});
  }

  std::vector<Label> cand(targets.size());
  std::vector<char> found(targets.size());
  const int nt = static_cast<int>(targets.size());
  const bool parallel = exec == kernels::Exec::kParallel;

  for (int z = 1; z <= Z; ++z) {
#pragma omp parallel for schedule(dynamic, 4) if (parallel)
    for (int ti = 0; ti < nt; ++ti) {
      found[ti] = 0;
      const int e = targets[ti];
      if (z < inst.reach[e] || z + inst.completion[e] > Z) continue;
      const NodeIndex m = e / n;
      const NodeIndex o = e % n;
      const int prev = z > 1 ? prefix[e][z - 1] : -1;
      const double bar = prev >= 0 ? table.labels[e][prev].cost : kInf;
      Label best;
      best.cost = kInf;
      for (auto [len, i] : gens[e]) {
        if (len == z && inst.leaves[i].cost < best.cost) {
          best.cost = inst.leaves[i].cost;
          best.link = inst.leaves[i].link;
          best.k = -1;
        }
      }
      for (NodeIndex k = 0; k < n; ++k) {
        if (k == m || k == o || !(inst.node_q[k] > 0.0)) continue;
        const int low = dense(n, m, k);
        const int high = dense(n, k, o);
        if (low == sd || high == sd) continue;
        if (prefix[low].empty() || prefix[high].empty()) continue;
        const int rem = z - inst.node_len[k];
        if (rem < inst.reach[low] + inst.reach[high]) continue;
        const double inv_q = 1.0 / inst.node_q[k];
        const auto& lows = table.labels[low];
        for (int li = 0; li < static_cast<int>(lows.size()); ++li) {
          const int z2 = rem - lows[li].z;
          if (z2 < inst.reach[high]) break;
          const int h = prefix[high][z2];
          if (h < 0) continue;
          const double c = (lows[li].cost + table.labels[high][h].cost) * inv_q;
          if (c < best.cost) {
            best.cost = c;
            best.link = -1;
            best.k = k;
            best.low = li;
            best.high = h;
          }
        }
      }
      if (best.cost < bar) {
        best.z = z;
        cand[ti] = best;
        found[ti] = 1;
      }
    }
    for (int ti = 0; ti < nt; ++ti) {
      const int e = targets[ti];
      prefix[e][z] = prefix[e][z - 1];
      if (found[ti]) {
        table.labels[e].push_back(cand[ti]);
        prefix[e][z] = static_cast<int>(table.labels[e].size()) - 1;
      }
    }
  }
  return table;
}

std::vector<double> price_reference(const Instance& inst) {
  const int n = inst.num_nodes;
  const int Z = inst.Z;
  const int sd = dense(n, inst.s, inst.t);
  const std::size_t stride = static_cast<std::size_t>(Z) + 1;
  std::vector<double> exact(static_cast<std::size_t>(n) * n * stride, kInf);
  auto E = [&](int e, int z) -> double& { return exact[e * stride + z]; };
  for (const auto& leaf : inst.leaves) {
    if (leaf.len <= Z) {
      double& slot = E(dense(n, leaf.a, leaf.b), leaf.len);
      slot = std::min(slot, leaf.cost);
    }
  }
  for (int z = 1; z <= Z; ++z) {
    for (int m = 0; m < n; ++m) {
      for (int o = m + 1; o < n; ++o) {
        const int e = m * n + o;
        for (int k = 0; k < n; ++k) {
          if (k == m || k == o || !(inst.node_q[k] > 0.0)) continue;
          const int low = dense(n, m, k);
          const int high = dense(n, k, o);
          if (low == sd || high == sd) continue;
          const int rem = z - inst.node_len[k];
          const double inv_q = 1.0 / inst.node_q[k];
          for (int z1 = 1; z1 < rem; ++z1) {
            const double c = (E(low, z1) + E(high, rem - z1)) * inv_q;
            if (c < E(e, z)) E(e, z) = c;
          }
        }
      }
    }
  }
  std::vector<double> out(stride, kInf);
  for (int z = 1; z <= Z; ++z) out[z] = std::min(out[z - 1], E(sd, z));
  return out;
}

std::vector<double> sd_prefix_costs(const Table& table, NodeIndex s, NodeIndex t) {
  std::vector<double> out(static_cast<std::size_t>(table.Z) + 1, kInf);
  const auto& labels = table.of(std::min(s, t), std::max(s, t));
  std::size_t li = 0;
  for (int z = 1; z <= table.Z; ++z) {
    out[z] = out[z - 1];
    while (li < labels.size() && labels[li].z == z) {
      out[z] = std::min(out[z], labels[li].cost);
      ++li;
    }
  }
  return out;
}

}  // namespace fendi::pricing
