#pragma once

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fendi/lp.hpp"
#include "fendi/network.hpp"

namespace fendi {

// Unordered node pair, stored with m < n.
struct Enode {
  NodeIndex m = 0;
  NodeIndex n = 0;
  auto operator<=>(const Enode&) const = default;
};

// Throws InvalidArgument when a == b.
Enode make_enode(NodeIndex a, NodeIndex b);
bool contains(Enode e, NodeIndex v);

// Swap variable: ebits of `target` produced by swapping {target.m, k} with
// {k, target.n} at node k. The stored value is the common consumption rate
// of both child enodes.
struct SwapKey {
  Enode target;
  NodeIndex k = 0;
  auto operator<=>(const SwapKey&) const = default;
  Enode low() const { return make_enode(target.m, k); }
  Enode high() const { return make_enode(k, target.n); }
};

struct Eflow {
  NodeIndex s = 0;
  NodeIndex t = 0;
  std::vector<double> g;           // per link, in [0, 1]
  std::map<SwapKey, double> x;     // nonnegative rates
  double eta = 0.0;                // expected EDR, equals I(st)

  Enode sd() const { return make_enode(s, t); }
  static Eflow zero(const Network& net, NodeIndex s, NodeIndex t);
};

// Ebits produced at / consumed from an enode per time unit.
double compute_I(const Eflow& ef, const Network& net, Enode mn);
double compute_Omega(const Eflow& ef, const Network& net, Enode mn);

// Dense per-enode balances, indexed by m * |N| + n.
struct Balance {
  std::vector<double> produced;
  std::vector<double> consumed;
};
Balance compute_balance(const Eflow& ef, const Network& net);

struct OredModel {
  lp::Problem problem;
  std::vector<int> g_var;                   // per link, -1 when absent
  std::vector<std::pair<SwapKey, int>> x_var;
};

// Maximum-EDR LP over s's connected component.
OredModel build_ored_model(const Network& net, NodeIndex s, NodeIndex t);

struct OredResult {
  double eta = 0.0;
  Eflow eflow;
  long lp_iterations = 0;
};
// Disconnected s, t yield eta 0 and a zero eflow.
OredResult solve_ored(const Network& net, NodeIndex s, NodeIndex t);

struct Violation {
  std::string what;
  double magnitude = 0.0;
};
struct ValidationReport {
  bool ok = true;
  std::vector<Violation> violations;
  std::string summary() const;
};
// Checks bounds, conservation I(mn) = Omega(mn) for mn != st, Omega(st) = 0
// and eta = I(st). Each residual is scaled by max(1, eta).
ValidationReport validate_eflow(const Network& net, const Eflow& ef, double tol = 1e-6);

// Induced graph: an edge from the source marker (nullopt) for each positive
// g, and a matched edge pair for each positive swap variable.
struct InducedEdge {
  std::optional<Enode> from;
  Enode to;
  int link = -1;       // generation edges
  NodeIndex k = -1;    // swap edges
  double rate = 0.0;
};
struct InducedGraph {
  std::vector<Enode> vertices;
  std::vector<InducedEdge> edges;
};
InducedGraph induced_graph(const Eflow& ef, const Network& net);

// Keeps only what feeds the SD pair: discards structure not backward-reachable
// from st and any surplus not drawn by st. The result conserves exactly.
Eflow prune_noncontributing(const Eflow& ef, const Network& net);

// Number of strictly positive g and x entries.
int count_nonzero(const Eflow& ef);

std::string enode_key(const Network& net, Enode e);
std::string link_key(const Network& net, LinkIndex l);
LinkIndex parse_link_key(const Network& net, const std::string& key);

nlohmann::json eflow_to_json(const Eflow& ef, const Network& net);
Eflow eflow_from_json(const nlohmann::json& doc, const Network& net);

}  // namespace fendi
