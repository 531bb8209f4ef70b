#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "fendi/fored.hpp"
#include "fendi/network.hpp"
#include "fendi/pflow.hpp"

namespace fendi {

struct Bounds {
  double lb = 0.0;
  double ub = 0.0;
};

// Critical-length bracket for the optimal max path length. Throws
// EdrUnachievable when delta exceeds the network's maximum expected EDR.
Bounds find_bounds(const Network& net, NodeIndex s, NodeIndex t, double delta);

struct FendiStats {
  Bounds initial;
  Bounds after_stage1;
  int stage1_iterations = 0;
  int stage2_iterations = 0;
  double theta = 0.0;
  int z_lb_initial = 0;
  int z_ub_initial = 0;
  int z_final = 0;
  int fored_solves = 0;
};

struct FendiSolution {
  LayeredEflow layered;
  std::vector<Pflow> pflows;
  double z_plus = 0.0;              // longest true walk length the solution can deliver
  double worst_fidelity = 1.0;      // fidelity_from_length(z_plus)
  double min_pflow_fidelity = 1.0;  // over the decomposed pflows
  double eta = 0.0;
  double eps = 0.0;
  double delta = 0.0;
  FendiStats stats;
};

FendiSolution solve_fendi(const Network& net, NodeIndex s, NodeIndex t, double delta, double eps,
                    const ForedOptions& opts = {});

struct ParetoPoint {
  double delta = 0.0;
  double worst_fidelity = 1.0;
  double z_plus = 0.0;
  double eta = 0.0;
  double solve_millis = 0.0;
  bool retried = false;   // solved at delta * (1 - 1e-6)
  bool repaired = false;  // replaced by the solution of a larger delta
};

// `steps` evenly spaced EDR bounds in [eta*/steps, eta*]; `jobs` > 1 solves
// points concurrently. Output is ordered by delta and, after repair, has
// non-increasing worst_fidelity.
std::vector<ParetoPoint> pareto_sweep(const Network& net, NodeIndex s, NodeIndex t, double eps,
                                      int steps, int jobs = 1, const ForedOptions& opts = {});

// CSV with header `delta,eta,worst_fidelity,z_plus,solve_ms`, preceded by
// `comment` as a `#` line when non-empty.
std::string pareto_csv(const std::vector<ParetoPoint>& points, const std::string& comment = {});

nlohmann::json fendi_to_json(const FendiSolution& sol, const Network& net);

}  // namespace fendi
