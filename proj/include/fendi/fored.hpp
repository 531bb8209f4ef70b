#pragma once

#include <map>
#include <vector>

#include <json.hpp>

#include "fendi/eflow.hpp"
#include "fendi/kernels.hpp"
#include "fendi/network.hpp"
#include "fendi/pflow.hpp"

namespace fendi {

// floor(theta * zeta) + 1, with a small upward nudge before flooring so that
// products landing on an integer are not rounded down by representation error.
int quantize_length(double zeta, double theta);

struct Quantization {
  double theta = 0.0;  // 0 when lengths were supplied directly
  std::vector<int> link_len;
  std::vector<int> node_len;

  static Quantization from_theta(const Network& net, double theta);
  // Pre-quantized lengths; all must be >= 1.
  static Quantization from_lengths(const Network& net, std::vector<int> link_len,
                                   std::vector<int> node_len);
  int walk_length(const Walk& w) const;
  int tree_length(const PflowTree& tree) const;
};

struct LayeredEflow {
  NodeIndex s = 0;
  NodeIndex t = 0;
  int Z = 0;
  Quantization quant;
  std::vector<double> g;                // per link; generated at level link_len[l]
  std::map<LevelSwapKey, double> x;
  double eta = 0.0;                     // sum over z of I(st/z)

  Enode sd() const { return make_enode(s, t); }
  static LayeredEflow zero(const Network& net, NodeIndex s, NodeIndex t, int Z, Quantization q);
};

double layered_I(const LayeredEflow& lef, const Network& net, Enode mn, int z);
double layered_Omega(const LayeredEflow& lef, const Network& net, Enode mn, int z);

ValidationReport validate_layered(const Network& net, const LayeredEflow& lef, double tol = 1e-6);

// Sum over levels.
Eflow aggregate(const LayeredEflow& lef, const Network& net);

enum class ForedMethod {
  kColumnGeneration,  // master over swap trees, priced by the level DP
  kDirectLp,          // one LP over every reachable extended enode
};

struct ForedOptions {
  ForedMethod method = ForedMethod::kColumnGeneration;
  kernels::Exec exec = kernels::Exec::kParallel;
  int max_rounds = 10000;
};

struct ForedStats {
  int rounds = 0;
  int columns = 0;
  long lp_iterations = 0;
  int lp_variables = 0;
};

struct ForedResult {
  double eta = 0.0;
  LayeredEflow layered;
  ForedStats stats;
};

ForedResult solve_fored(const Network& net, NodeIndex s, NodeIndex t, const Quantization& q, int Z,
                        const ForedOptions& opts = {});

// Length-bounded feasibility probe at a real-valued bound.
struct TestOutcome {
  bool pass = false;
  double theta = 0.0;
  int Z = 0;
  ForedResult result;
};
TestOutcome fored_test(const Network& net, NodeIndex s, NodeIndex t, double delta, double z_bound,
                       double eps, const ForedOptions& opts = {});

std::vector<Pflow> decompose_layered(const LayeredEflow& lef, const Network& net,
                                     double tol = 1e-6);

// Longest true (unquantized) walk length of any tree supported by the positive
// entries; 0 for an empty solution.
double max_supported_length(const LayeredEflow& lef, const Network& net);

int count_nonzero(const LayeredEflow& lef);

nlohmann::json layered_to_json(const LayeredEflow& lef, const Network& net);
LayeredEflow layered_from_json(const nlohmann::json& doc, const Network& net);

}  // namespace fendi
