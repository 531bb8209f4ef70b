#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "fendi/eflow.hpp"
#include "fendi/fored.hpp"
#include "fendi/network.hpp"

namespace fendi::sim {

// An input buffer E(mn/z). Ebits arriving here are immediately routed by a
// coin toss to one of the output buffers below, or delivered when terminal.
struct InputBuffer {
  Enode pair;
  int z = 0;
  bool terminal = false;
  std::vector<int> outputs;        // indices into Plan::outputs
  std::vector<double> cumulative;  // routing CDF over `outputs`, last entry 1
};

// Output buffer D^{child}_{target}: holds ebits of one input buffer waiting
// for a partner at the swap node.
struct OutputBuffer {
  int source = 0;  // input buffer the ebits come from
  int swap = 0;    // index into Plan::swaps
  bool low = true;
};

struct SwapRule {
  LevelSwapKey key;
  int low_out = 0;   // output buffers matched against each other
  int high_out = 0;
  int target = 0;    // input buffer receiving successful swaps
  double rate = 0.0;
};

struct LinkSource {
  LinkIndex link = 0;
  double rate = 0.0;  // channel attempts per slot, c * g
  int target = 0;     // input buffer
};

struct Plan {
  NodeIndex s = 0;
  NodeIndex t = 0;
  double eta = 0.0;
  std::vector<LinkSource> links;
  std::vector<InputBuffer> inputs;
  std::vector<OutputBuffer> outputs;
  std::vector<SwapRule> swaps;  // sorted by swap node, then target level

  bool empty() const { return links.empty(); }
};

// Throws PlanError when an input buffer receives flow but has no outflow
// away from the SD enode.
Plan derive_plan(const LayeredEflow& lef, const Network& net);
// Unlayered eflow: every buffer sits at level 0.
Plan derive_plan(const Eflow& ef, const Network& net);

enum class SwapPasses { kFixpoint, kSingle };

inline constexpr long kUnlimited = std::numeric_limits<long>::max();

struct SimConfig {
  long slots = 1000;
  std::uint64_t seed = 1;
  long buffer_lifetime = kUnlimited;   // slots an ebit may wait; 1 is bufferless
  long buffer_capacity = kUnlimited;   // per output buffer
  SwapPasses passes = SwapPasses::kFixpoint;
  bool trace = false;
};

struct TraceRow {
  long slot = 0;
  long delivered = 0;
  long buffer_occupancy = 0;
};

// Ebit ledger. generated + swap_successes ==
// delivered + in_buffers + waste_lifetime + waste_capacity + waste_dead
// + swap_consumed, where swap_consumed counts both inputs of every attempt.
struct Ledger {
  long generated = 0;
  long swap_attempts = 0;
  long swap_successes = 0;
  long swap_consumed = 0;
  long delivered = 0;
  long in_buffers = 0;
  long waste_lifetime = 0;
  long waste_capacity = 0;
  long waste_dead = 0;

  bool balanced() const;
};

struct SimReport {
  long slots = 0;
  long delivered = 0;
  std::vector<double> per_ebit_fidelities;
  double min_fidelity = 0.0;  // 0 when nothing was delivered
  double avg_fidelity = 0.0;
  double achieved_edr = 0.0;
  double delta = 0.0;
  bool edr_satisfied = false;
  Ledger ledger;
  std::vector<TraceRow> trace;
};

SimReport run(const Network& net, const Plan& plan, const SimConfig& cfg, double delta);

nlohmann::json report_to_json(const SimReport& report, bool include_fidelities = true);
std::string trace_csv(const SimReport& report);

// 64-bit generator seed for a named stream under a master seed.
std::uint64_t stream_seed(std::uint64_t master, const std::string& name);

}  // namespace fendi::sim
