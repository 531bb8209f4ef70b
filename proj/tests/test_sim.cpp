#include <gtest/gtest.h>

#include "fendi/error.hpp"
#include "fendi/fptas.hpp"
#include "fendi/sim.hpp"
#include "fixtures.hpp"

namespace fendi {
namespace {

using testing::chain;

Network lossless_chain() {
  Network net;
  net.add_node("A");
  net.add_node("B", NodeParams{1.0, 0.98});
  net.add_node("C");
  net.add_link(0, 1, 1, 1.0, 0.9);
  net.add_link(1, 2, 1, 1.0, 0.8);
  return net;
}

Eflow chain_eflow(const Network& net) {
  Eflow ef = Eflow::zero(net, 0, 2);
  ef.g = {1.0, 1.0};
  ef.x[SwapKey{make_enode(0, 2), 1}] = 1.0;
  ef.eta = net.node(1).params.q;
  return ef;
}

TEST(Plan, ChainFromFendi) {
  Network net = chain(0.9);
  FendiSolution sol = solve_fendi(net, 0, 2, 0.5, 0.5);
  sim::Plan plan = sim::derive_plan(sol.layered, net);
  ASSERT_EQ(plan.links.size(), 2u);
  for (const auto& l : plan.links) EXPECT_DOUBLE_EQ(l.rate, 1.0);
  ASSERT_EQ(plan.swaps.size(), 1u);
  for (const auto& in : plan.inputs) {
    if (in.terminal) continue;
    ASSERT_EQ(in.outputs.size(), 1u);
    EXPECT_DOUBLE_EQ(in.cumulative[0], 1.0);
  }
}

TEST(Plan, ZeroEflowIsEmpty) {
  Network net = chain(0.9);
  sim::Plan plan = sim::derive_plan(Eflow::zero(net, 0, 2), net);
  EXPECT_TRUE(plan.empty());
  auto rep = sim::run(net, plan, {}, 0.0);
  EXPECT_EQ(rep.delivered, 0);
  EXPECT_TRUE(rep.ledger.balanced());
}

TEST(Plan, EqualSplitAcrossLevels) {
  Network net;
  net.add_node("A");
  net.add_node("B");
  net.add_node("C");
  net.add_link(0, 1, 1, 1.0, 0.9);
  net.add_link(1, 2, 1, 1.0, 0.9);
  net.add_link(1, 2, 1, 1.0, 0.8);
  auto q = Quantization::from_lengths(net, {1, 1, 2}, {1, 1, 1});
  LayeredEflow lef = LayeredEflow::zero(net, 0, 2, 4, q);
  lef.g = {1.0, 0.5, 0.5};
  lef.x[LevelSwapKey{make_enode(0, 2), 3, 1, 1}] = 0.5;
  lef.x[LevelSwapKey{make_enode(0, 2), 4, 1, 1}] = 0.5;
  lef.eta = 1.0;
  ASSERT_TRUE(validate_layered(net, lef).ok);
  sim::Plan plan = sim::derive_plan(lef, net);
  bool seen = false;
  for (const auto& in : plan.inputs) {
    if (in.pair == make_enode(0, 1)) {
      ASSERT_EQ(in.cumulative.size(), 2u);
      EXPECT_DOUBLE_EQ(in.cumulative[0], 0.5);
      EXPECT_DOUBLE_EQ(in.cumulative[1], 1.0);
      seen = true;
    }
  }
  EXPECT_TRUE(seen);
}

TEST(Plan, RejectsUnconsumedInflow) {
  Network net = chain(0.9);
  Eflow ef = Eflow::zero(net, 0, 2);
  ef.g = {1.0, 0.0};
  EXPECT_THROW(sim::derive_plan(ef, net), PlanError);
}

TEST(Run, LosslessChainIsDeterministic) {
  Network net = lossless_chain();
  sim::Plan plan = sim::derive_plan(chain_eflow(net), net);
  sim::SimConfig cfg;
  cfg.slots = 50;
  auto rep = sim::run(net, plan, cfg, 1.0);
  EXPECT_EQ(rep.delivered, 50);
  const Link links[] = {net.link(0), net.link(1)};
  const NodeParams nodes[] = {net.node(1).params};
  const double f = path_fidelity(links, nodes);
  for (double got : rep.per_ebit_fidelities) EXPECT_NEAR(got, f, 1e-12);
  EXPECT_TRUE(rep.edr_satisfied);
  EXPECT_EQ(rep.ledger.in_buffers, 0);
}

TEST(Run, LossySwapNearExpectedRate) {
  Network net = chain(0.9);
  sim::Plan plan = sim::derive_plan(chain_eflow(net), net);
  double total = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    sim::SimConfig cfg;
    cfg.seed = seed;
    auto rep = sim::run(net, plan, cfg, 0.5);
    EXPECT_TRUE(rep.ledger.balanced());
    total += rep.achieved_edr;
  }
  EXPECT_NEAR(total / 10.0, 0.5, 0.025);
}

TEST(Run, SameSeedSameReport) {
  Network net = chain(0.9);
  sim::Plan plan = sim::derive_plan(chain_eflow(net), net);
  sim::SimConfig cfg;
  cfg.seed = 42;
  cfg.slots = 200;
  auto a = sim::run(net, plan, cfg, 0.5);
  auto b = sim::run(net, plan, cfg, 0.5);
  EXPECT_EQ(a.delivered, b.delivered);
  EXPECT_EQ(a.per_ebit_fidelities, b.per_ebit_fidelities);
  cfg.seed = 43;
  auto c = sim::run(net, plan, cfg, 0.5);
  EXPECT_TRUE(c.ledger.balanced());
}

TEST(Run, FendiPlanKeepsFidelityFloor) {
  WaxmanOptions o;
  o.nodes = 10;
  o.seed = 3;
  Network net = waxman_generate(o);
  const double eta = solve_ored(net, 0, 9).eta;
  ASSERT_GT(eta, 0.0);
  FendiSolution sol = solve_fendi(net, 0, 9, 0.5 * eta, 0.5);
  sim::Plan plan = sim::derive_plan(sol.layered, net);
  sim::SimConfig cfg;
  cfg.slots = 300;
  auto buffered = sim::run(net, plan, cfg, sol.delta);
  ASSERT_GT(buffered.delivered, 0);
  EXPECT_GE(buffered.min_fidelity, sol.worst_fidelity - 1e-12);
  EXPECT_LE(buffered.min_fidelity, buffered.avg_fidelity);
  EXPECT_TRUE(buffered.ledger.balanced());
  cfg.buffer_lifetime = 1;
  auto bufferless = sim::run(net, plan, cfg, sol.delta);
  EXPECT_LE(bufferless.achieved_edr, buffered.achieved_edr);
  EXPECT_TRUE(bufferless.ledger.balanced());
  EXPECT_EQ(bufferless.ledger.in_buffers, 0);
  cfg.buffer_lifetime = sim::kUnlimited;
  cfg.passes = sim::SwapPasses::kSingle;
  auto single = sim::run(net, plan, cfg, sol.delta);
  EXPECT_TRUE(single.ledger.balanced());
}

TEST(Run, ZeroCapacityWastesEverything) {
  Network net = lossless_chain();
  sim::Plan plan = sim::derive_plan(chain_eflow(net), net);
  sim::SimConfig cfg;
  cfg.slots = 10;
  cfg.buffer_capacity = 0;
  auto rep = sim::run(net, plan, cfg, 1.0);
  EXPECT_EQ(rep.delivered, 0);
  EXPECT_EQ(rep.ledger.waste_capacity, 20);
  EXPECT_TRUE(rep.ledger.balanced());
  EXPECT_FALSE(rep.edr_satisfied);
}

TEST(Run, TraceAndJson) {
  Network net = lossless_chain();
  sim::Plan plan = sim::derive_plan(chain_eflow(net), net);
  sim::SimConfig cfg;
  cfg.slots = 5;
  cfg.trace = true;
  auto rep = sim::run(net, plan, cfg, 1.0);
  ASSERT_EQ(rep.trace.size(), 5u);
  EXPECT_EQ(sim::trace_csv(rep).rfind("slot,delivered,buffer_occupancy\n0,1,0\n", 0), 0u);
  auto doc = sim::report_to_json(rep);
  EXPECT_EQ(doc["delivered"], 5);
  EXPECT_TRUE(doc["ledger"]["balanced"].get<bool>());
  EXPECT_EQ(doc["per_ebit_fidelities"].size(), 5u);
}

TEST(Run, RejectsBadConfig) {
  Network net = lossless_chain();
  sim::Plan plan = sim::derive_plan(chain_eflow(net), net);
  sim::SimConfig cfg;
  cfg.slots = 0;
  EXPECT_THROW(sim::run(net, plan, cfg, 1.0), InvalidArgument);
}

TEST(Streams, NamesSeparate) {
  EXPECT_NE(sim::stream_seed(1, "gen/0"), sim::stream_seed(1, "gen/1"));
  EXPECT_NE(sim::stream_seed(1, "gen/0"), sim::stream_seed(2, "gen/0"));
  EXPECT_EQ(sim::stream_seed(7, "swap/3"), sim::stream_seed(7, "swap/3"));
}

}  // namespace
}  // namespace fendi
