#include <algorithm>

#include <gtest/gtest.h>

#include "fendi/eflow.hpp"
#include "fendi/error.hpp"
#include "fendi/pflow.hpp"
#include "fixtures.hpp"

namespace fendi {
namespace {

using testing::chain;
using testing::parallel_links;
using testing::small_random;

TEST(Eflow, ZeroEflowBalances) {
  Network net = chain();
  Eflow ef = Eflow::zero(net, 0, 2);
  for (auto e : {Enode{0, 1}, Enode{1, 2}, Enode{0, 2}}) {
    EXPECT_EQ(compute_I(ef, net, e), 0.0);
    EXPECT_EQ(compute_Omega(ef, net, e), 0.0);
  }
  EXPECT_TRUE(validate_eflow(net, ef).ok);
}

TEST(Eflow, ChainHandEvaluation) {
  Network net = chain();
  Eflow ef = Eflow::zero(net, 0, 2);
  ef.g = {1.0, 1.0};
  ef.x[SwapKey{Enode{0, 2}, 1}] = 1.0;
  ef.eta = 0.5;
  EXPECT_DOUBLE_EQ(compute_I(ef, net, Enode{0, 2}), 0.5);
  EXPECT_DOUBLE_EQ(compute_Omega(ef, net, Enode{0, 1}), 1.0);
  EXPECT_DOUBLE_EQ(compute_Omega(ef, net, Enode{1, 2}), 1.0);
  EXPECT_TRUE(validate_eflow(net, ef).ok);

  ef.g[0] = 0.5;
  auto rep = validate_eflow(net, ef);
  EXPECT_FALSE(rep.ok);
  EXPECT_NE(rep.summary().find("A|B"), std::string::npos);
}

TEST(Eflow, SingleLink) {
  Network net;
  net.add_node("s");
  net.add_node("t");
  net.add_link(0, 1, 10, 0.8, 0.9);
  Eflow ef = Eflow::zero(net, 0, 1);
  ef.g[0] = 1.0;
  EXPECT_DOUBLE_EQ(compute_I(ef, net, Enode{0, 1}), 8.0);
  auto r = solve_ored(net, 0, 1);
  EXPECT_NEAR(r.eta, 8.0, 1e-9);
}

TEST(Ored, ChainAndParallel) {
  Network c = chain();
  auto r = solve_ored(c, 0, 2);
  EXPECT_NEAR(r.eta, 0.5, 1e-9);
  EXPECT_TRUE(validate_eflow(c, r.eflow).ok);
  Network p = parallel_links();
  EXPECT_NEAR(solve_ored(p, 0, 1).eta, 3.0, 1e-9);
}

TEST(Ored, Disconnected) {
  Network net;
  net.add_node("a");
  net.add_node("b");
  net.add_node("c");
  net.add_link(0, 1, 1, 1, 0.9);
  auto r = solve_ored(net, 0, 2);
  EXPECT_EQ(r.eta, 0.0);
  EXPECT_EQ(count_nonzero(r.eflow), 0);
  EXPECT_THROW(solve_ored(net, 1, 1), InvalidArgument);
}

TEST(Ored, PropertiesOnRandomGraphs) {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    Network net = small_random(seed, 3 + static_cast<int>(seed % 5));
    const NodeIndex t = net.num_nodes() - 1;
    auto r = solve_ored(net, 0, t);
    EXPECT_TRUE(validate_eflow(net, r.eflow).ok) << seed;

    // Eflows subsume bufferless single paths.
    double best_single = 0.0;
    for (const auto& w : enumerate_simple_paths(net, 0, t)) {
      best_single = std::max(best_single, walk_bottleneck_capacity(net, w) *
                                              walk_success_probability(net, w));
    }
    EXPECT_GE(r.eta, best_single * (1 - 1e-9)) << seed;

    auto scaled = solve_ored(net.scaled_capacities(3), 0, t);
    EXPECT_NEAR(scaled.eta, 3 * r.eta, 1e-7 * std::max(1.0, r.eta)) << seed;

    for (int l = 0; l < net.num_links(); ++l) {
      EXPECT_LE(solve_ored(net.without_link(l), 0, t).eta, r.eta * (1 + 1e-9) + 1e-12) << seed;
    }
  }
}

// Highly degenerate models: every length threshold of a 15-node instance.
TEST(Ored, PrunedThresholdSweep) {
  WaxmanOptions o;
  o.seed = 1;
  Network net = waxman_generate(o);
  std::vector<double> lengths;
  for (const auto& l : net.links()) lengths.push_back(l.length());
  for (int n = 1; n < 14; ++n) lengths.push_back(net.node(n).params.length());
  std::sort(lengths.rbegin(), lengths.rend());
  lengths.erase(std::unique(lengths.begin(), lengths.end()), lengths.end());
  double prev = solve_ored(net, 0, 14).eta;
  for (double thr : lengths) {
    Network p = net.pruned(thr, 0, 14);
    OredResult r = solve_ored(p, 0, 14);
    EXPECT_LE(r.eta, prev * (1 + 1e-9)) << thr;
    EXPECT_TRUE(validate_eflow(p, r.eflow).ok) << thr;
    prev = r.eta;
  }
}

TEST(Prune, RemovesCirculation) {
  // Triangle s-a-t plus a separate path b-c-d.
  Network net;
  for (auto id : {"s", "a", "t", "b", "c", "d"}) net.add_node(id);
  net.add_link(0, 1, 1, 1, 0.9);
  net.add_link(1, 2, 1, 1, 0.9);
  net.add_link(0, 2, 1, 1, 0.9);
  net.add_link(3, 4, 1, 1, 0.9);
  net.add_link(4, 5, 1, 1, 0.9);
  // Lossless loop: c-d ebits feed b-d (swap at c) and b-c (swap at d), and
  // each of those feeds the other. It balances but never reaches s-t.
  Eflow ef = Eflow::zero(net, 0, 2);
  ef.g[2] = 1.0;
  ef.g[4] = 1.0;
  ef.x[SwapKey{Enode{3, 5}, 4}] = 0.5;
  ef.x[SwapKey{Enode{3, 4}, 5}] = 0.5;
  ef.eta = 1.0;
  ASSERT_TRUE(validate_eflow(net, ef).ok) << validate_eflow(net, ef).summary();
  Eflow p = prune_noncontributing(ef, net);
  EXPECT_NEAR(p.eta, 1.0, 1e-12);
  EXPECT_TRUE(validate_eflow(net, p).ok);
  EXPECT_EQ(p.g[3], 0.0);
  EXPECT_EQ(p.g[4], 0.0);
  EXPECT_TRUE(p.x.empty());

  Eflow again = prune_noncontributing(p, net);
  EXPECT_EQ(again.g, p.g);
  Eflow zero = prune_noncontributing(Eflow::zero(net, 0, 2), net);
  EXPECT_EQ(count_nonzero(zero), 0);
}

TEST(EflowJson, RoundTrip) {
  Network net = parallel_links();
  auto r = solve_ored(net, 0, 1);
  auto doc = eflow_to_json(r.eflow, net);
  EXPECT_TRUE(doc["g"].contains("A|B#0"));
  Eflow back = eflow_from_json(doc, net);
  EXPECT_EQ(back.g, r.eflow.g);
  EXPECT_DOUBLE_EQ(back.eta, r.eflow.eta);
  Network c = chain();
  auto rc = solve_ored(c, 0, 2);
  auto dc = eflow_to_json(rc.eflow, c);
  EXPECT_TRUE(dc["x"].contains("A|C|B"));
  EXPECT_EQ(eflow_from_json(dc, c).x, rc.eflow.x);
}

TEST(Induced, Edges) {
  Network c = chain();
  auto r = solve_ored(c, 0, 2);
  auto g = induced_graph(r.eflow, c);
  EXPECT_EQ(g.vertices.size(), 3u);
  int swaps = 0;
  for (const auto& e : g.edges) swaps += e.from.has_value();
  EXPECT_EQ(swaps, 2);
}

}  // namespace
}  // namespace fendi
