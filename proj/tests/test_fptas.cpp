#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "fendi/error.hpp"
#include "fendi/fptas.hpp"
#include "fixtures.hpp"

namespace fendi {
namespace {

using testing::chain;
using testing::parallel_links;
using testing::small_random;

TEST(FindBounds, ParallelLinksStopAtSecondBest) {
  Network net = parallel_links();
  Bounds b = find_bounds(net, 0, 1, 2.0);
  EXPECT_DOUBLE_EQ(b.lb, net.link(1).length());
  EXPECT_DOUBLE_EQ(b.ub, b.lb);  // 2|N|-3 = 1
}

TEST(FindBounds, RejectsUnreachableRate) {
  Network net = parallel_links();
  try {
    find_bounds(net, 0, 1, 3.5);
    FAIL() << "expected EdrUnachievable";
  } catch (const EdrUnachievable& e) {
    EXPECT_NEAR(e.max_edr(), 3.0, 1e-9);
  }
}

TEST(FindBounds, UniformLinkLengths) {
  Network net = chain(0.9);
  Bounds b = find_bounds(net, 0, 2, 0.25);
  EXPECT_DOUBLE_EQ(b.lb, net.link(0).length());
  EXPECT_DOUBLE_EQ(b.ub, 3.0 * b.lb);
}

TEST(FindBounds, BracketsOracle) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    Network net = small_random(seed, 6);
    const double eta = solve_ored(net, 0, 5).eta;
    if (eta <= 0.0) continue;
    const double delta = 0.6 * eta;
    Bounds b = find_bounds(net, 0, 5, delta);
    auto cert = brute_force_ofred(net, 0, 5, delta);
    EXPECT_LE(b.lb, cert.z_star * (1 + 1e-9)) << "seed " << seed;
    EXPECT_GE(b.ub, cert.z_star * (1 - 1e-9)) << "seed " << seed;
    EXPECT_LE(b.ub / b.lb, 2.0 * net.num_nodes() - 3 + 1e-9);
  }
}

TEST(Fendi, ParallelLinksUseBestLink) {
  Network net = parallel_links();
  FendiSolution sol = solve_fendi(net, 0, 1, 1.0, 0.5);
  ASSERT_EQ(sol.pflows.size(), 1u);
  EXPECT_EQ(sol.pflows[0].walk.links, std::vector<LinkIndex>{0});
  EXPECT_NEAR(sol.worst_fidelity, 0.95, 1e-9);
  EXPECT_GE(sol.eta, 1.0 * (1 - 1e-6));
}

TEST(Fendi, ChainHasOneAnswer) {
  Network net = chain(0.9);
  const Link links[] = {net.link(0), net.link(1)};
  const NodeParams nodes[] = {net.node(1).params};
  const double expected = path_fidelity(links, nodes);
  for (double eps : {0.25, 0.5, 1.0}) {
    FendiSolution sol = solve_fendi(net, 0, 2, 0.5, eps);
    EXPECT_NEAR(sol.worst_fidelity, expected, 1e-9) << "eps " << eps;
    EXPECT_NEAR(sol.eta, 0.5, 1e-6);
  }
}

TEST(Fendi, PropagatesUnachievable) {
  Network net = chain(0.9);
  EXPECT_THROW(solve_fendi(net, 0, 2, 0.75, 0.5), EdrUnachievable);
}

TEST(Fendi, EnvelopesAndApproximation) {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    Network net = small_random(seed, 6);
    const double eta = solve_ored(net, 0, 5).eta;
    if (eta <= 0.0) continue;
    const double delta = 0.5 * eta;
    auto cert = brute_force_ofred(net, 0, 5, delta);
    for (double eps : {0.25, 1.0}) {
      FendiSolution sol = solve_fendi(net, 0, 5, delta, eps);
      const int n2 = 2 * net.num_nodes() - 3;
      const int stage1_cap = static_cast<int>(std::ceil(std::log2(std::log2(n2)))) + 5;
      EXPECT_LE(sol.stats.stage1_iterations, stage1_cap);
      const int span = sol.stats.z_ub_initial - sol.stats.z_lb_initial;
      const int stage2_cap = span > 1 ? static_cast<int>(std::ceil(std::log2(span))) + 1 : 1;
      EXPECT_LE(sol.stats.stage2_iterations, stage2_cap);
      EXPECT_GE(sol.stats.z_final, sol.stats.z_lb_initial);
      EXPECT_LE(sol.stats.z_final, sol.stats.z_ub_initial);
      EXPECT_GE(sol.eta, delta * (1 - 1e-6));
      EXPECT_TRUE(validate_layered(net, sol.layered).ok);
      EXPECT_LE(sol.z_plus, (1 + eps) * cert.z_star * (1 + 1e-9))
          << "seed " << seed << " eps " << eps;
      EXPECT_LE(sol.worst_fidelity, sol.min_pflow_fidelity + 1e-12);
    }
  }
}

TEST(Pareto, ParallelLinksStaircase) {
  Network net = parallel_links();
  auto pts = pareto_sweep(net, 0, 1, 0.5, 3);
  ASSERT_EQ(pts.size(), 3u);
  const double fid[] = {0.95, 0.85, 0.75};
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(pts[i].delta, i + 1.0, 1e-9);
    EXPECT_GE(pts[i].eta, (i + 1.0) * (1 - 1e-6));
    EXPECT_NEAR(pts[i].worst_fidelity, fid[i], 1e-9);
  }
}

TEST(Pareto, ChainPointsCoincide) {
  auto pts = pareto_sweep(chain(0.9), 0, 2, 0.5, 2);
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_NEAR(pts[0].worst_fidelity, pts[1].worst_fidelity, 1e-12);
  EXPECT_NEAR(pts[0].z_plus, pts[1].z_plus, 1e-12);
}

TEST(Pareto, MonotoneAndJobIndependent) {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    Network net = small_random(seed, 6);
    if (solve_ored(net, 0, 5).eta <= 0.0) continue;
    auto serial = pareto_sweep(net, 0, 5, 0.5, 4, 1);
    auto parallel = pareto_sweep(net, 0, 5, 0.5, 4, 2);
    ASSERT_EQ(serial.size(), parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
      EXPECT_EQ(serial[i].delta, parallel[i].delta);
      EXPECT_EQ(serial[i].worst_fidelity, parallel[i].worst_fidelity);
      if (i > 0) EXPECT_LE(serial[i].worst_fidelity, serial[i - 1].worst_fidelity);
    }
  }
}

TEST(Pareto, RejectsSingleStep) {
  EXPECT_THROW(pareto_sweep(chain(0.9), 0, 2, 0.5, 1), InvalidArgument);
}

TEST(Pareto, CsvLayout) {
  auto pts = pareto_sweep(parallel_links(), 0, 1, 0.5, 3);
  const std::string csv = pareto_csv(pts, "fixture");
  EXPECT_EQ(csv.rfind("# fixture\ndelta,eta,worst_fidelity,z_plus,solve_ms\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
}

}  // namespace
}  // namespace fendi
