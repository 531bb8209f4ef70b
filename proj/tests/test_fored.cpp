#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "fendi/eflow.hpp"
#include "fendi/error.hpp"
#include "fendi/fored.hpp"
#include "fendi/pricing.hpp"
#include "fixtures.hpp"

namespace fendi {
namespace {

using testing::chain;
using testing::parallel_links;
using testing::small_random;

// Triangle A-B-C with pre-quantized lengths AB=2, BC=1, B=1, AC=8.
struct Triangle {
  Network net;
  Quantization q;
};
Triangle triangle() {
  Triangle f;
  f.net.add_node("A");
  f.net.add_node("B");
  f.net.add_node("C");
  f.net.add_link(0, 1, 1, 1.0, 0.9);
  f.net.add_link(1, 2, 1, 1.0, 0.9);
  f.net.add_link(0, 2, 1, 1.0, 0.9);
  f.q = Quantization::from_lengths(f.net, {2, 1, 8}, {1, 1, 1});
  return f;
}

int sum_largest(const Network& net, const Quantization& q) {
  std::vector<int> all(q.link_len);
  all.insert(all.end(), q.node_len.begin(), q.node_len.end());
  std::sort(all.rbegin(), all.rend());
  const int take = std::min<int>(all.size(), 2 * net.num_nodes() - 3);
  int z = 0;
  for (int i = 0; i < take; ++i) z += all[i];
  return z;
}

TEST(Quantize, Examples) {
  EXPECT_EQ(quantize_length(1.3, 2.0), 3);
  EXPECT_EQ(quantize_length(0.0, 5.0), 1);
  EXPECT_EQ(quantize_length(0.1 * 3, 10.0), 4);  // 2.9999999999999996 reads as 3
  EXPECT_THROW(quantize_length(1.0, 0.0), InvalidArgument);
}

TEST(Quantize, SandwichOnRandomPaths) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const int nodes = 2 + trial % 9;
    Network net;
    for (int i = 0; i < nodes; ++i) {
      net.add_node(std::to_string(i), NodeParams{1.0, 0.5 + 0.5 * u(rng)});
    }
    Walk w;
    w.nodes.push_back(0);
    for (int i = 0; i + 1 < nodes; ++i) {
      w.links.push_back(net.add_link(i, i + 1, 1, 1.0, 0.3 + 0.7 * u(rng)));
      w.nodes.push_back(i + 1);
    }
    const double theta = 0.1 + 20 * u(rng);
    const auto q = Quantization::from_theta(net, theta);
    const double zeta = walk_length(net, w);
    const int zq = q.walk_length(w);
    EXPECT_LE(theta * zeta, zq + 1e-9);
    EXPECT_LE(zq, static_cast<int>(std::floor(theta * zeta + 1e-9)) + (2 * nodes - 3));
  }
}

TEST(Fored, TriangleBoundSix) {
  auto f = triangle();
  for (auto method : {ForedMethod::kColumnGeneration, ForedMethod::kDirectLp}) {
    ForedOptions opts;
    opts.method = method;
    auto r = solve_fored(f.net, 0, 2, f.q, 6, opts);
    EXPECT_NEAR(r.eta, 1.0, 1e-9);
    EXPECT_EQ(r.layered.g[2], 0.0);
    ASSERT_EQ(r.layered.x.size(), 1u);
    const auto& key = r.layered.x.begin()->first;
    EXPECT_EQ(key.z, 4);
    EXPECT_EQ(key.k, 1);
    EXPECT_EQ(key.z1, 2);
    auto ps = decompose_layered(r.layered, f.net);
    ASSERT_EQ(ps.size(), 1u);
    EXPECT_EQ(ps[0].quantized_length, 4);
    EXPECT_EQ(f.q.tree_length(ps[0].tree), 4);
  }
  // With room for the direct link both routes are used.
  EXPECT_NEAR(solve_fored(f.net, 0, 2, f.q, 8).eta, 2.0, 1e-9);
}

TEST(Fored, BelowShortestGivesZero) {
  auto f = triangle();
  auto r = solve_fored(f.net, 0, 2, f.q, 3);
  EXPECT_EQ(r.eta, 0.0);
  EXPECT_EQ(count_nonzero(r.layered), 0);
  EXPECT_TRUE(decompose_layered(r.layered, f.net).empty());
}

TEST(Fored, LargeBoundMatchesOred) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Network net = small_random(seed, 6);
    const auto q = Quantization::from_theta(net, 3.0);
    const int Z = sum_largest(net, q);
    const auto r = solve_fored(net, 0, 5, q, Z);
    const double eta = solve_ored(net, 0, 5).eta;
    EXPECT_NEAR(r.eta, eta, 1e-6 * std::max(1.0, eta)) << seed;
  }
}

TEST(Fored, ColumnsMatchDirectLpAndInvariants) {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    Network net = small_random(seed, 3 + static_cast<int>(seed % 3));
    const NodeIndex t = net.num_nodes() - 1;
    const auto q = Quantization::from_theta(net, 2.0);
    const double ored = solve_ored(net, 0, t).eta;
    double prev = 0.0;
    for (int Z = 1; Z <= sum_largest(net, q) + 1; Z += 2) {
      ForedOptions direct;
      direct.method = ForedMethod::kDirectLp;
      const auto a = solve_fored(net, 0, t, q, Z);
      const auto b = solve_fored(net, 0, t, q, Z, direct);
      EXPECT_NEAR(a.eta, b.eta, 1e-6 * std::max(1.0, b.eta)) << seed << " Z=" << Z;
      EXPECT_GE(a.eta, prev - 1e-9) << seed;
      EXPECT_LE(a.eta, ored * (1 + 1e-9) + 1e-12);
      prev = a.eta;
      for (const auto* lef : {&a.layered, &b.layered}) {
        EXPECT_TRUE(validate_layered(net, *lef).ok) << validate_layered(net, *lef).summary();
        EXPECT_TRUE(validate_eflow(net, aggregate(*lef, net)).ok);
        const auto ps = decompose_layered(*lef, net);
        EXPECT_LE(static_cast<int>(ps.size()), count_nonzero(*lef));
        double sum = 0.0;
        for (const auto& p : ps) {
          sum += p.value;
          EXPECT_EQ(q.tree_length(p.tree), p.quantized_length);
          EXPECT_LE(p.quantized_length, Z);
          EXPECT_LE(p.length, max_supported_length(*lef, net) + 1e-12);
        }
        EXPECT_NEAR(sum, lef->eta, 1e-6 * std::max(1.0, lef->eta));
        // Aggregate then decompose carries the same total.
        double agg = 0.0;
        const Eflow ef = aggregate(*lef, net);
        for (const auto& p : decompose(ef, net)) agg += p.value;
        EXPECT_NEAR(agg, sum, 1e-6 * std::max(1.0, sum));
      }
    }
  }
}

pricing::Instance random_instance(std::uint64_t seed, int nodes, int Z) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  pricing::Instance inst;
  inst.num_nodes = nodes;
  inst.s = 0;
  inst.t = nodes - 1;
  inst.Z = Z;
  std::vector<std::pair<NodeIndex, NodeIndex>> ends;
  std::vector<int> len;
  std::vector<double> q;
  for (int i = 0; i < nodes; ++i) {
    inst.node_len.push_back(1 + static_cast<int>(rng() % 3));
    inst.node_q.push_back(0.3 + 0.7 * u(rng));
  }
  for (int a = 0; a < nodes; ++a) {
    for (int b = a + 1; b < nodes; ++b) {
      if (u(rng) < 0.6) {
        const LinkIndex l = static_cast<int>(ends.size());
        ends.push_back({a, b});
        len.push_back(1 + static_cast<int>(rng() % 5));
        q.push_back(1.0);
        inst.leaves.push_back({l, a, b, len.back(), u(rng)});
      }
    }
  }
  pricing::fill_bounds(inst, ends, len, q);
  return inst;
}

TEST(Pricing, MatchesReferenceSerialAndParallel) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto inst = random_instance(seed, 4 + static_cast<int>(seed % 4), 25);
    const auto ref = pricing::price_reference(inst);
    const auto serial = pricing::price(inst, kernels::Exec::kSerial);
    const auto par = pricing::price(inst, kernels::Exec::kParallel);
    const auto a = pricing::sd_prefix_costs(serial, inst.s, inst.t);
    const auto b = pricing::sd_prefix_costs(par, inst.s, inst.t);
    EXPECT_EQ(a, b) << seed;
    ASSERT_EQ(a.size(), ref.size());
    for (std::size_t z = 0; z < a.size(); ++z) EXPECT_EQ(a[z], ref[z]) << seed << " z=" << z;
  }
}

TEST(FoRedTest, Semantics) {
  Network p = parallel_links();
  // delta beyond the maximum fails at every bound.
  for (double zb : {0.05, 0.5, 5.0}) EXPECT_FALSE(fored_test(p, 0, 1, 3.5, zb, 0.5).pass);
  // A generous bound passes.
  EXPECT_TRUE(fored_test(p, 0, 1, 3.0, 10.0, 0.5).pass);
  Network one;
  one.add_node("a");
  EXPECT_THROW(fored_test(one, 0, 0, 1.0, 1.0, 0.5), InvalidArgument);
}

TEST(LayeredJson, RoundTrip) {
  auto f = triangle();
  auto r = solve_fored(f.net, 0, 2, f.q, 8);
  auto doc = layered_to_json(r.layered, f.net);
  EXPECT_TRUE(doc["x"].contains("A|C|4|B|2"));
  EXPECT_TRUE(doc["sd_levels"].contains("A|C|4"));
  LayeredEflow back = layered_from_json(doc, f.net);
  EXPECT_EQ(back.x, r.layered.x);
  EXPECT_EQ(back.g, r.layered.g);
  EXPECT_EQ(back.quant.link_len, f.q.link_len);
}

}  // namespace
}  // namespace fendi
