// Serial versus OpenMP throughput of the hot kernels.

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "fendi/fored.hpp"
#include "fendi/kernels.hpp"
#include "fendi/pricing.hpp"

namespace {

using fendi::kernels::Exec;

Exec exec_of(const benchmark::State& state) {
  return state.range(1) ? Exec::kParallel : Exec::kSerial;
}

void BM_EliminateColumn(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> base(static_cast<std::size_t>(n) * (n + 2));
  for (auto& v : base) v = u(rng);
  std::vector<int> nz;
  for (int c = 0; c <= n; ++c) nz.push_back(c);
  for (auto _ : state) {
    state.PauseTiming();
    std::vector<double> block = base;
    block[n + 1] = 1.0;
    state.ResumeTiming();
    fendi::kernels::eliminate_column(block, n, n + 2, 0, n + 1, nz, 1e-14, exec_of(state));
    benchmark::DoNotOptimize(block.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(n) * (n + 1));
}
BENCHMARK(BM_EliminateColumn)->ArgsProduct({{128, 512, 1024}, {0, 1}});

void BM_ReducedCosts(benchmark::State& state) {
  const int cols = static_cast<int>(state.range(0));
  const int rows = 200;
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> pick(0, rows - 1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<int> start{0};
  std::vector<int> index;
  std::vector<double> values;
  for (int j = 0; j < cols; ++j) {
    for (int p = 0; p < 6; ++p) {
      index.push_back(pick(rng));
      values.push_back(u(rng));
    }
    start.push_back(static_cast<int>(index.size()));
  }
  std::vector<double> cost(cols, 1.0), y(rows), out(cols);
  for (auto& v : y) v = u(rng);
  for (auto _ : state) {
    fendi::kernels::reduced_costs(start, index, values, cost, y, out, exec_of(state));
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(values.size()));
}
BENCHMARK(BM_ReducedCosts)->ArgsProduct({{2000, 20000, 200000}, {0, 1}});

fendi::pricing::Instance waxman_instance(int nodes, double theta) {
  fendi::WaxmanOptions o;
  o.nodes = nodes;
  o.seed = 5;
  fendi::Network net = fendi::waxman_generate(o);
  auto q = fendi::Quantization::from_theta(net, theta);
  fendi::pricing::Instance inst;
  inst.num_nodes = net.num_nodes();
  inst.s = 0;
  inst.t = net.num_nodes() - 1;
  inst.node_len = q.node_len;
  std::vector<std::pair<fendi::NodeIndex, fendi::NodeIndex>> ends;
  std::vector<double> link_q;
  int longest = 0;
  for (int n = 0; n < net.num_nodes(); ++n) inst.node_q.push_back(net.node(n).params.q);
  for (int l = 0; l < net.num_links(); ++l) {
    const auto& link = net.link(l);
    ends.emplace_back(link.a, link.b);
    link_q.push_back(link.q);
    inst.leaves.push_back({l, link.a, link.b, q.link_len[l], 1.0 / (link.q * link.capacity)});
    longest = std::max(longest, q.link_len[l]);
  }
  inst.Z = 4 * longest;
  fendi::pricing::fill_bounds(inst, ends, q.link_len, link_q);
  return inst;
}

void BM_Pricing(benchmark::State& state) {
  const auto inst = waxman_instance(static_cast<int>(state.range(0)), 40.0);
  for (auto _ : state) {
    auto table = fendi::pricing::price(inst, exec_of(state));
    benchmark::DoNotOptimize(table.labels.data());
  }
}
BENCHMARK(BM_Pricing)->ArgsProduct({{15, 30}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_PricingReference(benchmark::State& state) {
  const auto inst = waxman_instance(static_cast<int>(state.range(0)), 40.0);
  for (auto _ : state) {
    auto costs = fendi::pricing::price_reference(inst);
    benchmark::DoNotOptimize(costs.data());
  }
}
BENCHMARK(BM_PricingReference)->Arg(15)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
