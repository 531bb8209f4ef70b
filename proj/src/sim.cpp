#include "fendi/sim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <random>
#include <sstream>

#include "fendi/error.hpp"

namespace fendi::sim {

using nlohmann::json;

std::uint64_t stream_seed(std::uint64_t master, const std::string& name) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : name) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  // splitmix64 finaliser over the mixed value
  std::uint64_t z = h ^ (master + 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

bool Ledger::balanced() const {
  return generated + swap_successes ==
         delivered + in_buffers + waste_lifetime + waste_capacity + waste_dead + swap_consumed;
}

namespace {

struct RawSwap {
  LevelSwapKey key;
  int z2 = 0;
  double value = 0.0;
};

Plan build_plan(const Network& net, NodeIndex s, NodeIndex t, double eta,
                const std::vector<double>& g, const std::vector<int>& link_level,
                const std::vector<RawSwap>& swaps) {
  Plan plan;
  plan.s = s;
  plan.t = t;
  plan.eta = eta;
  const Enode sd = make_enode(s, t);
  std::map<std::pair<Enode, int>, int> index;
  std::vector<double> inflow;
  auto input = [&](Enode e, int z) {
    auto [it, fresh] = index.try_emplace({e, z}, static_cast<int>(plan.inputs.size()));
    if (fresh) {
      plan.inputs.push_back(InputBuffer{e, z, e == sd, {}, {}});
      inflow.push_back(0.0);
    }
    return it->second;
  };

  for (LinkIndex l = 0; l < net.num_links(); ++l) {
    if (!(g[l] > 0.0)) continue;
    const Link& link = net.link(l);
    double rate = link.capacity * g[l];
    if (std::abs(rate - std::round(rate)) < 1e-9) rate = std::round(rate);
    const int target = input(make_enode(link.a, link.b), link_level[l]);
    inflow[target] += rate * link.q;
    plan.links.push_back(LinkSource{l, rate, target});
  }

  std::vector<RawSwap> ordered;
  for (const auto& sw : swaps) {
    if (sw.value > 0.0) ordered.push_back(sw);
  }
  std::stable_sort(ordered.begin(), ordered.end(), [](const RawSwap& a, const RawSwap& b) {
    if (a.key.k != b.key.k) return a.key.k < b.key.k;
    return a.key.z < b.key.z;
  });
  for (const auto& sw : ordered) {
    const Enode lo = make_enode(sw.key.target.m, sw.key.k);
    const Enode hi = make_enode(sw.key.k, sw.key.target.n);
    SwapRule rule;
    rule.key = sw.key;
    rule.rate = sw.value;
    const int lo_in = input(lo, sw.key.z1);
    const int hi_in = input(hi, sw.z2);
    rule.target = input(sw.key.target, sw.key.z);
    inflow[rule.target] += net.node(sw.key.k).params.q * sw.value;
    const int swap_index = static_cast<int>(plan.swaps.size());
    rule.low_out = static_cast<int>(plan.outputs.size());
    plan.outputs.push_back(OutputBuffer{lo_in, swap_index, true});
    rule.high_out = static_cast<int>(plan.outputs.size());
    plan.outputs.push_back(OutputBuffer{hi_in, swap_index, false});
    plan.swaps.push_back(rule);
  }

  std::vector<double> outflow(plan.inputs.size(), 0.0);
  for (int o = 0; o < static_cast<int>(plan.outputs.size()); ++o) {
    const auto& out = plan.outputs[o];
    if (plan.inputs[out.source].terminal) continue;
    plan.inputs[out.source].outputs.push_back(o);
    outflow[out.source] += plan.swaps[out.swap].rate;
  }
  const double scale = std::max(1.0, eta);
  for (std::size_t i = 0; i < plan.inputs.size(); ++i) {
    auto& in = plan.inputs[i];
    if (in.terminal) {
      in.outputs.clear();
      continue;
    }
    if (in.outputs.empty()) {
      if (inflow[i] > 1e-9 * scale) {
        std::ostringstream msg;
        msg << "plan: buffer " << net.node(in.pair.m).id << "|" << net.node(in.pair.n).id << "/"
            << in.z << " receives " << inflow[i] << " per slot but has no outflow";
        throw PlanError(msg.str());
      }
      continue;
    }
    double acc = 0.0;
    for (int o : in.outputs) {
      acc += plan.swaps[plan.outputs[o].swap].rate;
      in.cumulative.push_back(acc / outflow[i]);
    }
    in.cumulative.back() = 1.0;
  }
  return plan;
}

struct Ebit {
  double fidelity;
  long birth;
};

class Runner {
 public:
  Runner(const Network& net, const Plan& plan, const SimConfig& cfg)
      : net_(net), plan_(plan), cfg_(cfg), queues_(plan.outputs.size()) {
    for (const auto& src : plan.links) {
      gen_rng_.emplace_back(stream_seed(cfg.seed, "gen/" + std::to_string(src.link)));
    }
    for (const auto& in : plan.inputs) {
      route_rng_.emplace_back(stream_seed(cfg.seed, "route/" + std::to_string(in.pair.m) + "|" +
                                                        std::to_string(in.pair.n) + "/" +
                                                        std::to_string(in.z)));
    }
    for (NodeIndex k = 0; k < net.num_nodes(); ++k) {
      swap_rng_.emplace_back(stream_seed(cfg.seed, "swap/" + std::to_string(k)));
    }
  }

  SimReport execute() {
    SimReport rep;
    rep.slots = cfg_.slots;
    for (long slot = 0; slot < cfg_.slots; ++slot) {
      const long before = ledger_.delivered;
      generate(slot);
      if (cfg_.passes == SwapPasses::kFixpoint) {
        while (swap_pass()) {
        }
      } else {
        swap_pass();
      }
      evict(slot);
      if (cfg_.trace) rep.trace.push_back(TraceRow{slot, ledger_.delivered - before, occupancy()});
    }
    ledger_.in_buffers = occupancy();
    rep.ledger = ledger_;
    rep.delivered = ledger_.delivered;
    rep.per_ebit_fidelities = std::move(delivered_);
    if (!rep.per_ebit_fidelities.empty()) {
      double sum = 0.0;
      rep.min_fidelity = rep.per_ebit_fidelities.front();
      for (double f : rep.per_ebit_fidelities) {
        sum += f;
        rep.min_fidelity = std::min(rep.min_fidelity, f);
      }
      rep.avg_fidelity = sum / static_cast<double>(rep.per_ebit_fidelities.size());
    }
    rep.achieved_edr = static_cast<double>(rep.delivered) / static_cast<double>(cfg_.slots);
    return rep;
  }

 private:
  void generate(long slot) {
    for (std::size_t i = 0; i < plan_.links.size(); ++i) {
      const auto& src = plan_.links[i];
      auto& rng = gen_rng_[i];
      const double whole = std::floor(src.rate);
      long attempts = static_cast<long>(whole);
      const double frac = src.rate - whole;
      if (frac > 0.0 && std::uniform_real_distribution<double>(0.0, 1.0)(rng) < frac) ++attempts;
      const Link& link = net_.link(src.link);
      long ok = attempts;
      if (link.q < 1.0) ok = std::binomial_distribution<long>(attempts, link.q)(rng);
      for (long e = 0; e < ok; ++e) {
        ++ledger_.generated;
        arrive(src.target, Ebit{link.fidelity, slot});
      }
    }
  }

  void arrive(int input, Ebit e) {
    const auto& in = plan_.inputs[input];
    if (in.terminal) {
      ++ledger_.delivered;
      delivered_.push_back(e.fidelity);
      return;
    }
    if (in.outputs.empty()) {
      ++ledger_.waste_dead;
      return;
    }
    int pick = 0;
    if (in.outputs.size() > 1) {
      const double u = std::uniform_real_distribution<double>(0.0, 1.0)(route_rng_[input]);
      pick = static_cast<int>(std::upper_bound(in.cumulative.begin(), in.cumulative.end(), u) -
                              in.cumulative.begin());
      pick = std::min(pick, static_cast<int>(in.outputs.size()) - 1);
    }
    auto& q = queues_[in.outputs[pick]];
    if (static_cast<long>(q.size()) >= cfg_.buffer_capacity) {
      ++ledger_.waste_capacity;
      return;
    }
    q.push_back(e);
  }

  bool swap_pass() {
    bool any = false;
    for (const auto& rule : plan_.swaps) {
      auto& lo = queues_[rule.low_out];
      auto& hi = queues_[rule.high_out];
      const NodeIndex k = rule.key.k;
      const NodeParams& p = net_.node(k).params;
      while (!lo.empty() && !hi.empty()) {
        const Ebit a = lo.front();
        const Ebit b = hi.front();
        lo.pop_front();
        hi.pop_front();
        any = true;
        ++ledger_.swap_attempts;
        ledger_.swap_consumed += 2;
        const bool ok =
            p.q >= 1.0 || std::uniform_real_distribution<double>(0.0, 1.0)(swap_rng_[k]) < p.q;
        if (!ok) continue;
        ++ledger_.swap_successes;
        arrive(rule.target, Ebit{swap_fidelity(a.fidelity, b.fidelity, p.w),
                                 std::min(a.birth, b.birth)});
      }
    }
    return any;
  }

  void evict(long slot) {
    if (cfg_.buffer_lifetime == kUnlimited) return;
    for (auto& q : queues_) {
      const auto before = q.size();
      q.erase(std::remove_if(q.begin(), q.end(),
                             [&](const Ebit& e) { return slot - e.birth + 1 >= cfg_.buffer_lifetime; }),
              q.end());
      ledger_.waste_lifetime += static_cast<long>(before - q.size());
    }
  }

  long occupancy() const {
    long n = 0;
    for (const auto& q : queues_) n += static_cast<long>(q.size());
    return n;
  }

  const Network& net_;
  const Plan& plan_;
  const SimConfig& cfg_;
  std::vector<std::deque<Ebit>> queues_;
  std::vector<std::mt19937_64> gen_rng_;
  std::vector<std::mt19937_64> route_rng_;
  std::vector<std::mt19937_64> swap_rng_;
  std::vector<double> delivered_;
  Ledger ledger_;
};

}  // namespace

Plan derive_plan(const LayeredEflow& lef, const Network& net) {
  std::vector<RawSwap> swaps;
  for (const auto& [key, v] : lef.x) {
    swaps.push_back(RawSwap{key, key.z - key.z1 - lef.quant.node_len.at(key.k), v});
  }
  return build_plan(net, lef.s, lef.t, lef.eta, lef.g, lef.quant.link_len, swaps);
}

Plan derive_plan(const Eflow& ef, const Network& net) {
  std::vector<RawSwap> swaps;
  for (const auto& [key, v] : ef.x) {
    swaps.push_back(RawSwap{LevelSwapKey{key.target, 0, key.k, 0}, 0, v});
  }
  return build_plan(net, ef.s, ef.t, ef.eta, ef.g, std::vector<int>(net.num_links(), 0), swaps);
}

SimReport run(const Network& net, const Plan& plan, const SimConfig& cfg, double delta) {
  if (cfg.slots < 1) throw InvalidArgument("sim: slots must be >= 1");
  if (cfg.buffer_lifetime < 1) throw InvalidArgument("sim: buffer_lifetime must be >= 1");
  if (cfg.buffer_capacity < 0) throw InvalidArgument("sim: buffer_capacity must be >= 0");
  Runner runner(net, plan, cfg);
  SimReport rep = runner.execute();
  rep.delta = delta;
  rep.edr_satisfied = rep.achieved_edr >= delta * (1.0 - 1e-6);
  return rep;
}

json report_to_json(const SimReport& r, bool include_fidelities) {
  const auto& l = r.ledger;
  json doc{{"slots", r.slots},
           {"delivered", r.delivered},
           {"achieved_edr", r.achieved_edr},
           {"delta", r.delta},
           {"edr_satisfied", r.edr_satisfied},
           {"min_fidelity", r.min_fidelity},
           {"avg_fidelity", r.avg_fidelity},
           {"ledger",
            {{"generated", l.generated},
             {"swap_attempts", l.swap_attempts},
             {"swap_successes", l.swap_successes},
             {"swap_consumed", l.swap_consumed},
             {"delivered", l.delivered},
             {"in_buffers", l.in_buffers},
             {"waste_lifetime", l.waste_lifetime},
             {"waste_capacity", l.waste_capacity},
             {"waste_dead", l.waste_dead},
             {"waste_failed_swaps", 2 * (l.swap_attempts - l.swap_successes)},
             {"balanced", l.balanced()}}}};
  if (include_fidelities) doc["per_ebit_fidelities"] = r.per_ebit_fidelities;
  return doc;
}

std::string trace_csv(const SimReport& r) {
  std::ostringstream out;
  out << "slot,delivered,buffer_occupancy\n";
  for (const auto& row : r.trace) {
    out << row.slot << "," << row.delivered << "," << row.buffer_occupancy << "\n";
  }
  return out.str();
}

}  // namespace fendi::sim
