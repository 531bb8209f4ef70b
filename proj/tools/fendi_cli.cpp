// Command-line front end: topology generation, ORED/FENDI solves, Pareto
// sweeps, decomposition and simulation. Exit codes: 0 success, 2 when the EDR
// bound is unachievable, 1 for every other failure including usage errors.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fendi/error.hpp"
#include "fendi/fptas.hpp"
#include "fendi/sim.hpp"
#include "fendi/topology_io.hpp"

#ifndef FENDI_VERSION
#define FENDI_VERSION "0.0.0"
#endif

namespace {

using nlohmann::json;
using namespace fendi;

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

json meta(const std::string& command, const json& config) {
  return {{"tool", "fendi"},
          {"version", FENDI_VERSION},
          {"command", command},
          {"config", config},
          {"config_hash", hex(fnv1a(config.dump()))}};
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("FENDI_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw InvalidArgument(std::string("FENDI_SEED is not an unsigned integer: '") + env + "'");
    }
  }
  return 1;
}

void write_json(const std::string& path, json doc) {
  write_file_atomic(path, doc.dump(2) + "\n");
}

// Accepts a FENDI solution, an `ored` result, or a bare (layered) eflow.
struct LoadedFlow {
  std::optional<LayeredEflow> layered;
  std::optional<Eflow> plain;
  double delta = 0.0;
};

LoadedFlow load_flow(const std::string& path, const Network& net) {
  json doc = read_json_file(path);
  LoadedFlow out;
  try {
    if (doc.contains("layered")) {
      out.layered = layered_from_json(doc["layered"], net);
      out.delta = doc.value("delta", out.layered->eta);
    } else if (doc.contains("eflow")) {
      out.plain = eflow_from_json(doc["eflow"], net);
      out.delta = out.plain->eta;
    } else if (doc.contains("Z")) {
      out.layered = layered_from_json(doc, net);
      out.delta = out.layered->eta;
    } else {
      out.plain = eflow_from_json(doc, net);
      out.delta = out.plain->eta;
    }
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return out;
}

struct Endpoints {
  std::string topology;
  std::string source;
  std::string dest;
};

void add_endpoints(CLI::App* cmd, Endpoints& ep) {
  cmd->add_option("-t,--topology", ep.topology, "topology JSON")->required()->check(CLI::ExistingFile);
  cmd->add_option("-s,--source", ep.source, "source node id")->required();
  cmd->add_option("-d,--dest", ep.dest, "destination node id")->required();
}

struct Resolved {
  Network net;
  NodeIndex s;
  NodeIndex t;
};

Resolved resolve(const Endpoints& ep) {
  Resolved r{load_topology(ep.topology), 0, 0};
  r.s = r.net.node_index(ep.source);
  r.t = r.net.node_index(ep.dest);
  if (r.s == r.t) throw InvalidArgument("source and destination must differ");
  return r;
}

json endpoint_config(const Endpoints& ep) {
  return {{"topology", ep.topology}, {"source", ep.source}, {"dest", ep.dest}};
}

double millis_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

long parse_limit(const std::string& text, const char* what) {
  if (text == "inf" || text == "unlimited") return sim::kUnlimited;
  try {
    std::size_t used = 0;
    long v = std::stol(text, &used);
    if (used == text.size() && v >= 0) return v;
  } catch (const std::exception&) {
  }
  throw InvalidArgument(std::string(what) + " must be a nonnegative integer or 'inf'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fidelity-guaranteed entanglement distribution planner"};
  app.require_subcommand(1);
  app.set_version_flag("--version", FENDI_VERSION);

  // gen
  auto* gen = app.add_subcommand("gen", "generate a Waxman topology");
  WaxmanOptions wax;
  std::optional<std::uint64_t> gen_seed;
  std::string gen_out;
  gen->add_option("--nodes", wax.nodes, "node count")->check(CLI::Range(2, 100000));
  gen->add_option("--alpha", wax.alpha, "Waxman alpha")->check(CLI::PositiveNumber);
  gen->add_option("--beta", wax.beta, "Waxman beta")->check(CLI::Range(0.0, 1.0));
  gen->add_option("--seed", gen_seed, "RNG seed (default FENDI_SEED or 1)");
  gen->add_option("--node-q", wax.node_q.lo, "swap success probability")->check(CLI::Range(0.0, 1.0));
  gen->add_option("--link-q", wax.link_q.lo, "per-channel success probability")
      ->check(CLI::Range(0.0, 1.0));
  gen->add_option("--fidelity-min", wax.link_fidelity.lo, "lowest link fidelity")
      ->check(CLI::Range(0.25, 1.0));
  gen->add_option("--fidelity-max", wax.link_fidelity.hi, "highest link fidelity")
      ->check(CLI::Range(0.25, 1.0));
  gen->add_option("--capacity-min", wax.capacity_lo, "lowest link capacity")->check(CLI::PositiveNumber);
  gen->add_option("--capacity-max", wax.capacity_hi, "highest link capacity")->check(CLI::PositiveNumber);
  gen->add_option("-o,--output", gen_out, "output topology JSON")->required();

  // ored
  auto* ored = app.add_subcommand("ored", "maximum expected EDR without a fidelity bound");
  Endpoints ored_ep;
  std::string ored_out;
  std::string dump_lp;
  add_endpoints(ored, ored_ep);
  ored->add_option("-o,--output", ored_out, "eflow JSON");
  ored->add_option("--dump-lp", dump_lp, "write the LP model in LP text format");

  // fendi
  auto* fendi_cmd = app.add_subcommand("fendi", "approximate max-fidelity plan meeting an EDR bound");
  Endpoints fendi_ep;
  double fendi_delta = 0.0;
  double fendi_eps = 0.5;
  std::string fendi_out;
  add_endpoints(fendi_cmd, fendi_ep);
  fendi_cmd->add_option("--delta", fendi_delta, "expected EDR bound")->required()->check(CLI::PositiveNumber);
  fendi_cmd->add_option("--eps", fendi_eps, "approximation accuracy")->check(CLI::PositiveNumber);
  fendi_cmd->add_option("-o,--output", fendi_out, "solution JSON");

  // pareto
  auto* pareto = app.add_subcommand("pareto", "EDR / worst-case fidelity trade-off sweep");
  Endpoints pareto_ep;
  int steps = 10;
  double pareto_eps = 0.5;
  int jobs = 1;
  std::string pareto_out;
  add_endpoints(pareto, pareto_ep);
  pareto->add_option("--steps", steps, "number of EDR bounds")->check(CLI::Range(2, 100000));
  pareto->add_option("--eps", pareto_eps, "approximation accuracy")->check(CLI::PositiveNumber);
  pareto->add_option("--jobs", jobs, "concurrent solves")->check(CLI::Range(1, 1024));
  pareto->add_option("-o,--output", pareto_out, "CSV output");

  // decompose
  auto* decomp = app.add_subcommand("decompose", "split an eflow into pflows");
  std::string decomp_topo;
  std::string decomp_in;
  std::string decomp_out;
  decomp->add_option("-t,--topology", decomp_topo, "topology JSON")->required()->check(CLI::ExistingFile);
  decomp->add_option("-e,--eflow", decomp_in, "eflow, layered eflow or solution JSON")
      ->required()
      ->check(CLI::ExistingFile);
  decomp->add_option("-o,--output", decomp_out, "pflow JSON");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "run the buffered data-plane protocol");
  std::string sim_topo;
  std::string sim_plan;
  std::string sim_out;
  std::string sim_trace;
  std::string lifetime_text = "inf";
  std::string capacity_text = "inf";
  std::string passes_text = "fixpoint";
  std::optional<std::uint64_t> sim_seed;
  std::optional<double> sim_delta;
  long slots = 1000;
  simulate->add_option("-t,--topology", sim_topo, "topology JSON")->required()->check(CLI::ExistingFile);
  simulate->add_option("-p,--plan", sim_plan, "solution or eflow JSON")->required()->check(CLI::ExistingFile);
  simulate->add_option("--slots", slots, "time slots")->check(CLI::Range(1L, 100000000L));
  simulate->add_option("--seed", sim_seed, "RNG seed (default FENDI_SEED or 1)");
  simulate->add_option("--buffer-lifetime", lifetime_text, "slots an ebit may wait, or inf");
  simulate->add_option("--buffer-capacity", capacity_text, "ebits per output buffer, or inf");
  simulate->add_option("--swap-passes", passes_text, "fixpoint or single")
      ->check(CLI::IsMember({"fixpoint", "single"}));
  simulate->add_option("--delta", sim_delta, "EDR target (default: the plan's)");
  simulate->add_option("--trace", sim_trace, "per-slot trace CSV");
  simulate->add_option("-o,--output", sim_out, "report JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (gen->parsed()) {
      wax.seed = gen_seed ? *gen_seed : default_seed();
      wax.node_q.hi = wax.node_q.lo;
      wax.link_q.hi = wax.link_q.lo;
      if (wax.link_fidelity.lo > wax.link_fidelity.hi) {
        throw InvalidArgument("--fidelity-min exceeds --fidelity-max");
      }
      if (wax.capacity_lo > wax.capacity_hi) throw InvalidArgument("--capacity-min exceeds --capacity-max");
      Network net = waxman_generate(wax);
      json config{{"nodes", wax.nodes},           {"alpha", wax.alpha},
                  {"beta", wax.beta},             {"seed", wax.seed},
                  {"node_q", wax.node_q.lo},      {"link_q", wax.link_q.lo},
                  {"fidelity_min", wax.link_fidelity.lo}, {"fidelity_max", wax.link_fidelity.hi},
                  {"capacity_min", wax.capacity_lo},      {"capacity_max", wax.capacity_hi}};
      save_topology(net, gen_out, meta("gen", config));
      std::cout << "nodes " << net.num_nodes() << "  links " << net.num_links() << "  connected "
                << (net.connected() ? "yes" : "no") << "\n";
      return 0;
    }

    if (ored->parsed()) {
      Resolved r = resolve(ored_ep);
      if (!dump_lp.empty()) {
        std::ostringstream lp_text;
        lp::write_lp(build_ored_model(r.net, r.s, r.t).problem, lp_text);
        write_file_atomic(dump_lp, lp_text.str());
      }
      const auto t0 = std::chrono::steady_clock::now();
      OredResult res = solve_ored(r.net, r.s, r.t);
      const double ms = millis_since(t0);
      if (!ored_out.empty()) {
        json doc{{"eta", res.eta},
                 {"lp_iterations", res.lp_iterations},
                 {"eflow", eflow_to_json(res.eflow, r.net)},
                 {"meta", meta("ored", endpoint_config(ored_ep))}};
        write_json(ored_out, doc);
      }
      std::printf("eta* %.10g  nonzero %d  lp_iterations %ld  %.1f ms\n", res.eta,
                  count_nonzero(res.eflow), res.lp_iterations, ms);
      return 0;
    }

    if (fendi_cmd->parsed()) {
      Resolved r = resolve(fendi_ep);
      const auto t0 = std::chrono::steady_clock::now();
      FendiSolution sol = solve_fendi(r.net, r.s, r.t, fendi_delta, fendi_eps);
      const double ms = millis_since(t0);
      if (!fendi_out.empty()) {
        json config = endpoint_config(fendi_ep);
        config["delta"] = fendi_delta;
        config["eps"] = fendi_eps;
        json doc = fendi_to_json(sol, r.net);
        doc["meta"] = meta("fendi", config);
        write_json(fendi_out, doc);
      }
      std::printf("eta %.10g  worst_fidelity %.10g  z_plus %.10g  pflows %zu  Z %d  %.1f ms\n", sol.eta,
                  sol.worst_fidelity, sol.z_plus, sol.pflows.size(), sol.stats.z_final, ms);
      return 0;
    }

    if (pareto->parsed()) {
      Resolved r = resolve(pareto_ep);
      auto points = pareto_sweep(r.net, r.s, r.t, pareto_eps, steps, jobs);
      json config = endpoint_config(pareto_ep);
      config["steps"] = steps;
      config["eps"] = pareto_eps;
      config["jobs"] = jobs;
      const json m = meta("pareto", config);
      const std::string comment = "fendi " + std::string(FENDI_VERSION) + " pareto config_hash=" +
                                  m["config_hash"].get<std::string>() + " config=" + config.dump();
      const std::string csv = pareto_csv(points, comment);
      if (!pareto_out.empty()) {
        write_file_atomic(pareto_out, csv);
      } else {
        std::cout << csv;
      }
      for (const auto& p : points) {
        std::printf("delta %.6g  eta %.6g  worst_fidelity %.8f%s\n", p.delta, p.eta, p.worst_fidelity,
                    p.retried ? "  (retried)" : "");
      }
      return 0;
    }

    if (decomp->parsed()) {
      Network net = load_topology(decomp_topo);
      LoadedFlow flow = load_flow(decomp_in, net);
      std::vector<Pflow> pflows = flow.layered ? decompose_layered(*flow.layered, net)
                                               : decompose(*flow.plain, net);
      double total = 0.0;
      for (const auto& p : pflows) total += p.value;
      if (!decomp_out.empty()) {
        json doc{{"pflows", pflows_to_json(pflows, net)},
                 {"total", total},
                 {"meta", meta("decompose", {{"topology", decomp_topo}, {"eflow", decomp_in}})}};
        write_json(decomp_out, doc);
      }
      std::printf("pflows %zu  total %.10g\n", pflows.size(), total);
      return 0;
    }

    if (simulate->parsed()) {
      Network net = load_topology(sim_topo);
      LoadedFlow flow = load_flow(sim_plan, net);
      sim::Plan plan = flow.layered ? sim::derive_plan(*flow.layered, net) : sim::derive_plan(*flow.plain, net);
      sim::SimConfig cfg;
      cfg.slots = slots;
      cfg.seed = sim_seed ? *sim_seed : default_seed();
      cfg.buffer_lifetime = parse_limit(lifetime_text, "--buffer-lifetime");
      if (cfg.buffer_lifetime == 0) throw InvalidArgument("--buffer-lifetime must be >= 1");
      cfg.buffer_capacity = parse_limit(capacity_text, "--buffer-capacity");
      cfg.passes = passes_text == "single" ? sim::SwapPasses::kSingle : sim::SwapPasses::kFixpoint;
      cfg.trace = !sim_trace.empty();
      const double delta = sim_delta ? *sim_delta : flow.delta;
      sim::SimReport rep = sim::run(net, plan, cfg, delta);
      json config{{"topology", sim_topo},       {"plan", sim_plan},
                  {"slots", cfg.slots},         {"seed", cfg.seed},
                  {"buffer_lifetime", lifetime_text}, {"buffer_capacity", capacity_text},
                  {"swap_passes", passes_text}, {"delta", delta}};
      const json m = meta("simulate", config);
      if (!sim_out.empty()) {
        json doc = sim::report_to_json(rep);
        doc["plan_eta"] = plan.eta;
        doc["meta"] = m;
        write_json(sim_out, doc);
      }
      if (cfg.trace) {
        write_file_atomic(sim_trace, "# fendi " + std::string(FENDI_VERSION) + " simulate config_hash=" +
                                         m["config_hash"].get<std::string>() + "\n" + sim::trace_csv(rep));
      }
      std::printf("delivered %ld  achieved_edr %.6g  plan_eta %.6g  min_fidelity %.8f  avg_fidelity %.8f  %s\n",
                  rep.delivered, rep.achieved_edr, plan.eta, rep.min_fidelity, rep.avg_fidelity,
                  rep.edr_satisfied ? "edr met" : "edr missed");
      return 0;
    }
  } catch (const EdrUnachievable& e) {
    std::fprintf(stderr, "error: %s (eta* = %.10g)\n", e.what(), e.max_edr());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
