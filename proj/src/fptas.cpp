#include "fendi/fptas.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>

#include "fendi/eflow.hpp"
#include "fendi/error.hpp"

namespace fendi {

namespace {

constexpr double kEdrSlack = 1e-6;

bool meets(double eta, double delta) { return eta > 0.0 && eta >= delta * (1.0 - kEdrSlack); }

int floor_nudged(double x) {
  return static_cast<int>(std::floor(x + 1e-12 * std::max(1.0, std::abs(x))));
}

}  // namespace

Bounds find_bounds(const Network& net, NodeIndex s, NodeIndex t, double delta) {
  if (!(delta > 0.0)) throw InvalidArgument("EDR bound must be positive");
  std::vector<double> lengths;
  for (const auto& l : net.links()) lengths.push_back(l.length());
  for (int n = 0; n < net.num_nodes(); ++n) {
    if (n != s && n != t) lengths.push_back(net.node(n).params.length());
  }
  std::sort(lengths.rbegin(), lengths.rend());
  lengths.erase(std::unique(lengths.begin(), lengths.end()), lengths.end());
  const double full = solve_ored(net, s, t).eta;
  if (!meets(full, delta)) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "EDR bound unachievable: delta %.6g exceeds the maximum expected EDR %.6g",
                  delta, full);
    throw EdrUnachievable(buf, full);
  }
  auto feasible = [&](std::size_t i) {
    return meets(solve_ored(net.pruned(lengths[i], s, t), s, t).eta, delta);
  };
  // Feasibility only shrinks as the threshold drops; find the last feasible
  // index of the descending scan.
  std::size_t lo = 0, hi = lengths.size();  // feasible(lo) holds; hi is the first failure or end
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (feasible(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double lb = lengths.empty() ? 0.0 : lengths[lo];
  if (!(lb > 0.0)) {
    lb = 1.0;
    for (double v : lengths) {
      if (v > 0.0) lb = v;
    }
  }
  const int span = 2 * net.num_nodes() - 3;
  return Bounds{lb, std::max(1, span) * lb};
}

FendiSolution solve_fendi(const Network& net, NodeIndex s, NodeIndex t, double delta, double eps,
                    const ForedOptions& opts) {
  if (!(eps > 0.0)) throw InvalidArgument("accuracy eps must be positive");
  FendiSolution sol;
  sol.delta = delta;
  sol.eps = eps;
  auto& st = sol.stats;
  st.initial = find_bounds(net, s, t, delta);
  double lb = st.initial.lb;
  double ub = st.initial.ub;

  while (ub > 4.0 * lb) {
    const double zb = std::sqrt(ub * lb / 2.0);
    const auto probe = fored_test(net, s, t, delta, zb, 1.0, opts);
    ++st.fored_solves;
    ++st.stage1_iterations;
    if (probe.pass) {
      ub = 2.0 * zb;
    } else {
      lb = zb;
    }
  }
  st.after_stage1 = Bounds{lb, ub};

  const int span = std::max(1, 2 * net.num_nodes() - 3);
  st.theta = span / (eps * lb);
  const Quantization q = Quantization::from_theta(net, st.theta);
  int z_lb = floor_nudged(st.theta * lb);
  int z_ub = floor_nudged(st.theta * ub) + span;
  st.z_lb_initial = z_lb;
  st.z_ub_initial = z_ub;
  std::optional<ForedResult> best;
  int best_z = 0;
  while (z_ub > z_lb + 1) {
    const int z = (z_lb + z_ub) / 2;
    auto r = solve_fored(net, s, t, q, z, opts);
    ++st.fored_solves;
    ++st.stage2_iterations;
    if (meets(r.eta, delta)) {
      z_ub = z;
      best = std::move(r);
      best_z = z;
    } else {
      z_lb = z;
    }
  }
  if (!best || best_z != z_ub) {
    auto r = solve_fored(net, s, t, q, z_ub, opts);
    ++st.fored_solves;
    if (!meets(r.eta, delta)) {
      throw EdrUnachievable("EDR bound unachievable at the largest quantized bound", r.eta);
    }
    best = std::move(r);
    best_z = z_ub;
  }
  st.z_final = best_z;
  sol.layered = std::move(best->layered);
  sol.eta = sol.layered.eta;
  sol.pflows = decompose_layered(sol.layered, net);
  sol.z_plus = max_supported_length(sol.layered, net);
  sol.worst_fidelity = fidelity_from_length(sol.z_plus);
  sol.min_pflow_fidelity = 1.0;
  for (const auto& p : sol.pflows) sol.min_pflow_fidelity = std::min(sol.min_pflow_fidelity, p.fidelity);
  return sol;
}

std::vector<ParetoPoint> pareto_sweep(const Network& net, NodeIndex s, NodeIndex t, double eps,
                                      int steps, int jobs, const ForedOptions& opts) {
  if (steps < 2) throw InvalidArgument("a sweep needs at least two steps");
  const double eta_star = solve_ored(net, s, t).eta;
  if (!(eta_star > 0.0)) throw EdrUnachievable("EDR bound unachievable: the SD pair cannot be served", 0.0);
  std::vector<ParetoPoint> points(steps);
  std::vector<std::string> errors(steps);
  const int threads = std::max(1, jobs);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads) if (threads > 1)
  for (int i = 0; i < steps; ++i) {
    ParetoPoint& p = points[i];
    p.delta = eta_star * (i + 1) / steps;
    const auto start = std::chrono::steady_clock::now();
    try {
      FendiSolution sol;
      try {
        sol = solve_fendi(net, s, t, p.delta, eps, opts);
      } catch (const EdrUnachievable&) {
        sol = solve_fendi(net, s, t, p.delta * (1.0 - kEdrSlack), eps, opts);
        p.retried = true;
      }
      p.worst_fidelity = sol.worst_fidelity;
      p.z_plus = sol.z_plus;
      p.eta = sol.eta;
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
    p.solve_millis =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }
  for (const auto& e : errors) {
    if (!e.empty()) throw Error("pareto sweep failed: " + e);
  }
  for (int i = steps - 2; i >= 0; --i) {
    if (points[i].worst_fidelity < points[i + 1].worst_fidelity) {
      points[i].worst_fidelity = points[i + 1].worst_fidelity;
      points[i].z_plus = points[i + 1].z_plus;
      points[i].eta = points[i + 1].eta;
      points[i].repaired = true;
    }
  }
  return points;
}

std::string pareto_csv(const std::vector<ParetoPoint>& points, const std::string& comment) {
  std::string out;
  if (!comment.empty()) out += "# " + comment + "\n";
  out += "delta,eta,worst_fidelity,z_plus,solve_ms\n";
  char buf[256];
  for (const auto& p : points) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.3f\n", p.delta, p.eta,
                  p.worst_fidelity, p.z_plus, p.solve_millis);
    out += buf;
  }
  return out;
}

nlohmann::json fendi_to_json(const FendiSolution& sol, const Network& net) {
  const auto& st = sol.stats;
  return {{"delta", sol.delta},
          {"eps", sol.eps},
          {"eta", sol.eta},
          {"z_plus", sol.z_plus},
          {"worst_fidelity", sol.worst_fidelity},
          {"min_pflow_fidelity", sol.min_pflow_fidelity},
          {"stats",
           {{"lb", st.initial.lb},
            {"ub", st.initial.ub},
            {"stage1_lb", st.after_stage1.lb},
            {"stage1_ub", st.after_stage1.ub},
            {"stage1_iterations", st.stage1_iterations},
            {"stage2_iterations", st.stage2_iterations},
            {"theta", st.theta},
            {"z_lb_initial", st.z_lb_initial},
            {"z_ub_initial", st.z_ub_initial},
            {"z_final", st.z_final},
            {"fored_solves", st.fored_solves}}},
          {"pflows", pflows_to_json(sol.pflows, net)},
          {"layered", layered_to_json(sol.layered, net)}};
}

}  // namespace fendi
