#include "fendi/eflow.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fendi/detail/plain_peel.hpp"
#include "fendi/error.hpp"

namespace fendi {

Enode make_enode(NodeIndex a, NodeIndex b) {
  if (a == b) throw InvalidArgument("enode endpoints must differ");
  return a < b ? Enode{a, b} : Enode{b, a};
}

bool contains(Enode e, NodeIndex v) { return e.m == v || e.n == v; }

Eflow Eflow::zero(const Network& net, NodeIndex s, NodeIndex t) {
  Eflow ef;
  ef.s = s;
  ef.t = t;
  ef.g.assign(net.num_links(), 0.0);
  return ef;
}

namespace {

int dense(const Network& net, Enode e) { return e.m * net.num_nodes() + e.n; }

}  // namespace

Balance compute_balance(const Eflow& ef, const Network& net) {
  const std::size_t size = static_cast<std::size_t>(net.num_nodes()) * net.num_nodes();
  Balance b{std::vector<double>(size, 0.0), std::vector<double>(size, 0.0)};
  for (int l = 0; l < net.num_links(); ++l) {
    const Link& link = net.link(l);
    b.produced[dense(net, make_enode(link.a, link.b))] += link.q * link.capacity * ef.g[l];
  }
  for (const auto& [key, v] : ef.x) {
    b.produced[dense(net, key.target)] += net.node(key.k).params.q * v;
    b.consumed[dense(net, key.low())] += v;
    b.consumed[dense(net, key.high())] += v;
  }
  return b;
}

double compute_I(const Eflow& ef, const Network& net, Enode mn) {
  double r = 0.0;
  for (LinkIndex l : net.links_between(mn.m, mn.n)) {
    r += net.link(l).q * net.link(l).capacity * ef.g[l];
  }
  for (auto it = ef.x.lower_bound(SwapKey{mn, -1}); it != ef.x.end() && it->first.target == mn;
       ++it) {
    r += net.node(it->first.k).params.q * it->second;
  }
  return r;
}

double compute_Omega(const Eflow& ef, const Network&, Enode mn) {
  double r = 0.0;
  for (const auto& [key, v] : ef.x) {
    if (key.low() == mn || key.high() == mn) r += v;
  }
  return r;
}

OredModel build_ored_model(const Network& net, NodeIndex s, NodeIndex t) {
  const Enode st = make_enode(s, t);
  const int n = net.num_nodes();
  const auto comp = net.component_of(s);
  OredModel model;
  model.g_var.assign(net.num_links(), -1);
  auto& p = model.problem;

  // Terms of I(mn) and Omega(mn) per dense enode.
  std::vector<std::vector<lp::Term>> produce(static_cast<std::size_t>(n) * n);
  std::vector<std::vector<lp::Term>> consume(static_cast<std::size_t>(n) * n);

  for (int l = 0; l < net.num_links(); ++l) {
    const Link& link = net.link(l);
    if (!comp[link.a] || link.q <= 0.0) continue;
    auto v = p.add_variable("g_" + link_key(net, l), 0.0, 1.0);
    model.g_var[l] = v.index;
    produce[dense(net, make_enode(link.a, link.b))].push_back({v, link.q * link.capacity});
  }
  for (int m = 0; m < n; ++m) {
    if (!comp[m]) continue;
    for (int k = 0; k < n; ++k) {
      if (!comp[k] || k == m || net.node(k).params.q <= 0.0) continue;
      for (int o = m + 1; o < n; ++o) {
        if (!comp[o] || o == k) continue;
        SwapKey key{Enode{m, o}, k};
        if (key.low() == st || key.high() == st) continue;
        auto v = p.add_variable("x_" + enode_key(net, key.target) + "|" + net.node(k).id);
        model.x_var.emplace_back(key, v.index);
        produce[dense(net, key.target)].push_back({v, net.node(k).params.q});
        consume[dense(net, key.low())].push_back({v, -1.0});
        consume[dense(net, key.high())].push_back({v, -1.0});
      }
    }
  }
  for (const auto& term : produce[dense(net, st)]) p.set_objective(term.var, term.coef);
  for (int m = 0; m < n; ++m) {
    for (int o = m + 1; o < n; ++o) {
      const Enode e{m, o};
      if (e == st) continue;
      auto terms = produce[dense(net, e)];
      const auto& c = consume[dense(net, e)];
      if (terms.empty() && c.empty()) continue;
      terms.insert(terms.end(), c.begin(), c.end());
      p.add_constraint(std::move(terms), lp::Sense::kEqual, 0.0, "bal_" + enode_key(net, e));
    }
  }
  return model;
}

OredResult solve_ored(const Network& net, NodeIndex s, NodeIndex t) {
  if (s == t) throw InvalidArgument("source and destination must differ");
  OredResult res;
  res.eflow = Eflow::zero(net, s, t);
  if (!net.component_of(s)[t]) return res;
  OredModel model = build_ored_model(net, s, t);
  const lp::Solution sol = lp::solve(model.problem);
  res.lp_iterations = sol.iterations;
  if (sol.status == lp::Status::kUnbounded) throw lp::NumericalError("ored: LP reported unbounded");
  if (sol.status != lp::Status::kOptimal) throw lp::NumericalError("ored: LP reported infeasible");
  for (int l = 0; l < net.num_links(); ++l) {
    if (model.g_var[l] >= 0) res.eflow.g[l] = std::clamp(sol.values[model.g_var[l]], 0.0, 1.0);
  }
  for (const auto& [key, var] : model.x_var) {
    const double v = sol.values[var];
    if (v > 0.0) res.eflow.x[key] = v;
  }
  res.eflow.eta = compute_I(res.eflow, net, res.eflow.sd());
  res.eta = res.eflow.eta;
  return res;
}

std::string ValidationReport::summary() const {
  if (ok) return "ok";
  std::ostringstream out;
  for (std::size_t i = 0; i < violations.size(); ++i) {
    if (i) out << "; ";
    out << violations[i].what << " (" << violations[i].magnitude << ")";
  }
  return out.str();
}

ValidationReport validate_eflow(const Network& net, const Eflow& ef, double tol) {
  ValidationReport rep;
  auto fail = [&](std::string what, double mag) {
    rep.ok = false;
    rep.violations.push_back({std::move(what), mag});
  };
  if (static_cast<int>(ef.g.size()) != net.num_links()) {
    fail("g has wrong length", std::abs(static_cast<double>(ef.g.size()) - net.num_links()));
    return rep;
  }
  const double scale = std::max(1.0, std::abs(ef.eta));
  for (int l = 0; l < net.num_links(); ++l) {
    if (ef.g[l] < -tol) fail("g[" + link_key(net, l) + "] negative", -ef.g[l]);
    if (ef.g[l] > 1.0 + tol) fail("g[" + link_key(net, l) + "] above 1", ef.g[l] - 1.0);
  }
  for (const auto& [key, v] : ef.x) {
    if (v < -tol * scale) {
      fail("x[" + enode_key(net, key.target) + "|" + net.node(key.k).id + "] negative", -v);
    }
  }
  const Balance b = compute_balance(ef, net);
  const Enode st = ef.sd();
  const int n = net.num_nodes();
  for (int m = 0; m < n; ++m) {
    for (int o = m + 1; o < n; ++o) {
      const Enode e{m, o};
      const double in = b.produced[dense(net, e)];
      const double out = b.consumed[dense(net, e)];
      if (e == st) {
        if (out > tol * scale) fail("Omega(" + enode_key(net, e) + ") must be 0", out);
        if (std::abs(in - ef.eta) > tol * scale) {
          fail("eta differs from I(" + enode_key(net, e) + ")", std::abs(in - ef.eta));
        }
      } else if (std::abs(in - out) > tol * scale) {
        fail("conservation at " + enode_key(net, e), std::abs(in - out));
      }
    }
  }
  return rep;
}

InducedGraph induced_graph(const Eflow& ef, const Network& net) {
  InducedGraph g;
  const Balance b = compute_balance(ef, net);
  const int n = net.num_nodes();
  for (int m = 0; m < n; ++m) {
    for (int o = m + 1; o < n; ++o) {
      if (b.produced[dense(net, Enode{m, o})] > 0.0) g.vertices.push_back(Enode{m, o});
    }
  }
  for (int l = 0; l < net.num_links(); ++l) {
    if (ef.g[l] <= 0.0) continue;
    const Link& link = net.link(l);
    g.edges.push_back({std::nullopt, make_enode(link.a, link.b), l, -1,
                       link.q * link.capacity * ef.g[l]});
  }
  for (const auto& [key, v] : ef.x) {
    if (v <= 0.0) continue;
    g.edges.push_back({key.low(), key.target, -1, key.k, v});
    g.edges.push_back({key.high(), key.target, -1, key.k, v});
  }
  return g;
}

namespace detail {

PlainPeel build_plain_peel(const Eflow& ef, const Network& net) {
  const int n = net.num_nodes();
  PlainPeel out;
  PeelGraph& pg = out.graph;
  pg.ways.resize(static_cast<std::size_t>(n) * n);
  pg.slots.resize(pg.ways.size());
  pg.slot_names.resize(pg.ways.size());
  for (int m = 0; m < n; ++m) {
    for (int o = m + 1; o < n; ++o) {
      pg.slots[dense(net, Enode{m, o})] = PeelSlot{m, o, 0};
      pg.slot_names[dense(net, Enode{m, o})] = enode_key(net, Enode{m, o});
    }
  }
  for (int l = 0; l < net.num_links(); ++l) {
    const Link& link = net.link(l);
    pg.values.push_back(ef.g[l]);
    pg.ways[dense(net, make_enode(link.a, link.b))].push_back(
        PeelWay{true, l, link.q * link.capacity, -1, -1, l, -1});
  }
  for (const auto& [key, v] : ef.x) {
    const int var = static_cast<int>(pg.values.size());
    pg.values.push_back(v);
    out.keys.push_back(key);
    pg.ways[dense(net, key.target)].push_back(PeelWay{false, var, net.node(key.k).params.q,
                                                      dense(net, key.low()),
                                                      dense(net, key.high()), -1, key.k});
  }
  pg.roots = {dense(net, ef.sd())};
  return out;
}

}  // namespace detail

Eflow prune_noncontributing(const Eflow& ef, const Network& net) {
  auto pp = detail::build_plain_peel(ef, net);
  const auto res = detail::peel(std::move(pp.graph), ef.eta);
  Eflow out = Eflow::zero(net, ef.s, ef.t);
  for (int l = 0; l < net.num_links(); ++l) out.g[l] = std::min(1.0, res.consumed[l]);
  for (std::size_t i = 0; i < pp.keys.size(); ++i) {
    const double v = res.consumed[net.num_links() + i];
    if (v > 0.0) out.x[pp.keys[i]] = v;
  }
  out.eta = compute_I(out, net, out.sd());
  return out;
}

int count_nonzero(const Eflow& ef) {
  int c = 0;
  for (double v : ef.g) c += v > 0.0;
  for (const auto& [_, v] : ef.x) c += v > 0.0;
  return c;
}

std::string enode_key(const Network& net, Enode e) {
  return net.node(e.m).id + "|" + net.node(e.n).id;
}

std::string link_key(const Network& net, LinkIndex l) {
  const Link& link = net.link(l);
  const Enode e = make_enode(link.a, link.b);
  std::string key = enode_key(net, e);
  const auto parallel = net.links_between(link.a, link.b);
  if (parallel.size() > 1) {
    const auto pos = std::find(parallel.begin(), parallel.end(), l) - parallel.begin();
    key += "#" + std::to_string(pos);
  }
  return key;
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  return parts;
}

}  // namespace

LinkIndex parse_link_key(const Network& net, const std::string& key) {
  std::string base = key;
  std::size_t ordinal = 0;
  bool explicit_ordinal = false;
  if (auto hash = key.rfind('#'); hash != std::string::npos) {
    base = key.substr(0, hash);
    try {
      ordinal = std::stoul(key.substr(hash + 1));
    } catch (const std::exception&) {
      throw ParseError("bad link key '" + key + "'");
    }
    explicit_ordinal = true;
  }
  const auto parts = split(base, '|');
  if (parts.size() != 2) throw ParseError("bad link key '" + key + "'");
  const auto a = net.find_node(parts[0]);
  const auto b = net.find_node(parts[1]);
  if (!a || !b) throw ParseError("link key '" + key + "' names an unknown node");
  const auto parallel = net.links_between(*a, *b);
  if (parallel.empty()) throw ParseError("no link for key '" + key + "'");
  if (!explicit_ordinal && parallel.size() > 1) {
    throw ParseError("link key '" + key + "' is ambiguous between parallel links");
  }
  if (ordinal >= parallel.size()) throw ParseError("link ordinal out of range in '" + key + "'");
  return parallel[ordinal];
}

nlohmann::json eflow_to_json(const Eflow& ef, const Network& net) {
  nlohmann::json g = nlohmann::json::object();
  for (int l = 0; l < net.num_links(); ++l) {
    if (ef.g[l] > 0.0) g[link_key(net, l)] = ef.g[l];
  }
  nlohmann::json x = nlohmann::json::object();
  for (const auto& [key, v] : ef.x) {
    if (v > 0.0) x[enode_key(net, key.target) + "|" + net.node(key.k).id] = v;
  }
  return {{"s", net.node(ef.s).id}, {"t", net.node(ef.t).id}, {"eta", ef.eta}, {"g", g}, {"x", x}};
}

Eflow eflow_from_json(const nlohmann::json& doc, const Network& net) {
  try {
    const NodeIndex s = net.node_index(doc.at("s").get<std::string>());
    const NodeIndex t = net.node_index(doc.at("t").get<std::string>());
    Eflow ef = Eflow::zero(net, s, t);
    for (const auto& [key, v] : doc.at("g").items()) ef.g[parse_link_key(net, key)] = v.get<double>();
    for (const auto& [key, v] : doc.at("x").items()) {
      const auto parts = split(key, '|');
      if (parts.size() != 3) throw ParseError("bad swap key '" + key + "'");
      SwapKey k{make_enode(net.node_index(parts[0]), net.node_index(parts[1])),
                net.node_index(parts[2])};
      if (contains(k.target, k.k)) throw ParseError("swap node lies on its own target in '" + key + "'");
      ef.x[k] = v.get<double>();
    }
    ef.eta = doc.contains("eta") ? doc.at("eta").get<double>() : compute_I(ef, net, ef.sd());
    return ef;
  } catch (const ParseError&) {
    throw;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("eflow: ") + e.what());
  } catch (const Error& e) {
    throw ParseError(std::string("eflow: ") + e.what());
  }
}

}  // namespace fendi
