#pragma once

#include <cstdint>

#include "fendi/network.hpp"

namespace fendi::testing {

// A - B - C, unit capacities, lossless links, q_B = 0.5.
inline Network chain(double fidelity = 0.9) {
  Network net;
  net.add_node("A");
  net.add_node("B", NodeParams{0.5, 1.0});
  net.add_node("C");
  net.add_link(0, 1, 1, 1.0, fidelity);
  net.add_link(1, 2, 1, 1.0, fidelity);
  return net;
}

// Two nodes joined by three unit-capacity lossless links.
inline Network parallel_links() {
  Network net;
  net.add_node("A");
  net.add_node("B");
  net.add_link(0, 1, 1, 1.0, 0.95);
  net.add_link(0, 1, 1, 1.0, 0.85);
  net.add_link(0, 1, 1, 1.0, 0.75);
  return net;
}

// Small connected random graph with heterogeneous parameters.
inline Network small_random(std::uint64_t seed, int nodes) {
  WaxmanOptions o;
  o.nodes = nodes;
  o.seed = seed;
  o.alpha = 0.6;
  o.beta = 0.9;
  o.node_q = {0.4, 1.0};
  o.node_w = {0.9, 1.0};
  o.link_q = {0.5, 1.0};
  o.link_fidelity = {0.75, 0.99};
  o.capacity_lo = 1;
  o.capacity_hi = 6;
  return waxman_generate(o);
}

}  // namespace fendi::testing
