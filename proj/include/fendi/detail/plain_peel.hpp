#pragma once

#include "fendi/detail/peel.hpp"
#include "fendi/eflow.hpp"

namespace fendi::detail {

// Peel graph of a plain eflow: slot = dense enode index m * |N| + n, vars =
// links first, then the eflow's swap entries in map order.
struct PlainPeel {
  PeelGraph graph;
  std::vector<SwapKey> keys;
};
PlainPeel build_plain_peel(const Eflow& ef, const Network& net);

}  // namespace fendi::detail
