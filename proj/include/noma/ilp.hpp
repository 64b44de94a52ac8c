#pragma once

#include <string>

#include "noma/model.hpp"

namespace noma {

// Emits the binary-power scheduling problem as a CPLEX LP-format integer
// program. Variables x_i_j_t (device i transmits in slot j of frame t at full
// power) and z_i_t (device i served in frame t) are created only where serving
// is possible at all: inside the demand window, with a packet, and with enough
// power to decode alone. The sequential decoding condition is linearized per
// slot with a big-M row that is inactive while x_i_j_t = 0.
//
// Only devices with power_level == 1 are supported; instances with a finer
// power lattice have no binary-power equivalent and are rejected with
// std::invalid_argument.
std::string export_ilp(const Instance& inst);

}  // namespace noma
