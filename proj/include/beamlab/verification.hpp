#pragma once

#include <string>
#include <vector>

#include "beamlab/scenario.hpp"

namespace beamlab {

struct check_result {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Fixed-beam and sweep bursts of the scenario, checked at the register and RSRP level.
std::vector<check_result> verify_sweep(const scenario& base);

}  // namespace beamlab
