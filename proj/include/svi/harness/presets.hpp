#pragma once

#include <string>
#include <vector>

#include "svi/harness/experiment.hpp"

namespace svi::harness {

const std::vector<std::string>& preset_names();
// Throws LookupError listing the valid names.
ExperimentSpec preset(const std::string& name);

// n log-spaced points from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, int n);

}  // namespace svi::harness
