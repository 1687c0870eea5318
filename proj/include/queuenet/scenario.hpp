#pragma once
// Scenario files: TOML-style sections resolved into a validated Scenario.

#include <iosfwd>
#include <string>

#include "queuenet/config.hpp"

namespace queuenet {

// Relative side-file paths are resolved against `base_dir`.
Scenario parse_scenario(std::istream& in, const std::string& base_dir = ".");
Scenario load_scenario(const std::string& path);

// Fully explicit form: every field written, rate profiles inlined.
void write_scenario(std::ostream& out, const Scenario& scenario);
std::string scenario_to_string(const Scenario& scenario);

}  // namespace queuenet
