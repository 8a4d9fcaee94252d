#pragma once

// Named systems, measures and models with their closed-form reference values.

#include <optional>
#include <string>
#include <vector>

#include "thermo/dimension.hpp"
#include "thermo/measures.hpp"
#include "thermo/symbolic.hpp"

namespace thermo::builtins {

std::optional<Subshift> system(const std::string &name);
std::vector<std::string> system_names();

// Measures are defined relative to an alphabet size; nullopt if the name is
// unknown or does not fit the alphabet.
std::optional<MeasureSpec> measure(const std::string &name, int alphabet_size);
std::vector<std::string> measure_names();

std::optional<RepellerModel> repeller(const std::string &name);
std::optional<HyperbolicModel> hyperbolic(const std::string &name);

// Human-readable catalog with reference values, one entry per line.
std::string catalog();

}  // namespace thermo::builtins
