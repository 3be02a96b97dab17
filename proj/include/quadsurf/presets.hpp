#pragma once

#include "quadsurf/pencil.hpp"

#include <optional>
#include <string>
#include <vector>

namespace quadsurf {

struct Preset {
    std::string name;
    QuadPair pair;
    ClassLabel label;
};

// The eight normal forms, in a fixed order.
const std::vector<Preset> &normal_form_presets();
std::optional<Preset> find_preset(const std::string &name);

}  // namespace quadsurf
