#pragma once

#include <string>
#include <vector>

namespace migsim {

// Built-in experiment presets, stored as config text so the CLI and tests
// go through the same parsing path as user files.
std::vector<std::string> preset_names();
bool is_preset(const std::string& name);
const std::string& preset_toml(const std::string& name);

}  // namespace migsim
