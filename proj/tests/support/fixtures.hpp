#pragma once

#include <filesystem>
#include <string>

#include "lwb/component.hpp"

namespace lwb::test {

std::filesystem::path sample_path(const std::string& rel);
std::string read_text(const std::filesystem::path& p);

/// Component for a single grammar given as text; aborts the test on error.
ComponentPtr component_from_text(const std::string& grammar, std::vector<std::string> start = {}, int k = 0);
/// Component for a sample grammar file (relative to samples/grammars).
ComponentPtr component_from_sample(const std::string& file, std::vector<std::string> start = {}, int k = 0);

/// Composition from a config under samples/compositions; aborts on error.
Composition composition_from_sample(const std::string& config);

/// Fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& tag);

}  // namespace lwb::test
