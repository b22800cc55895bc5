#pragma once

// Example models shipped in models/*.model, embedded at build time.

#include <map>
#include <string>
#include <string_view>

#include "affective/model.hpp"

namespace affective::examples {

/// Model name (file stem) -> document text.
const std::map<std::string, std::string, std::less<>>& builtin_models();

/// Loads a built-in model by name; throws ModelError for an unknown name.
InteractionModel builtin(std::string_view name);

/// Resolves "builtin:<name>" or a file path.
InteractionModel resolve(const std::string& spec);

}  // namespace affective::examples
