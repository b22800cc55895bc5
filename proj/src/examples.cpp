#include "affective/examples.hpp"

namespace affective::examples {

InteractionModel builtin(std::string_view name) {
  const auto& models = builtin_models();
  auto it = models.find(name);
  if (it == models.end()) throw ModelError("unknown built-in model '" + std::string(name) + "'", 0);
  return InteractionModel::load(it->second);
}

InteractionModel resolve(const std::string& spec) {
  constexpr std::string_view kPrefix = "builtin:";
  if (spec.rfind(kPrefix, 0) == 0) return builtin(std::string_view(spec).substr(kPrefix.size()));
  return load_model_file(spec);
}

}  // namespace affective::examples
