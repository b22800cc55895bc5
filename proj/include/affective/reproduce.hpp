#pragma once

// End-to-end reproduction runs for the built-in examples. Each run prints
// reference value, computed value, absolute difference and the per-row
// tolerance.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace affective::reproduce {

struct Row {
  std::string quantity;
  double reference = 0.0;
  double computed = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string note;
};

struct Report {
  std::string id;
  std::vector<Row> rows;
  bool passed() const;
};

/// linear-two-person, nonseparable, shifting-pos, shifting-neg,
/// shifting-mixed, economy.
const std::vector<std::string>& example_ids();

/// Throws std::invalid_argument for an unknown id.
Report run(std::string_view id, std::uint64_t seed = 42);

std::string format_table(const Report& report);
nlohmann::json to_json(const Report& report);

}  // namespace affective::reproduce
