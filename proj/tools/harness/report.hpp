#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace rmtlab::harness {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchemaName = "rmtlab.summary";
inline constexpr int kSchemaVersion = 1;

/// One per-replica (or per-row) record; non-finite values are stored as null.
Json record(const std::string& group, double value, Json fields = Json::object());

/// Per-group {count, valid, mean, median, standard_error} over the finite values.
/// Depends only on the records, so it can be recomputed from the summary.
Json aggregate(const Json& records);

struct Acceptance {
  std::string rule;
  double value;
  double lo;
  double hi;
  bool pass() const { return value >= lo && value <= hi; }
};

Json to_json(const std::vector<Acceptance>& rules);

/// Header line, then one row per entry, 17 significant digits.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace rmtlab::harness
