#include "harness/report.hpp"

#include <cmath>
#include <fstream>
#include <map>

#include "harness/config.hpp"
#include "rmtlab/errors.hpp"
#include "rmtlab/stats.hpp"

namespace rmtlab::harness {

Json record(const std::string& group, double value, Json fields) {
  Json r = Json::object();
  r["group"] = group;
  r["value"] = std::isfinite(value) ? Json(value) : Json(nullptr);
  for (auto& [k, v] : fields.items()) r[k] = v;
  return r;
}

Json aggregate(const Json& records) {
  std::map<std::string, std::pair<int, std::vector<double>>> groups;
  std::vector<std::string> order;
  for (const auto& r : records) {
    const auto g = r.at("group").get<std::string>();
    if (!groups.count(g)) order.push_back(g);
    auto& [count, values] = groups[g];
    ++count;
    if (!r.at("value").is_null()) values.push_back(r.at("value").get<double>());
  }
  Json out = Json::object();
  for (const auto& g : order) {
    const auto& [count, v] = groups[g];
    Json a = {{"count", count}, {"valid", v.size()}};
    a["mean"] = v.empty() ? Json(nullptr) : Json(stats::mean(v));
    a["median"] = v.empty() ? Json(nullptr) : Json(stats::median(v));
    a["standard_error"] = v.size() < 2 ? Json(nullptr) : Json(stats::standard_error(v));
    out[g] = a;
  }
  return out;
}

Json to_json(const std::vector<Acceptance>& rules) {
  Json out = Json::array();
  auto num = [](double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); };
  for (const auto& a : rules) {
    out.push_back({{"rule", a.rule}, {"value", num(a.value)}, {"lo", num(a.lo)}, {"hi", num(a.hi)}, {"pass", a.pass()}});
  }
  return out;
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::string text;
  for (std::size_t i = 0; i < header.size(); ++i) text += (i ? "," : "") + header[i];
  text += "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) text += (i ? "," : "") + format_real(row[i]);
    text += "\n";
  }
  write_text(path, text);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::ConfigError, "cannot write " + path.string());
  os << text;
}

}  // namespace rmtlab::harness
