#include "designgap/report.hpp"

#include <charconv>
#include <cmath>
#include <set>

#include <json.hpp>

namespace designgap {

Record& Record::set(const std::string& key, Value v) {
  for (auto& [k, old] : fields) {
    if (k == key) {
      old = std::move(v);
      return *this;
    }
  }
  fields.emplace_back(key, std::move(v));
  return *this;
}

const Value* Record::find(const std::string& key) const {
  for (const auto& [k, v] : fields) {
    if (k == key) return &v;
  }
  return nullptr;
}

std::vector<std::string> Report::csv_columns() const {
  if (!columns.empty()) return columns;
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& r : records) {
    for (const auto& [k, v] : r.fields) {
      if (seen.insert(k).second) out.push_back(k);
    }
  }
  return out;
}

std::string format_value(const Value& v) {
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  if (const auto* b = std::get_if<bool>(&v)) return *b ? "true" : "false";
  if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  const double d = std::get<double>(v);
  if (std::isnan(d)) return "nan";
  if (std::isinf(d)) return d > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, d, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

nlohmann::ordered_json to_json_value(const Value& v) {
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  if (const auto* b = std::get_if<bool>(&v)) return *b;
  if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
  const double d = std::get<double>(v);
  // JSON has no inf/nan; keep the CSV spelling as a string.
  if (!std::isfinite(d)) return format_value(v);
  return d;
}

}  // namespace

std::string to_csv(const Report& r) {
  std::string out;
  for (const auto& [k, v] : r.meta) out += "# " + k + "=" + format_value(v) + "\n";
  const auto cols = r.csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + csv_escape(cols[i]);
  out += "\n";
  for (const auto& rec : r.records) {
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (i) out += ",";
      if (const Value* v = rec.find(cols[i])) out += csv_escape(format_value(*v));
    }
    out += "\n";
  }
  return out;
}

std::string to_json(const Report& r) {
  nlohmann::ordered_json j;
  j["command"] = r.command;
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.meta) meta[k] = to_json_value(v);
  j["meta"] = meta;
  nlohmann::ordered_json recs = nlohmann::ordered_json::array();
  for (const auto& rec : r.records) {
    nlohmann::ordered_json o = nlohmann::ordered_json::object();
    for (const auto& [k, v] : rec.fields) o[k] = to_json_value(v);
    recs.push_back(std::move(o));
  }
  j["records"] = std::move(recs);
  return j.dump(2) + "\n";
}

}  // namespace designgap
