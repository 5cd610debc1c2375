#pragma once

// Tabular run reports serialised as CSV (17 significant digits, no locale)
// or JSON.

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace designgap {

using Value = std::variant<std::string, double, std::int64_t, bool>;

/// Ordered field list; absent fields serialise as empty CSV cells.
struct Record {
  std::vector<std::pair<std::string, Value>> fields;

  Record& set(const std::string& key, Value v);
  const Value* find(const std::string& key) const;
};

struct Report {
  std::string command;
  /// Budgets and guardrails in force for the run.
  std::vector<std::pair<std::string, Value>> meta;
  /// Column order for CSV; when empty, columns are the union of record keys in
  /// first-seen order.
  std::vector<std::string> columns;
  std::vector<Record> records;

  std::vector<std::string> csv_columns() const;
};

/// %.17g without locale dependence; integers and booleans verbatim.
std::string format_value(const Value& v);

/// Header line, then one line per record. Meta values become leading
/// `# key=value` comment lines.
std::string to_csv(const Report& r);
std::string to_json(const Report& r);

}  // namespace designgap
