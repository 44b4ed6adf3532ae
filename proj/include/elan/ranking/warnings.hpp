#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "elan/error.hpp"

namespace elan::ranking {

struct WarningRecord {
  std::string file;
  int line = 1;
  std::string message;
  std::optional<std::string> severity;  // passed through, never interpreted

  bool operator==(const WarningRecord&) const = default;
};

enum class WarningFormat { Gcc, Json };

inline WarningFormat parse_warning_format(const std::string& name) {
  if (name == "gcc") return WarningFormat::Gcc;
  if (name == "json") return WarningFormat::Json;
  throw std::invalid_argument("unknown warnings format '" + name + "' (expected gcc or json)");
}

struct NormalizedWarnings {
  std::vector<WarningRecord> records;
  std::uint32_t malformed = 0;
  std::uint32_t duplicates = 0;
  std::vector<std::string> diagnostics;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

class Collector {
 public:
  explicit Collector(NormalizedWarnings& out) : out_(out) {}

  void add(WarningRecord w) {
    if (!seen_.insert({w.file, w.line, w.message}).second) {
      ++out_.duplicates;
      return;
    }
    out_.records.push_back(std::move(w));
  }

  void reject(std::size_t index, const std::string& why) {
    ++out_.malformed;
    out_.diagnostics.push_back("warning " + std::to_string(index) + ": " + why);
  }

 private:
  NormalizedWarnings& out_;
  std::set<std::tuple<std::string, int, std::string>> seen_;
};

inline void read_gcc(std::istream& is, Collector& c) {
  // file:line: message   or   file:line:col: message
  static const std::regex re(R"(^(.+?):(\d+)(?::\d+)?:\s*(.*)$)");
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(is, raw)) {
    ++lineno;
    const std::string text = trim(raw);
    if (text.empty()) continue;
    std::smatch m;
    if (!std::regex_match(text, m, re)) {
      c.reject(lineno, "not in 'file:line: message' form");
      continue;
    }
    WarningRecord w;
    w.file = m[1];
    try {
      w.line = std::stoi(m[2]);
    } catch (const std::exception&) {
      c.reject(lineno, "bad line number");
      continue;
    }
    w.message = trim(m[3]);
    if (w.line < 1 || w.message.empty()) {
      c.reject(lineno, w.line < 1 ? "line must be >= 1" : "empty message");
      continue;
    }
    c.add(std::move(w));
  }
}

inline void read_json(std::istream& is, Collector& c) {
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw AnalysisError(std::string("warnings: ") + e.what());
  }
  if (!j.is_array()) throw AnalysisError("warnings: expected a JSON array");
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& item = j[i];
    if (!item.is_object() || !item.contains("file") || !item["file"].is_string() ||
        !item.contains("line") || !item["line"].is_number_integer() ||
        !item.contains("message") || !item["message"].is_string()) {
      c.reject(i + 1, "expected {file, line, message}");
      continue;
    }
    WarningRecord w;
    w.file = item["file"].get<std::string>();
    const auto line = item["line"].get<std::int64_t>();
    w.message = item["message"].get<std::string>();
    if (line < 1 || line > INT32_MAX || w.message.empty()) {
      c.reject(i + 1, "line must be >= 1 and message non-empty");
      continue;
    }
    w.line = static_cast<int>(line);
    if (item.contains("severity") && !item["severity"].is_null()) {
      const auto& s = item["severity"];
      w.severity = s.is_string() ? s.get<std::string>() : s.dump();
    }
    c.add(std::move(w));
  }
}

}  // namespace detail

/// Reads warnings in input order. Malformed entries are counted and skipped;
/// repeated (file, line, message) triples keep only the first occurrence.
inline NormalizedWarnings normalize_warnings(std::istream& is, WarningFormat format) {
  NormalizedWarnings out;
  detail::Collector c(out);
  if (format == WarningFormat::Gcc) {
    detail::read_gcc(is, c);
  } else {
    detail::read_json(is, c);
  }
  return out;
}

}  // namespace elan::ranking
