#pragma once

#include <filesystem>
#include <string>
#include <type_traits>
#include <vector>

#include "json.hpp"

namespace perronlab::cli {

using Json = nlohmann::ordered_json;

/// 17 significant digits, '.' decimal, no locale; "inf", "-inf", "nan" for
/// non-finite values.
std::string format_number(double v);
/// Shortest text that reads back to the same double.
std::string format_shortest(double v);

/// RFC 4180 table: CRLF line ends, fields quoted when they hold a comma,
/// quote or line break.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  CsvTable& row(std::vector<std::string> cells);
  std::string str() const;

 private:
  std::vector<std::vector<std::string>> rows_;
};

std::string csv_field(const std::string& s);

/// JSON text with two-space indentation; numbers use format_number and
/// non-finite numbers become null.
std::string json_text(const Json& j);

/// Creates parent directories and writes the file in binary mode.
void write_file(const std::filesystem::path& path, const std::string& text);

template <typename T>
std::string cell(const T& v) {
  if constexpr (std::is_floating_point_v<T>) {
    return format_number(static_cast<double>(v));
  } else if constexpr (std::is_same_v<T, bool>) {
    return v ? "true" : "false";
  } else if constexpr (std::is_integral_v<T>) {
    return std::to_string(v);
  } else {
    return std::string(v);
  }
}

}  // namespace perronlab::cli
