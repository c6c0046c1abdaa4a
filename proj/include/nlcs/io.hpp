#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

namespace nlcs::io {

/// Shortest round-trippable form with up to 17 significant digits; "nan", "inf", "-inf" for non-finite values.
std::string format_double(double v);
/// Empty field for an undefined value.
std::string format_optional(const std::optional<double>& v);

/// Comma-separated rows with LF line endings.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void row(const std::vector<std::string>& fields);
  void row_numbers(const std::vector<double>& values);
  [[nodiscard]] const std::string& str() const { return out_; }

 private:
  std::size_t columns_;
  std::string out_;
};

/// Writes content verbatim; "-" means stdout. Throws std::runtime_error on I/O failure.
void write_output(const std::string& path, const std::string& content);

/// JSON text with a trailing newline.
std::string dump_json(const nlohmann::json& j);

}  // namespace nlcs::io
