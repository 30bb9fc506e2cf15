#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace surco {

/// Minimal RFC 4180 writer: fields containing a comma, quote or line break are
/// quoted and embedded quotes doubled; records end with CRLF.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void row(const std::vector<std::string>& fields);

  static std::string quote(std::string_view field);

 private:
  std::ostream& out_;
};

/// Round-trippable decimal text for a double ("inf"/"-inf"/"nan" for non-finite).
std::string format_double(double v);

/// Splits one RFC 4180 document into records (used by tests and the tool).
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

}  // namespace surco
