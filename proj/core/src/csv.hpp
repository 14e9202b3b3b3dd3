#pragma once

#include <cstddef>
#include <istream>
#include <string>
#include <vector>

namespace recourse::detail {

// Minimal RFC-4180 record reader: quoted fields, doubled quotes, CRLF/LF,
// embedded newlines inside quotes.
class CsvReader {
 public:
  explicit CsvReader(std::istream& in) : in_(in) {}

  // Reads the next record into `fields`; false at end of input.
  bool next(std::vector<std::string>& fields);
  // 1-based physical line on which the last returned record started.
  std::size_t record_line() const noexcept { return record_line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 1;
  std::size_t record_line_ = 0;
};

std::string csv_escape(const std::string& field);

}  // namespace recourse::detail
