#pragma once

#include <string>
#include <vector>

#include "aim/wire.hpp"

namespace aim::detail {

std::vector<std::string> split_ws(const std::string& s);
std::vector<std::string> split_on(const std::string& s, char sep);

double parse_double(const std::string& tok, const std::string& field, std::size_t offset);
long long parse_int(const std::string& tok, const std::string& field, std::size_t offset);

/// Line-by-line scanner over a text buffer, tracking byte offsets so parse
/// errors can point at the offending location.
class LineScanner {
 public:
  explicit LineScanner(std::string data) : data_(std::move(data)) {}

  bool done() const { return pos_ >= data_.size(); }
  std::size_t pos() const { return pos_; }

  /// Next raw line (without newline); empty lines and '#' comments skipped.
  /// Returns false at end of input. `offset` receives the line start.
  bool next(std::string& line, std::size_t& offset);

 private:
  std::string data_;
  std::size_t pos_ = 0;
};

}  // namespace aim::detail
