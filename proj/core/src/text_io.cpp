#include "text_io.hpp"

#include <charconv>
#include <sstream>

namespace aim::detail {

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream iss(s);
  std::string tok;
  while (iss >> tok) out.push_back(tok);
  return out;
}

std::vector<std::string> split_on(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const std::size_t end = s.find(sep, start);
    if (end == std::string::npos) {
      out.push_back(s.substr(start));
      break;
    }
    out.push_back(s.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

double parse_double(const std::string& tok, const std::string& field, std::size_t offset) {
  double value = 0.0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
    throw ParseError(field, offset, "bad float '" + tok + "'");
  }
  return value;
}

long long parse_int(const std::string& tok, const std::string& field, std::size_t offset) {
  long long value = 0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
    throw ParseError(field, offset, "bad integer '" + tok + "'");
  }
  return value;
}

bool LineScanner::next(std::string& line, std::size_t& offset) {
  while (pos_ < data_.size()) {
    offset = pos_;
    const std::size_t nl = data_.find('\n', pos_);
    const std::size_t end = nl == std::string::npos ? data_.size() : nl;
    line = data_.substr(pos_, end - pos_);
    pos_ = nl == std::string::npos ? data_.size() : nl + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    // Skip blanks and comments.
    std::size_t first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    return true;
  }
  return false;
}

}  // namespace aim::detail
