#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include "aim/envmodel.hpp"

namespace aim {

/// Parse failure for any of the text formats; carries the offending field
/// and the byte offset into the input.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& field, std::size_t offset, const std::string& what)
      : std::runtime_error("parse error at byte " + std::to_string(offset) +
                           ", field '" + field + "': " + what),
        field_(field),
        offset_(offset) {}

  const std::string& field() const { return field_; }
  std::size_t offset() const { return offset_; }

 private:
  std::string field_;
  std::size_t offset_;
};

/// Serializes an MP objective as a length-prefixed structured text record.
/// Floats carry enough digits to reparse bit-exactly.
std::string serialize_objective(const MotionPlanningObjective& obj);

/// Inverse of serialize_objective; throws ParseError on malformed input.
MotionPlanningObjective deserialize_objective(const std::string& bytes);

/// Formats a double so that parsing recovers the identical bit pattern.
std::string format_double(double v);

}  // namespace aim
