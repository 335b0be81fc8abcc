#pragma once

#include <stdexcept>
#include <string>

namespace gga {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define GGA_ERROR(Name)                                   \
  class Name : public Error {                             \
   public:                                                \
    explicit Name(const std::string& what) : Error(what) {} \
  }

GGA_ERROR(UnsupportedTail);
GGA_ERROR(InfiniteRange);
GGA_ERROR(IncompatibleTransform);
GGA_ERROR(NotFertile);
GGA_ERROR(ClassMismatch);
GGA_ERROR(NotOffspring);
GGA_ERROR(TooLarge);
GGA_ERROR(SupportTooLarge);
GGA_ERROR(SpinMismatch);
GGA_ERROR(ParseError);
GGA_ERROR(ValidationError);
GGA_ERROR(UnknownSuite);

#undef GGA_ERROR

}  // namespace gga
