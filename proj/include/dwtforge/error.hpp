// Error type shared by all dwtforge modules.
#pragma once

#include <stdexcept>
#include <string>

namespace dwtforge {

enum class Errc {
  IoFailure,          // unreadable or unwritable file
  UnsupportedFormat,  // PNG bit depth / color type outside the 8-bit RGB/Gray contract
  BadArgument,        // precondition violation: bounds, colorspace, parameter range
  DimensionMismatch,  // operands whose sizes must agree do not
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, Errc code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace dwtforge
