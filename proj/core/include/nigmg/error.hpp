#pragma once

#include <stdexcept>
#include <string>

namespace nigmg {

enum class ErrorKind {
  length,          // non-dyadic or mismatched lengths
  domain,          // parameter or input value outside its admissible set
  shape,           // inconsistent container sizes
  range,           // a target that cannot be reached
  refused,         // work deliberately declined (size guards)
  initialization,  // objective not finite at the starting point
  parse,           // malformed text input
  design,          // unusable factor design
  internal,        // broken invariant
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool ok, ErrorKind kind, const std::string& what) {
  if (!ok) fail(kind, what);
}

}  // namespace nigmg
