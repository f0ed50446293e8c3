#include "nigmg/error.hpp"

namespace nigmg {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::length: return "length";
    case ErrorKind::domain: return "domain";
    case ErrorKind::shape: return "shape";
    case ErrorKind::range: return "range";
    case ErrorKind::refused: return "refused";
    case ErrorKind::initialization: return "initialization";
    case ErrorKind::parse: return "parse";
    case ErrorKind::design: return "design";
    case ErrorKind::internal: return "internal";
  }
  return "unknown";
}

}  // namespace nigmg
