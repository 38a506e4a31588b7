#pragma once

#include <stdexcept>
#include <string>

namespace geniemac {

enum class Errc {
  invalid_argument,
  not_degraded,
  not_positive_definite,
  out_of_range,
  parse,
  io,
  too_many_orderings,
};

/// Exception type thrown by every core routine. The code is what the C API
/// reports; the message is what `gm_last_error()` returns.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace geniemac
