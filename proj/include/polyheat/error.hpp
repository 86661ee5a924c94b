#pragma once

#include <stdexcept>
#include <string>

namespace polyheat {

enum class ErrorCode {
  invalid_argument,
  order_too_low,
  inadmissible_alpha,
  degenerate,
  window_too_small,
  shift_too_small,
  outside_asymptotic_regime,
  dimension_mismatch,
  dimension_unsupported,
  state_explosion,
  incommensurate_frequency,
  aliasing,
  bad_length,
  unconverged,
  malformed_config,
};

/// Error raised by every fatal failure in the library. The message starts
/// with a short stable tag ("inadmissible alpha", "state explosion", ...)
/// followed by details.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace polyheat
