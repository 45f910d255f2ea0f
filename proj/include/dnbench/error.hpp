#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dnb {

/// Error categories surfaced by the library. Each failure mode named in the
/// public contracts maps to exactly one code so callers can branch on it.
enum class Errc {
  io_unreadable,
  io_unwritable,
  unsupported_bit_depth,
  bad_magic,
  truncated,
  out_of_bounds,
  too_small,
  shape_mismatch,
  invalid_argument,
  backend_failed,
  external_exit,
  external_timeout,
  external_missing_output,
  empty_input,
  image_set_mismatch,
  config,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace dnb
