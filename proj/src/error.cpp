#include "dnbench/error.hpp"

namespace dnb {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::io_unreadable: return "io_unreadable";
    case Errc::io_unwritable: return "io_unwritable";
    case Errc::unsupported_bit_depth: return "unsupported_bit_depth";
    case Errc::bad_magic: return "bad_magic";
    case Errc::truncated: return "truncated";
    case Errc::out_of_bounds: return "out_of_bounds";
    case Errc::too_small: return "too_small";
    case Errc::shape_mismatch: return "shape_mismatch";
    case Errc::invalid_argument: return "invalid_argument";
    case Errc::backend_failed: return "backend_failed";
    case Errc::external_exit: return "external_exit";
    case Errc::external_timeout: return "external_timeout";
    case Errc::external_missing_output: return "external_missing_output";
    case Errc::empty_input: return "empty_input";
    case Errc::image_set_mismatch: return "image_set_mismatch";
    case Errc::config: return "config";
  }
  return "unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace dnb
