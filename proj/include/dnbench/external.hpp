#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "dnbench/image.hpp"

namespace dnb {

struct ExternalParams {
  /// Shell command template; "{in}" and "{out}" are replaced by quoted paths
  /// of the DNB1 input and expected DNB1 output files.
  std::string command;
  std::filesystem::path workdir = std::filesystem::temp_directory_path();
  double timeout_s = 600.0;
  int max_concurrent = 1;

  void validate() const;
};

struct ExternalResult {
  Image image;
  double subprocess_ms = 0.0;
};

/// Runs one external denoiser invocation in a fresh private directory under
/// params.workdir. Errors: Errc::external_exit (carries captured stderr),
/// Errc::external_timeout, Errc::external_missing_output and
/// Errc::shape_mismatch when the output shape differs from the input.
ExternalResult external_denoise(const ExternalParams& params, const Image& x);

/// Caps the number of concurrently running subprocesses.
class ProcessLimiter {
 public:
  explicit ProcessLimiter(int max_concurrent);
  ~ProcessLimiter();
  ProcessLimiter(const ProcessLimiter&) = delete;
  ProcessLimiter& operator=(const ProcessLimiter&) = delete;

  ExternalResult run(const ExternalParams& params, const Image& x);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace dnb
