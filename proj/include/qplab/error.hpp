#pragma once

#include <stdexcept>
#include <string>

namespace qplab {

enum class ErrorCode {
  invalid_argument,
  precision_exhausted,
  index_out_of_range,
  selection_failed,
  scan_cap_exceeded,
  aliasing,
  branch_cut,
  winding_nonzero,
  exact_resonance,
  newton_divergence,
  hypothesis_violated,
  root_isolation,
  band_index_ambiguity,
  empty_set,
  cf_exhausted,
  decay_certificate,
  validation,
};

const char* to_string(ErrorCode c);

// Library errors carry the module that raised them so the CLI can report provenance.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, std::string module, const std::string& what)
      : std::runtime_error(module + ": " + what), code_(code), module_(std::move(module)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& module() const noexcept { return module_; }

  // hypothesis violations are "soft": the computation refused, nothing broke
  bool soft() const noexcept {
    return code_ == ErrorCode::hypothesis_violated || code_ == ErrorCode::exact_resonance;
  }

private:
  ErrorCode code_;
  std::string module_;
};

}  // namespace qplab
