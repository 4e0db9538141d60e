#pragma once

#include <stdexcept>
#include <string>

namespace asl {

// Failure categories surfaced by the library. The CLI maps invalid_config to
// exit code 2 and everything else to exit code 3.
enum class Errc {
  non_convergence,
  not_primitive,
  topology_invalid,
  eigenvector_incompatible,
  support_violation,
  divergent,
  root_not_bracketed,
  integration_failure,
  no_negative_root,
  no_conflicting_agents,
  conflicting_agents_present,
  degenerate_variance,
  domain_error,
  not_reached,
  invalid_config,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace asl
