#pragma once

#include <stdexcept>
#include <string>

namespace envtrace {

// Error taxonomy mirrored by the CLI exit codes: input errors exit 1,
// degeneracy (tracer gave up on a structurally ill-posed instance) exits 2.
enum class ErrorKind { input, degeneracy, numeric };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string msg)
      : std::runtime_error(std::move(msg)), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail_input(const std::string& msg) {
  throw Error(ErrorKind::input, msg);
}
[[noreturn]] inline void fail_degenerate(const std::string& msg) {
  throw Error(ErrorKind::degeneracy, msg);
}
[[noreturn]] inline void fail_numeric(const std::string& msg) {
  throw Error(ErrorKind::numeric, msg);
}

}  // namespace envtrace
