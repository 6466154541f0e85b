#pragma once

#include <stdexcept>
#include <string>

namespace blockmax {

enum class Errc {
  invalid_argument,
  domain_error,
  dimension_mismatch,
  guard_tripped,
  unsupported,
  io_error,
  config_error,
};

/// Single exception type thrown by the library. The code is what the C API
/// reports; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  [[nodiscard]] Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, Errc code, const char* what) {
  if (!cond) fail(code, what);
}

}  // namespace blockmax
