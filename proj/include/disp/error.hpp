#ifndef DISP_ERROR_HPP
#define DISP_ERROR_HPP

#include <stdexcept>
#include <string>
#include <utility>

namespace disp {

// All validation/domain failures carry a short stable code (e.g. "MassSumMismatch")
// plus a human-readable message. Tests and the CLI match on the code.
class Error : public std::runtime_error {
public:
  Error(std::string code, const std::string& msg)
      : std::runtime_error(code + ": " + msg), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

private:
  std::string code_;
};

} // namespace disp

#endif
