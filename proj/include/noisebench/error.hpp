#pragma once

#include <stdexcept>
#include <string>

namespace noisebench {

// Error taxonomy; the CLI maps kinds to exit codes
// (structure/parse/config/argument -> 1, validation -> 2).
enum class ErrorKind {
  Argument,    // bad value passed to an operation
  Config,      // invalid run configuration
  Structure,   // missing file/directory, wrong tree layout
  Parse,       // malformed file contents
  Validation,  // data fails semantic checks (NaN, label gaps, ...)
  Capability,  // operation unsupported by the model family
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline Error argument_error(std::string msg) { return {ErrorKind::Argument, std::move(msg)}; }
inline Error config_error(std::string msg) { return {ErrorKind::Config, std::move(msg)}; }
inline Error structure_error(std::string msg) { return {ErrorKind::Structure, std::move(msg)}; }
inline Error parse_error(std::string msg) { return {ErrorKind::Parse, std::move(msg)}; }
inline Error validation_error(std::string msg) { return {ErrorKind::Validation, std::move(msg)}; }
inline Error capability_error(std::string msg) { return {ErrorKind::Capability, std::move(msg)}; }

}  // namespace noisebench
