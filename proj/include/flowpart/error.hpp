#pragma once

#include <stdexcept>
#include <string>

namespace flowpart {

enum class ErrorCode {
  empty_graph,
  cyclic_graph,
  invalid_instance,
  unreachable_link,
  contradictory_constraints,
  infeasible_instance,
  instance_too_large,
  parse_error,
  internal,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace flowpart
