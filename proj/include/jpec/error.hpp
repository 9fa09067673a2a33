#pragma once

#include <stdexcept>
#include <string>

namespace jpec {

// Every contract violation raised by the library. The message names the
// offending shapes, indices, file lines, or epoch.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace jpec
