#pragma once

#include <stdexcept>
#include <string>

namespace ncvharm {

// All library failures surface as this type; the message is the stable error tag.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ncvharm
