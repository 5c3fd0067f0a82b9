#pragma once

#include <stdexcept>
#include <string>

namespace yannrl {

// Thrown when a solver or factorization fails numerically (singular system,
// iteration cap hit, loss of positive definiteness). Argument/shape misuse
// throws std::invalid_argument instead.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace yannrl
