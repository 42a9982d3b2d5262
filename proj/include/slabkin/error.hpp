#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace slabkin {

/// A violated precondition or type invariant. `where` names the module and
/// the invariant so that front ends can report it verbatim.
class InvalidArgument : public std::invalid_argument
{
 public:
  InvalidArgument(std::string where, const std::string& what)
      : std::invalid_argument(where + ": " + what)
      , where_(std::move(where))
  {}

  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

/// An iterative solve that ran out of iterations. Carries the residual history.
class DivergenceError : public std::runtime_error
{
 public:
  DivergenceError(const std::string& what, std::vector<double> history)
      : std::runtime_error(what)
      , history_(std::move(history))
  {}

  const std::vector<double>& history() const noexcept { return history_; }

 private:
  std::vector<double> history_;
};

class IoError : public std::runtime_error
{
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const char* where, const std::string& what)
{
  if (!condition) throw InvalidArgument(where, what);
}

} // namespace slabkin
