#pragma once

#include <stdexcept>
#include <string>

namespace bundlecalc {

/// Thrown on precondition violations (shape mismatches, invalid inputs,
/// mathematically undefined requests such as the dual of a seminorm).
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

} // namespace bundlecalc
