// Shared error types and small numeric helpers.
#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace bcn {

enum class ErrorKind {
  argument,   // bad parameter from the caller
  io,         // filesystem trouble
  parse,      // malformed input file (PPM header etc.)
  format,     // container / bitstream / checkpoint violations
  model,      // wrong or missing model
  data,       // unusable corpus or dataset
  state,      // operation called out of sequence
  internal,   // invariant violation, always a bug
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& msg) {
  throw Error(kind, msg);
}

// Rounding used across the whole codec: half away from zero.
inline int round_half_away(double v) {
  return static_cast<int>(v >= 0.0 ? std::floor(v + 0.5) : std::ceil(v - 0.5));
}

inline std::uint8_t clamp_byte(int v) {
  return static_cast<std::uint8_t>(v < 0 ? 0 : (v > 255 ? 255 : v));
}

template <typename T>
T clamp(T v, T lo, T hi) {
  return v < lo ? lo : (v > hi ? hi : v);
}

}  // namespace bcn
