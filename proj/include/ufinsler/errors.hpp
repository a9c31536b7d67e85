#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ufinsler {

/// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A function or metric was evaluated outside its domain
/// (log of a non-positive value, a failed domain guard, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Arithmetic failure while lifting an expression through jets.
class EvalError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// The direction vector v is (numerically) zero.
class ZeroDirection : public DomainError {
 public:
  using DomainError::DomainError;
};

/// A denominator of a closed-form tensor, spray or curvature formula vanishes.
class SingularTensor : public DomainError {
 public:
  using DomainError::DomainError;
};

/// phi(1,0) is not available, so the metric cannot be normalized on the unit sphere.
class UnboundedAtPole : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Two routes that must agree by construction disagree; signals a formula bug.
class InternalInconsistency : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::string message, std::size_t offset, std::vector<std::string> expected)
      : Error(format(message, offset, expected)),
        offset_(offset),
        expected_(std::move(expected)) {}

  /// Byte offset into the source text where parsing stopped.
  std::size_t offset() const noexcept { return offset_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  static std::string format(const std::string& message, std::size_t offset,
                            const std::vector<std::string>& expected) {
    std::string out = message + " at offset " + std::to_string(offset);
    if (!expected.empty()) {
      out += "; expected one of:";
      for (const auto& e : expected) out += " " + e;
    }
    return out;
  }

  std::size_t offset_;
  std::vector<std::string> expected_;
};

}  // namespace ufinsler
