#pragma once

#include <stdexcept>
#include <string>

namespace apo {

/// Base class for every error raised by this library.
class ApoError : public std::runtime_error {
 public:
  explicit ApoError(const std::string& msg) : std::runtime_error(msg) {}
};

class DimensionMismatch : public ApoError {
 public:
  using ApoError::ApoError;
};

class SingularSystem : public ApoError {
 public:
  using ApoError::ApoError;
};

class InvalidMdp : public ApoError {
 public:
  using ApoError::ApoError;
};

class NegativeK : public ApoError {
 public:
  using ApoError::ApoError;
};

class BadParam : public ApoError {
 public:
  using ApoError::ApoError;
};

class ShapeMismatch : public ApoError {
 public:
  using ApoError::ApoError;
};

class FamilyMismatch : public ApoError {
 public:
  using ApoError::ApoError;
};

class OutOfSupport : public ApoError {
 public:
  using ApoError::ApoError;
};

class NonFiniteValue : public ApoError {
 public:
  using ApoError::ApoError;
};

class NonFiniteGradient : public ApoError {
 public:
  using ApoError::ApoError;
};

class EmptyBatch : public ApoError {
 public:
  using ApoError::ApoError;
};

class NonFiniteAdvantage : public ApoError {
 public:
  using ApoError::ApoError;
};

class EnvFault : public ApoError {
 public:
  using ApoError::ApoError;
};

class NoCompletedEpisodes : public ApoError {
 public:
  using ApoError::ApoError;
};

class ConfigError : public ApoError {
 public:
  using ApoError::ApoError;
};

class IoError : public ApoError {
 public:
  using ApoError::ApoError;
};

class UnsupportedSignCase : public ApoError {
 public:
  using ApoError::ApoError;
};

class DivisionByZero : public ApoError {
 public:
  using ApoError::ApoError;
};

}  // namespace apo
