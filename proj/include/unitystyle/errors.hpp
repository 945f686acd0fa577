#pragma once

#include <stdexcept>
#include <string>

namespace unitystyle {

/// Base of every error raised by the library. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad or inconsistent configuration (spec invariants, unknown names, bad layout).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Caller passed arguments that violate an operation's precondition.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// A filename or document did not follow the expected grammar.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// On-disk dataset is unusable (e.g. an empty split).
class DatasetError : public Error {
 public:
  using Error::Error;
};

/// Operation not available for this object (e.g. attention on a generator built without it).
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

class EvaluationError : public Error {
 public:
  using Error::Error;
};

/// A required upstream artifact (checkpoint, unity tree) is absent.
class MissingArtifactError : public Error {
 public:
  using Error::Error;
};

/// Checkpoint file is unreadable or was written by a different format version.
class CheckpointError : public Error {
 public:
  using Error::Error;
};

}  // namespace unitystyle
