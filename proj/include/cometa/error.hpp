#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cometa {

enum class ErrorKind {
  kNotFound,
  kConfiguration,
  kInvalidInput,
  kRetryable,  // e.g. corpus locked by another writer
  kEmptyCorpus,
  kDegenerateGraph,
  kIo,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  bool retryable() const noexcept { return kind_ == ErrorKind::kRetryable; }

 private:
  ErrorKind kind_;
};

/// Raised by the pipeline; carries the name of the stage that failed.
class StageError : public Error {
 public:
  StageError(std::string stage, ErrorKind kind, const std::string& message)
      : Error(kind, message), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace cometa
