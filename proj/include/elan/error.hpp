#pragma once

#include <stdexcept>
#include <string>

namespace elan {

// Malformed MicroC input. what() reads "file:line:col: error: message".
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string file, int line, int column, const std::string& message)
      : std::runtime_error(file + ":" + std::to_string(line) + ":" + std::to_string(column) +
                           ": error: " + message),
        file_(std::move(file)),
        line_(line),
        column_(column),
        message_(message) {}

  const std::string& file() const noexcept { return file_; }
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }
  const std::string& message() const noexcept { return message_; }

 private:
  std::string file_;
  int line_;
  int column_;
  std::string message_;
};

// A well-formed request the analysis cannot answer (unknown function, bad vertex, ...).
class AnalysisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// No vertex covers a requested source location.
class NotFound : public AnalysisError {
 public:
  using AnalysisError::AnalysisError;
};

}  // namespace elan
