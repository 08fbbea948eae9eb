#pragma once

#include <stdexcept>
#include <string>

namespace saasim {

/// Error categories double as CLI exit codes.
enum class error_category : int {
  config = 2,
  io = 3,
  parse = 4,
  validation = 5,
  state = 6,
  domain = 7,
};

class error : public std::runtime_error {
public:
  error(error_category cat, const std::string& what)
      : std::runtime_error(what), category_(cat) {}

  error_category category() const noexcept { return category_; }
  int exit_code() const noexcept { return static_cast<int>(category_); }

private:
  error_category category_;
};

class config_error : public error {
public:
  explicit config_error(const std::string& what)
      : error(error_category::config, what) {}
};

class io_error : public error {
public:
  explicit io_error(const std::string& what) : error(error_category::io, what) {}
};

/// Malformed trace line; carries the 1-based line number.
class parse_error : public error {
public:
  parse_error(std::size_t line, const std::string& what)
      : error(error_category::parse, "line " + std::to_string(line) + ": " + what),
        line_(line), detail_(what) {}

  std::size_t line() const noexcept { return line_; }
  /// Message without the line prefix.
  const std::string& detail() const noexcept { return detail_; }

private:
  std::size_t line_;
  std::string detail_;
};

class validation_error : public error {
public:
  explicit validation_error(const std::string& what)
      : error(error_category::validation, what) {}
};

/// Sliding window requested before enough intervals have elapsed.
class window_not_ready : public error {
public:
  explicit window_not_ready(const std::string& what)
      : error(error_category::domain, what) {}
};

/// Change event inconsistent with the tracked graph.
class state_error : public error {
public:
  explicit state_error(const std::string& what) : error(error_category::state, what) {}
};

class domain_error : public error {
public:
  explicit domain_error(const std::string& what) : error(error_category::domain, what) {}
};

} // namespace saasim
