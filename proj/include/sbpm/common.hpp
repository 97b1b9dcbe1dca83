#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

namespace sbpm {

/// Failure raised by an operation whose contract lists it as an error.
/// `code` carries the error name verbatim (for example "UnknownSubject") so
/// the service and the CLI can pass it through unchanged.
class Error : public std::runtime_error {
public:
  Error(std::string code, const std::string& message, std::string details = {})
    : std::runtime_error(message),
      code_(std::move(code)),
      details_(std::move(details)) {
  }

  const std::string& code() const noexcept {
    return code_;
  }

  const std::string& details() const noexcept {
    return details_;
  }

private:
  std::string code_;
  std::string details_;
};

enum class Severity { Error, Warning };

/// A rule breach found by a checker. Violations are values, never thrown.
struct Violation {
  std::string code;
  Severity severity = Severity::Error;
  std::string subject;
  std::string element;
  std::string detail;

  bool operator==(const Violation&) const = default;
};

inline bool operator<(const Violation& x, const Violation& y) {
  auto key = [](const Violation& v) {
    return std::tie(v.subject, v.element, v.code, v.detail);
  };
  return key(x) < key(y);
}

Violation make_violation(std::string code, std::string subject,
                         std::string element, std::string detail = {});

Violation make_warning(std::string code, std::string subject,
                       std::string element, std::string detail = {});

/// Sorts by subject id, then element id, then code; removes exact duplicates.
void normalize(std::vector<Violation>& xs);

bool has_errors(const std::vector<Violation>& xs);

/// One-line rendering: `<severity> <code> subject=<s> element=<e> <detail>`.
std::string to_string(const Violation& v);

std::string_view to_string(Severity s);

/// Either a fully valid value or the complete list of violations that
/// prevented building it. Never both.
template <class T>
class Checked {
public:
  Checked(T value) : value_(std::move(value)) {
  }

  Checked(std::vector<Violation> violations)
    : violations_(std::move(violations)) {
  }

  bool ok() const noexcept {
    return value_.has_value();
  }

  explicit operator bool() const noexcept {
    return ok();
  }

  const T& value() const& {
    if (!value_)
      throw Error("InvalidAccess", "value() on a failed result");
    return *value_;
  }

  T&& value() && {
    if (!value_)
      throw Error("InvalidAccess", "value() on a failed result");
    return std::move(*value_);
  }

  const std::vector<Violation>& violations() const noexcept {
    return violations_;
  }

private:
  std::optional<T> value_;
  std::vector<Violation> violations_;
};

/// Splits a comma separated list, trimming blanks and dropping empty items.
std::vector<std::string> split_list(std::string_view text);

std::string join(const std::vector<std::string>& xs, std::string_view sep);

} // namespace sbpm
