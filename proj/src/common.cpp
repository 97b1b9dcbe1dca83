#include "sbpm/common.hpp"

#include <algorithm>

namespace sbpm {

Violation make_violation(std::string code, std::string subject,
                         std::string element, std::string detail) {
  return {std::move(code), Severity::Error, std::move(subject),
          std::move(element), std::move(detail)};
}

Violation make_warning(std::string code, std::string subject,
                       std::string element, std::string detail) {
  return {std::move(code), Severity::Warning, std::move(subject),
          std::move(element), std::move(detail)};
}

void normalize(std::vector<Violation>& xs) {
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
}

bool has_errors(const std::vector<Violation>& xs) {
  return std::any_of(xs.begin(), xs.end(), [](const Violation& v) {
    return v.severity == Severity::Error;
  });
}

std::string_view to_string(Severity s) {
  return s == Severity::Error ? "error" : "warning";
}

std::string to_string(const Violation& v) {
  std::string out{to_string(v.severity)};
  out += ' ';
  out += v.code;
  out += " subject=";
  out += v.subject;
  out += " element=";
  out += v.element;
  if (!v.detail.empty()) {
    out += ' ';
    out += v.detail;
  }
  return out;
}

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  auto trim = [](std::string_view s) {
    auto is_blank = [](char c) { return c == ' ' || c == '\t'; };
    while (!s.empty() && is_blank(s.front()))
      s.remove_prefix(1);
    while (!s.empty() && is_blank(s.back()))
      s.remove_suffix(1);
    return s;
  };
  while (!text.empty()) {
    auto pos = text.find(',');
    auto item = trim(text.substr(0, pos));
    if (!item.empty())
      out.emplace_back(item);
    if (pos == std::string_view::npos)
      break;
    text.remove_prefix(pos + 1);
  }
  return out;
}

std::string join(const std::vector<std::string>& xs, std::string_view sep) {
  std::string out;
  for (size_t i = 0; i < xs.size(); ++i) {
    if (i > 0)
      out += sep;
    out += xs[i];
  }
  return out;
}

} // namespace sbpm
