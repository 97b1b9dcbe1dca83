#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sbpm/common.hpp"

namespace sbpm::xml {

/// Element-only DOM. Attribute order is preserved; character data between
/// elements is dropped unless it is the element's only content.
struct Element {
  std::string name;
  std::vector<std::pair<std::string, std::string>> attributes;
  std::vector<Element> children;
  std::string text;
  std::size_t line = 0;
  std::size_t column = 0;

  Element() = default;
  explicit Element(std::string n) : name(std::move(n)) {
  }

  /// Value of `key`, or nullptr.
  const std::string* find(std::string_view key) const;

  Element& set(std::string key, std::string value);
  Element& add(Element child);

  /// Children named `n`, in document order.
  std::vector<const Element*> all(std::string_view n) const;

  bool operator==(const Element& o) const {
    return name == o.name && attributes == o.attributes
           && children == o.children && text == o.text;
  }
};

/// Raised for any input that is not a single well-formed element tree.
/// DOCTYPE declarations are refused so no entity is ever expanded.
class ParseError : public Error {
public:
  ParseError(const std::string& message, std::size_t line, std::size_t column)
    : Error("MalformedDocument", message,
            "line " + std::to_string(line) + " column "
              + std::to_string(column)),
      line_(line),
      column_(column) {
  }

  std::size_t line() const noexcept {
    return line_;
  }
  std::size_t column() const noexcept {
    return column_;
  }

private:
  std::size_t line_;
  std::size_t column_;
};

Element parse(std::string_view text);

/// UTF-8 with declaration, two-space indentation, attributes in stored order.
std::string write(const Element& root);

std::string escape(std::string_view text, bool attribute);

} // namespace sbpm::xml
