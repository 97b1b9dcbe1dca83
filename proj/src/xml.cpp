#include "sbpm/xml.hpp"

#include <expat.h>

#include <memory>

namespace sbpm::xml {

const std::string* Element::find(std::string_view key) const {
  for (auto& [k, v] : attributes)
    if (k == key)
      return &v;
  return nullptr;
}

Element& Element::set(std::string key, std::string value) {
  attributes.emplace_back(std::move(key), std::move(value));
  return *this;
}

Element& Element::add(Element child) {
  children.push_back(std::move(child));
  return children.back();
}

std::vector<const Element*> Element::all(std::string_view n) const {
  std::vector<const Element*> out;
  for (auto& c : children)
    if (c.name == n)
      out.push_back(&c);
  return out;
}

namespace {

constexpr std::size_t max_depth = 256;

struct Builder {
  XML_Parser parser;
  std::vector<Element> stack;
  std::vector<Element> roots;
  std::string failure;

  void stop(std::string why) {
    if (failure.empty())
      failure = std::move(why);
    XML_StopParser(parser, XML_FALSE);
  }

  static void on_start(void* self, const XML_Char* name,
                       const XML_Char** attrs) {
    auto& b = *static_cast<Builder*>(self);
    if (b.stack.size() >= max_depth)
      return b.stop("nesting too deep");
    if (b.stack.empty() && !b.roots.empty())
      return b.stop("more than one root element");
    Element e{name};
    e.line = XML_GetCurrentLineNumber(b.parser);
    e.column = XML_GetCurrentColumnNumber(b.parser) + 1;
    for (auto p = attrs; *p; p += 2)
      e.attributes.emplace_back(p[0], p[1]);
    b.stack.push_back(std::move(e));
  }

  static void on_end(void* self, const XML_Char*) {
    auto& b = *static_cast<Builder*>(self);
    auto e = std::move(b.stack.back());
    b.stack.pop_back();
    if (!e.children.empty()
        && e.text.find_first_not_of(" \t\r\n") == std::string::npos)
      e.text.clear();
    if (b.stack.empty())
      b.roots.push_back(std::move(e));
    else
      b.stack.back().children.push_back(std::move(e));
  }

  static void on_text(void* self, const XML_Char* s, int len) {
    auto& b = *static_cast<Builder*>(self);
    if (!b.stack.empty())
      b.stack.back().text.append(s, static_cast<std::size_t>(len));
  }

  static void on_doctype(void* self, const XML_Char*, const XML_Char*,
                         const XML_Char*, int) {
    static_cast<Builder*>(self)->stop("DOCTYPE declarations are not accepted");
  }
};

} // namespace

Element parse(std::string_view text) {
  std::unique_ptr<XML_ParserStruct, decltype(&XML_ParserFree)> parser{
    XML_ParserCreate("UTF-8"), &XML_ParserFree};
  if (!parser)
    throw Error("OutOfMemory", "cannot create XML parser");
  Builder b{parser.get(), {}, {}, {}};
  XML_SetUserData(parser.get(), &b);
  XML_SetElementHandler(parser.get(), &Builder::on_start, &Builder::on_end);
  XML_SetCharacterDataHandler(parser.get(), &Builder::on_text);
  XML_SetStartDoctypeDeclHandler(parser.get(), &Builder::on_doctype);

  const char* data = text.data();
  std::size_t left = text.size();
  constexpr std::size_t chunk = 1 << 20;
  XML_Status status = XML_STATUS_OK;
  do {
    auto n = left < chunk ? left : chunk;
    left -= n;
    status = XML_Parse(parser.get(), data, static_cast<int>(n),
                       left == 0 ? XML_TRUE : XML_FALSE);
    data += n;
  } while (status == XML_STATUS_OK && left > 0);

  auto line = static_cast<std::size_t>(XML_GetCurrentLineNumber(parser.get()));
  auto col
    = static_cast<std::size_t>(XML_GetCurrentColumnNumber(parser.get())) + 1;
  if (!b.failure.empty())
    throw ParseError(b.failure, line, col);
  if (status != XML_STATUS_OK)
    throw ParseError(XML_ErrorString(XML_GetErrorCode(parser.get())), line,
                     col);
  if (b.roots.size() != 1 || !b.stack.empty())
    throw ParseError("no root element", line, col);
  return std::move(b.roots.front());
}

std::string escape(std::string_view text, bool attribute) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += attribute ? "&quot;" : "\""; break;
      case '\t': out += attribute ? "&#9;" : "\t"; break;
      case '\n': out += attribute ? "&#10;" : "\n"; break;
      case '\r': out += "&#13;"; break;
      default: out += c;
    }
  }
  return out;
}

namespace {

void write_element(const Element& e, std::size_t depth, std::string& out) {
  out.append(2 * depth, ' ');
  out += '<';
  out += e.name;
  for (auto& [k, v] : e.attributes) {
    out += ' ';
    out += k;
    out += "=\"";
    out += escape(v, true);
    out += '"';
  }
  if (e.children.empty() && e.text.empty()) {
    out += "/>\n";
    return;
  }
  out += '>';
  if (e.children.empty()) {
    out += escape(e.text, false);
  } else {
    out += '\n';
    for (auto& c : e.children)
      write_element(c, depth + 1, out);
    out.append(2 * depth, ' ');
  }
  out += "</";
  out += e.name;
  out += ">\n";
}

} // namespace

std::string write(const Element& root) {
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  write_element(root, 0, out);
  return out;
}

} // namespace sbpm::xml
