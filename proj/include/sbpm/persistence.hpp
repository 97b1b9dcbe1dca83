#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sbpm/block.hpp"
#include "sbpm/engine.hpp"
#include "sbpm/model.hpp"
#include "sbpm/notation.hpp"
#include "sbpm/xml.hpp"

namespace sbpm {

/// Version written into every document; readers reject any other.
inline constexpr int format_version = 1;

/// Well-formed document whose content fails model or notation validation.
class SemanticViolationError : public Error {
public:
  explicit SemanticViolationError(std::vector<Violation> violations);

  const std::vector<Violation>& violations() const noexcept {
    return violations_;
  }

private:
  std::vector<Violation> violations_;
};

struct ModelDocument {
  ProcessModel model;
  std::optional<LayeredDiagram> layout;

  bool operator==(const ModelDocument&) const = default;
};

struct TraceDocument {
  Trace trace;
  InstanceStatus status = InstanceStatus::Running;
  std::int64_t clock = 0;

  bool operator==(const TraceDocument&) const = default;
};

/// Byte-deterministic: subjects, messages, states, transitions, channels,
/// blocks and arrows are written sorted by id with attributes in a fixed
/// order.
std::string to_xml(const ProcessModel& model,
                   const std::optional<LayeredDiagram>& layout = std::nullopt);

/// Throws xml::ParseError (MalformedDocument), UnsupportedVersion, or
/// SemanticViolationError. The model is returned as build_model normalizes
/// it; arrow waypoints are recomputed from the block geometry.
ModelDocument from_xml(std::string_view text);

std::string notation_to_xml(const NotationDefinition& notation);

/// The notation is checked with define_notation.
NotationDefinition notation_from_xml(std::string_view text);

std::string trace_to_xml(const TraceDocument& trace);
TraceDocument trace_from_xml(std::string_view text);

/// "Model", "Notation" or "Trace". Throws like the readers.
std::string document_kind(std::string_view text);

/// Graphviz text: one digraph for the interaction view, then one per
/// behavior in subject order.
std::string export_dot(const ProcessModel& model);

/// JSON rendering of any document, derived element by element:
/// {"name", "attributes", "children"} plus "text" for text-only elements.
std::string xml_to_json(std::string_view xml_text);

/// Inverse of xml_to_json. Throws MalformedDocument.
std::string json_to_xml(std::string_view json_text);

} // namespace sbpm
