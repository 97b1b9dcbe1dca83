#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sbpm/block.hpp"
#include "sbpm/common.hpp"

namespace sbpm {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  bool operator==(const Rgb&) const = default;
};

/// "#rrggbb"
std::string to_hex(Rgb c);
std::optional<Rgb> parse_hex(std::string_view text);

double color_distance(Rgb x, Rgb y) noexcept;

enum class SizeClass { S, M, L };

std::string_view to_string(SizeClass s);
std::optional<SizeClass> parse_size_class(std::string_view text);

/// Symbol of a user-defined block vocabulary. Every symbol is a rectangle;
/// the remaining visual variables are free.
struct BlockKind {
  std::string id;
  std::string name;
  /// Diagram layer the symbol belongs to (1 interaction, 2 behavior, 0 any).
  int layer = 0;
  Rgb color;
  int brightness = 50;
  std::optional<std::string> texture;
  SizeClass size_class = SizeClass::M;
  int orientation = 0;

  static constexpr std::string_view shape = "rectangle";

  bool operator==(const BlockKind&) const = default;
};

enum class Relation { MayFollow, MustFollow, Forbidden };

std::string_view to_string(Relation r);
std::optional<Relation> parse_relation(std::string_view text);

struct GrammarRule {
  std::string from_kind;
  std::string to_kind;
  Relation relation = Relation::MayFollow;
  std::optional<int> max_out_degree;

  bool operator==(const GrammarRule&) const = default;
};

struct SemanticConstruct {
  std::string id;
  std::string name;
  std::string description;

  bool operator==(const SemanticConstruct&) const = default;
};

struct KindMapping {
  std::string kind;
  std::string construct;

  bool operator==(const KindMapping&) const = default;
};

struct NotationDefinition {
  std::string id;
  std::vector<BlockKind> kinds;
  std::vector<GrammarRule> rules;
  std::vector<SemanticConstruct> constructs;
  std::vector<KindMapping> mapping;

  const BlockKind* find_kind(std::string_view id) const;

  /// Constructs `kind` is mapped to, in mapping order.
  std::vector<std::string> constructs_of(std::string_view kind) const;

  bool operator==(const NotationDefinition&) const = default;
};

/// Validates references and rule consistency. Errors: DanglingKind,
/// DanglingConstruct, ContradictoryRule, DuplicateId, BadVisualVariable.
Checked<NotationDefinition> define_notation(NotationDefinition parts);

/// Construct ids of the S-BPM metamodel used by the block translation.
namespace construct {
inline constexpr std::string_view subject = "sbpm:subject";
inline constexpr std::string_view multi_subject = "sbpm:multi-subject";
inline constexpr std::string_view external_subject = "sbpm:external-subject";
inline constexpr std::string_view channel = "sbpm:channel";
inline constexpr std::string_view send = "sbpm:send";
inline constexpr std::string_view receive = "sbpm:receive";
inline constexpr std::string_view action = "sbpm:action";
inline constexpr std::string_view start_flag = "sbpm:start";
inline constexpr std::string_view end_flag = "sbpm:end";
inline constexpr std::string_view transition = "sbpm:transition";
inline constexpr std::string_view timeout_transition
  = "sbpm:timeout-transition";
} // namespace construct

/// Two-layer S-BPM block notation with a bijective kind/construct mapping.
NotationDefinition sbpm_default_notation();

/// Checks each connection of `diagram` against the grammar. `layer` is put
/// into the violations' subject field. Throws UnknownKind.
std::vector<Violation> conformance_check(const BlockDiagram& diagram,
                                         const NotationDefinition& notation,
                                         std::string_view layer = {});

/// Conformance of the interaction layer and every behavior layer.
std::vector<Violation> conformance_check(const LayeredDiagram& diagram,
                                         const NotationDefinition& notation);

struct AnomalyReport {
  /// Constructs without a symbol (ontological incompleteness).
  std::vector<std::string> deficits;
  /// Constructs with more than one symbol.
  std::vector<std::string> redundancies;
  /// Symbols mapped to more than one construct.
  std::vector<std::string> overloads;
  /// Symbols without a construct.
  std::vector<std::string> excesses;

  bool empty() const noexcept {
    return deficits.empty() && redundancies.empty() && overloads.empty()
           && excesses.empty();
  }

  bool operator==(const AnomalyReport&) const = default;
};

AnomalyReport ontological_analysis(const NotationDefinition& notation);

struct LintConfig {
  /// Euclidean RGB distance below which two symbols are hard to tell apart.
  double min_color_distance = 60;
  /// Symbols per layer that remain cognitively manageable.
  size_t max_kinds_per_layer = 9;
};

struct Lint {
  std::string code;
  std::vector<std::string> kinds;
  std::string detail;

  bool operator==(const Lint&) const = default;
};

/// LowDiscriminability, GraphicEconomyExceeded and UnusedVisualVariables.
std::vector<Lint> design_lints(const NotationDefinition& notation,
                               const LintConfig& config = {});

} // namespace sbpm
