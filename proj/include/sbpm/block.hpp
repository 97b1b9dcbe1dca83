#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "sbpm/common.hpp"

namespace sbpm {

struct Point {
  double x = 0;
  double y = 0;

  bool operator==(const Point&) const = default;
};

/// Axis-aligned rectangle; (x, y) is the top-left corner, y grows downwards.
struct Rect {
  double x = 0;
  double y = 0;
  double width = 0;
  double height = 0;

  double left() const noexcept {
    return x;
  }
  double right() const noexcept {
    return x + width;
  }
  double top() const noexcept {
    return y;
  }
  double bottom() const noexcept {
    return y + height;
  }
  Point center() const noexcept {
    return {x + width / 2, y + height / 2};
  }

  bool operator==(const Rect&) const = default;
};

double overlap_area(const Rect& a, const Rect& b) noexcept;

/// Smallest rectangle containing both.
Rect unite(const Rect& a, const Rect& b) noexcept;

using Property = std::pair<std::string, std::string>;

struct Block {
  std::string id;
  std::string kind;
  Point position;
  double width = 80;
  double height = 40;
  std::string label;
  std::vector<Property> properties;

  Rect bounds() const noexcept {
    return {position.x, position.y, width, height};
  }

  /// Value for `key`, or nullptr.
  const std::string* property(std::string_view key) const;

  bool operator==(const Block&) const = default;
};

struct Arrow {
  std::string id;
  std::string from_block;
  std::string to_block;
  std::string label;
  /// Orthogonal polyline from the boundary of `from_block` to the boundary of
  /// `to_block`.
  std::vector<Point> waypoints;

  bool operator==(const Arrow&) const = default;
};

enum class FlowAxis { TopDown, LeftRight };

std::string_view to_string(FlowAxis axis);

struct FlowConvention {
  FlowAxis axis = FlowAxis::TopDown;
  double snap_threshold = 20;
  /// Distance at which two blocks still count as docked; 0 means flush.
  double gap = 0;

  bool operator==(const FlowConvention&) const = default;
};

/// One layer of a block model: blocks on a stage plus explicit arrows.
/// Every editing operation returns a new diagram.
struct BlockDiagram {
  std::vector<Block> blocks;
  std::vector<Arrow> arrows;
  FlowConvention flow;
  Rect stage{0, 0, 1000, 800};

  const Block* find_block(std::string_view id) const;

  bool operator==(const BlockDiagram&) const = default;
};

/// Interaction layer plus one behavior layer per subject block id.
struct LayeredDiagram {
  BlockDiagram interaction;
  std::map<std::string, BlockDiagram> behaviors;

  bool operator==(const LayeredDiagram&) const = default;
};

enum class DockSide { Below, Right, Above, Left };

std::string_view to_string(DockSide side);

/// Slot preference for ties, first wins. TopDown: below, right, above, left.
/// LeftRight: right, below, left, above.
std::vector<DockSide> side_order(FlowAxis axis);

/// Top-left corner that places `moving` flush against `side` of `anchor`.
Point dock_position(const Rect& anchor, DockSide side, double moving_width,
                    double moving_height, double gap) noexcept;

enum class ConnectionOrigin { Implicit, Explicit };

struct Connection {
  std::string from_block;
  std::string to_block;
  ConnectionOrigin origin = ConnectionOrigin::Implicit;
  /// Docked side of `from_block` for implicit connections, arrow id otherwise.
  std::string via;

  /// Semantic equality ignores how the connection was drawn.
  bool same_semantics(const Connection& other) const noexcept {
    return from_block == other.from_block && to_block == other.to_block;
  }

  bool operator==(const Connection&) const = default;
};

bool operator<(const Connection& x, const Connection& y);

// -- editing -------------------------------------------------------------------

/// Appends `block` at its own position without docking. Throws DuplicateId.
BlockDiagram add_block(BlockDiagram diagram, Block block);

/// Drops `moving` at `drop`. A drop that overlaps another block, or lands
/// within the snap threshold of a free docking slot, jumps flush against the
/// nearest valid slot. Result never has overlapping blocks. Throws
/// UnknownBlock.
BlockDiagram snap_dock(BlockDiagram diagram, std::string_view moving,
                       Point drop);

/// Removes a block and every arrow touching it.
BlockDiagram remove_block(BlockDiagram diagram, std::string_view id);

/// Adds a routed arrow. Throws UnknownBlock, SameBlock, DuplicateId.
BlockDiagram add_arrow(BlockDiagram diagram, std::string id,
                       std::string_view from, std::string_view to,
                       std::string label = {});

/// Grows the stage by 10% of the content extent when a block sticks out.
void fit_stage(BlockDiagram& diagram);

// -- queries -------------------------------------------------------------------

/// Implicit connections from docking (directed by the flow convention) plus
/// one explicit connection per arrow, sorted.
std::vector<Connection> infer_connections(const BlockDiagram& diagram);

/// Pairs of blocks docked side by side across the flow axis; such pairs carry
/// no direction unless an arrow joins them.
std::vector<std::pair<std::string, std::string>>
side_adjacent_pairs(const BlockDiagram& diagram);

/// Orthogonal polyline between the two blocks with at most three segments.
/// Throws SameBlock or UnknownBlock.
Arrow route_arrow(const BlockDiagram& diagram, std::string_view from,
                  std::string_view to);

/// Sum of pairwise overlap areas; zero for any committed diagram.
double total_overlap(const BlockDiagram& diagram);

} // namespace sbpm
