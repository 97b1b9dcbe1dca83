#include "sbpm/block.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <tuple>

namespace sbpm {

namespace {

constexpr double eps = 1e-9;

double overlap_1d(double a0, double a1, double b0, double b1) noexcept {
  return std::min(a1, b1) - std::max(a0, b0);
}

Block& find_mutable(BlockDiagram& d, std::string_view id) {
  for (auto& b : d.blocks)
    if (b.id == id)
      return b;
  throw Error("UnknownBlock", "unknown block '" + std::string{id} + "'");
}

bool collides(const BlockDiagram& d, std::string_view self, const Rect& r) {
  for (auto& b : d.blocks)
    if (b.id != self && overlap_area(b.bounds(), r) > 0)
      return true;
  return false;
}

void reroute(BlockDiagram& d, std::string_view touched) {
  for (auto& a : d.arrows) {
    if (a.from_block != touched && a.to_block != touched)
      continue;
    a.waypoints = route_arrow(d, a.from_block, a.to_block).waypoints;
  }
}

} // namespace

double overlap_area(const Rect& a, const Rect& b) noexcept {
  auto w = overlap_1d(a.left(), a.right(), b.left(), b.right());
  auto h = overlap_1d(a.top(), a.bottom(), b.top(), b.bottom());
  if (w <= 0 || h <= 0)
    return 0;
  return w * h;
}

Rect unite(const Rect& a, const Rect& b) noexcept {
  auto l = std::min(a.left(), b.left());
  auto t = std::min(a.top(), b.top());
  auto r = std::max(a.right(), b.right());
  auto btm = std::max(a.bottom(), b.bottom());
  return {l, t, r - l, btm - t};
}

const std::string* Block::property(std::string_view key) const {
  for (auto& [k, v] : properties)
    if (k == key)
      return &v;
  return nullptr;
}

const Block* BlockDiagram::find_block(std::string_view id) const {
  for (auto& b : blocks)
    if (b.id == id)
      return &b;
  return nullptr;
}

std::string_view to_string(FlowAxis axis) {
  return axis == FlowAxis::TopDown ? "top-down" : "left-right";
}

std::string_view to_string(DockSide side) {
  switch (side) {
    case DockSide::Below:
      return "below";
    case DockSide::Right:
      return "right";
    case DockSide::Above:
      return "above";
    case DockSide::Left:
      return "left";
  }
  return "below";
}

std::vector<DockSide> side_order(FlowAxis axis) {
  if (axis == FlowAxis::TopDown)
    return {DockSide::Below, DockSide::Right, DockSide::Above, DockSide::Left};
  return {DockSide::Right, DockSide::Below, DockSide::Left, DockSide::Above};
}

Point dock_position(const Rect& anchor, DockSide side, double moving_width,
                    double moving_height, double gap) noexcept {
  switch (side) {
    case DockSide::Below:
      return {anchor.left(), anchor.bottom() + gap};
    case DockSide::Right:
      return {anchor.right() + gap, anchor.top()};
    case DockSide::Above:
      return {anchor.left(), anchor.top() - moving_height - gap};
    case DockSide::Left:
      return {anchor.left() - moving_width - gap, anchor.top()};
  }
  return {anchor.left(), anchor.bottom() + gap};
}

bool operator<(const Connection& x, const Connection& y) {
  return std::tie(x.from_block, x.to_block, x.origin, x.via)
         < std::tie(y.from_block, y.to_block, y.origin, y.via);
}

// -- editing -------------------------------------------------------------------

BlockDiagram add_block(BlockDiagram diagram, Block block) {
  if (diagram.find_block(block.id))
    throw Error("DuplicateId", "block '" + block.id + "' already exists");
  if (!(block.width > 0) || !(block.height > 0))
    throw Error("InvalidSize", "block '" + block.id + "' needs a positive size");
  diagram.blocks.push_back(std::move(block));
  fit_stage(diagram);
  return diagram;
}

BlockDiagram snap_dock(BlockDiagram diagram, std::string_view moving,
                       Point drop) {
  auto& m = find_mutable(diagram, moving);
  const auto w = m.width;
  const auto h = m.height;
  const auto gap = diagram.flow.gap;
  const Rect at_drop{drop.x, drop.y, w, h};
  const auto order = side_order(diagram.flow.axis);

  std::vector<const Block*> overlapped;
  for (auto& b : diagram.blocks)
    if (b.id != moving && overlap_area(b.bounds(), at_drop) > 0)
      overlapped.push_back(&b);

  // (distance, side rank, anchor id) orders the candidates.
  using Candidate = std::tuple<double, size_t, std::string, Point>;
  std::optional<Candidate> best;
  auto consider = [&](const Block& anchor) {
    for (size_t rank = 0; rank < order.size(); ++rank) {
      auto p = dock_position(anchor.bounds(), order[rank], w, h, gap);
      if (collides(diagram, moving, Rect{p.x, p.y, w, h}))
        continue;
      auto dist = std::hypot(p.x - drop.x, p.y - drop.y);
      Candidate c{dist, rank, anchor.id, p};
      if (!best || std::tie(std::get<0>(c), std::get<1>(c), std::get<2>(c))
                     < std::tie(std::get<0>(*best), std::get<1>(*best),
                                std::get<2>(*best)))
        best = std::move(c);
    }
  };

  Point result = drop;
  if (!overlapped.empty()) {
    for (auto* b : overlapped)
      consider(*b);
    if (best) {
      result = std::get<3>(*best);
    } else {
      // Every slot of the overlapped blocks is taken: slide along the flow
      // axis to the nearest free position. That position is either the drop
      // itself or flush against the edge of some block.
      const bool vertical = diagram.flow.axis == FlowAxis::TopDown;
      const double origin = vertical ? drop.y : drop.x;
      std::vector<double> options{origin};
      for (auto& b : diagram.blocks) {
        if (b.id == moving)
          continue;
        if (vertical) {
          options.push_back(b.bounds().bottom());
          options.push_back(b.bounds().top() - h);
        } else {
          options.push_back(b.bounds().right());
          options.push_back(b.bounds().left() - w);
        }
      }
      std::optional<double> pick;
      for (auto v : options) {
        Rect r = vertical ? Rect{drop.x, v, w, h} : Rect{v, drop.y, w, h};
        if (collides(diagram, moving, r))
          continue;
        auto d = std::abs(v - origin);
        if (!pick || d < std::abs(*pick - origin)
            || (d == std::abs(*pick - origin) && v > *pick))
          pick = v;
      }
      // The position past the last block along the axis is always free.
      result = vertical ? Point{drop.x, *pick} : Point{*pick, drop.y};
    }
  } else {
    for (auto& b : diagram.blocks)
      if (b.id != moving)
        consider(b);
    if (best && std::get<0>(*best) <= diagram.flow.snap_threshold)
      result = std::get<3>(*best);
  }
  m.position = result;
  reroute(diagram, moving);
  fit_stage(diagram);
  return diagram;
}

BlockDiagram remove_block(BlockDiagram diagram, std::string_view id) {
  auto before = diagram.blocks.size();
  std::erase_if(diagram.blocks, [&](const Block& b) { return b.id == id; });
  if (before == diagram.blocks.size())
    throw Error("UnknownBlock", "unknown block '" + std::string{id} + "'");
  std::erase_if(diagram.arrows, [&](const Arrow& a) {
    return a.from_block == id || a.to_block == id;
  });
  return diagram;
}

BlockDiagram add_arrow(BlockDiagram diagram, std::string id,
                       std::string_view from, std::string_view to,
                       std::string label) {
  for (auto& a : diagram.arrows)
    if (a.id == id)
      throw Error("DuplicateId", "arrow '" + id + "' already exists");
  auto arrow = route_arrow(diagram, from, to);
  arrow.id = std::move(id);
  arrow.label = std::move(label);
  diagram.arrows.push_back(std::move(arrow));
  return diagram;
}

void fit_stage(BlockDiagram& diagram) {
  if (diagram.blocks.empty())
    return;
  Rect content = diagram.blocks.front().bounds();
  for (auto& b : diagram.blocks)
    content = unite(content, b.bounds());
  auto& s = diagram.stage;
  if (content.left() >= s.left() && content.top() >= s.top()
      && content.right() <= s.right() && content.bottom() <= s.bottom())
    return;
  auto mx = 0.1 * content.width;
  auto my = 0.1 * content.height;
  Rect padded{content.x - mx, content.y - my, content.width + 2 * mx,
              content.height + 2 * my};
  s = unite(s, padded);
}

// -- queries -------------------------------------------------------------------

namespace {

enum class Adjacency { None, Vertical, Horizontal };

// Whether `a` sits directly before `b` (above it, or left of it) with a
// shared edge segment of positive length.
Adjacency docked_before(const Rect& a, const Rect& b, double gap) {
  auto vsep = b.top() - a.bottom();
  if (vsep >= -eps && vsep <= gap + eps
      && overlap_1d(a.left(), a.right(), b.left(), b.right()) > eps)
    return Adjacency::Vertical;
  auto hsep = b.left() - a.right();
  if (hsep >= -eps && hsep <= gap + eps
      && overlap_1d(a.top(), a.bottom(), b.top(), b.bottom()) > eps)
    return Adjacency::Horizontal;
  return Adjacency::None;
}

template <class F>
void for_each_docked_pair(const BlockDiagram& d, F f) {
  for (size_t i = 0; i < d.blocks.size(); ++i) {
    for (size_t j = 0; j < d.blocks.size(); ++j) {
      if (i == j)
        continue;
      auto& a = d.blocks[i];
      auto& b = d.blocks[j];
      auto adj = docked_before(a.bounds(), b.bounds(), d.flow.gap);
      if (adj != Adjacency::None)
        f(a, b, adj);
    }
  }
}

} // namespace

std::vector<Connection> infer_connections(const BlockDiagram& diagram) {
  std::vector<Connection> out;
  const auto along = diagram.flow.axis == FlowAxis::TopDown
                       ? Adjacency::Vertical
                       : Adjacency::Horizontal;
  const auto side = diagram.flow.axis == FlowAxis::TopDown ? DockSide::Below
                                                           : DockSide::Right;
  for_each_docked_pair(diagram,
                       [&](const Block& a, const Block& b, Adjacency adj) {
                         if (adj == along)
                           out.push_back({a.id, b.id, ConnectionOrigin::Implicit,
                                          std::string{to_string(side)}});
                       });
  for (auto& a : diagram.arrows)
    out.push_back(
      {a.from_block, a.to_block, ConnectionOrigin::Explicit, a.id});
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::pair<std::string, std::string>>
side_adjacent_pairs(const BlockDiagram& diagram) {
  std::vector<std::pair<std::string, std::string>> out;
  const auto across = diagram.flow.axis == FlowAxis::TopDown
                        ? Adjacency::Horizontal
                        : Adjacency::Vertical;
  for_each_docked_pair(diagram,
                       [&](const Block& a, const Block& b, Adjacency adj) {
                         if (adj == across)
                           out.emplace_back(std::min(a.id, b.id),
                                            std::max(a.id, b.id));
                       });
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Arrow route_arrow(const BlockDiagram& diagram, std::string_view from,
                  std::string_view to) {
  if (from == to)
    throw Error("SameBlock", "an arrow needs two distinct blocks");
  auto* fa = diagram.find_block(from);
  auto* fb = diagram.find_block(to);
  if (!fa)
    throw Error("UnknownBlock", "unknown block '" + std::string{from} + "'");
  if (!fb)
    throw Error("UnknownBlock", "unknown block '" + std::string{to} + "'");
  const auto a = fa->bounds();
  const auto b = fb->bounds();
  Arrow out;
  out.from_block = fa->id;
  out.to_block = fb->id;
  auto& pts = out.waypoints;
  const auto xo = overlap_1d(a.left(), a.right(), b.left(), b.right());
  const auto yo = overlap_1d(a.top(), a.bottom(), b.top(), b.bottom());
  if (yo > 0 && xo <= 0) {
    auto y = (std::max(a.top(), b.top()) + std::min(a.bottom(), b.bottom())) / 2;
    if (b.left() >= a.right())
      pts = {{a.right(), y}, {b.left(), y}};
    else
      pts = {{a.left(), y}, {b.right(), y}};
    return out;
  }
  if (xo > 0 && yo <= 0) {
    auto x = (std::max(a.left(), b.left()) + std::min(a.right(), b.right())) / 2;
    if (b.top() >= a.bottom())
      pts = {{x, a.bottom()}, {x, b.top()}};
    else
      pts = {{x, a.top()}, {x, b.bottom()}};
    return out;
  }
  const auto ca = a.center();
  const auto cb = b.center();
  if (xo > 0 && yo > 0) {
    // Overlapping endpoints only occur in uncommitted diagrams.
    pts = {ca, {cb.x, ca.y}, cb};
    return out;
  }
  if (diagram.flow.axis == FlowAxis::TopDown) {
    const bool down = b.top() >= a.bottom();
    const auto y0 = down ? a.bottom() : a.top();
    const auto y1 = down ? b.top() : b.bottom();
    const auto mid = (y0 + y1) / 2;
    pts = {{ca.x, y0}, {ca.x, mid}, {cb.x, mid}, {cb.x, y1}};
  } else {
    const bool right = b.left() >= a.right();
    const auto x0 = right ? a.right() : a.left();
    const auto x1 = right ? b.left() : b.right();
    const auto mid = (x0 + x1) / 2;
    pts = {{x0, ca.y}, {mid, ca.y}, {mid, cb.y}, {x1, cb.y}};
  }
  return out;
}

double total_overlap(const BlockDiagram& diagram) {
  double sum = 0;
  for (size_t i = 0; i < diagram.blocks.size(); ++i)
    for (size_t j = i + 1; j < diagram.blocks.size(); ++j)
      sum += overlap_area(diagram.blocks[i].bounds(),
                          diagram.blocks[j].bounds());
  return sum;
}

} // namespace sbpm
