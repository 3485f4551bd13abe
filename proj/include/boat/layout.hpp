#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "boat/conllu.hpp"

namespace boat {

enum class LayoutMode { CompactHorizontal, ArcsHorizontal, TreeVertical };

std::string_view layout_mode_name(LayoutMode mode);
std::optional<LayoutMode> parse_layout_mode(std::string_view name);

struct Point {
  double x = 0;
  double y = 0;
  bool operator==(const Point&) const = default;
};

struct LayoutNode {
  int token_id = 0;
  double x = 0;
  double y = 0;
  double width = 0;  // label width estimate in character units
  std::string label;     // FORM
  std::string sublabel;  // UPOS, empty when unset
  bool operator==(const LayoutNode&) const = default;
};

struct LayoutEdge {
  int head_id = 0;  // 0 for the edge from the virtual root anchor
  int dep_id = 0;
  std::string deprel;
  /// Arc level in horizontal modes, depth of the dependent in tree mode.
  int height = 0;
  std::vector<Point> anchors;
  bool operator==(const LayoutEdge&) const = default;
};

/// Geometry in abstract units. Horizontal modes put tokens on the baseline
/// y = 0 with arcs rising to y = height; tree mode grows downward, y = depth.
struct ArcDiagram {
  LayoutMode mode = LayoutMode::CompactHorizontal;
  std::vector<LayoutNode> nodes;
  std::vector<LayoutEdge> edges;
  double width = 0;
  double height = 0;
  bool operator==(const ArcDiagram&) const = default;
};

/// Arc levels for (head, dependent) pairs: an arc sits one level above the
/// highest arc whose span it strictly contains, and at level 1 otherwise.
std::vector<int> arc_heights(std::span<const std::pair<int, int>> arcs);

/// Lays out a sentence. Tokens without a HEAD simply have no edge.
/// Throws CyclicGraph when the heads form a cycle and InvalidSentence when a
/// HEAD points outside the sentence.
ArcDiagram layout(const Sentence& sent, LayoutMode mode);

/// Standalone SVG rendering of a diagram.
std::string render_svg(const ArcDiagram& diagram);

}  // namespace boat
