#include "boat/layout.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>

#include "boat/errors.hpp"

namespace boat {
namespace {

constexpr double kGap = 1.0;

std::size_t codepoints(std::string_view text) {
  return static_cast<std::size_t>(std::count_if(text.begin(), text.end(), [](char c) {
    return (static_cast<unsigned char>(c) & 0xC0) != 0x80;
  }));
}

double label_width(const Token& t) {
  const auto w = std::max(codepoints(t.form), t.upos ? codepoints(*t.upos) : 0);
  return static_cast<double>(std::max<std::size_t>(w, 1));
}

void check_heads(const Sentence& sent) {
  const int n = static_cast<int>(sent.size());
  for (const auto& t : sent.tokens) {
    if (t.head && *t.head > n) {
      throw Error(ErrorCode::InvalidSentence, "token " + std::to_string(t.id) + " has HEAD " +
                                                  std::to_string(*t.head) + " outside the sentence");
    }
  }
  for (const auto& t : sent.tokens) {
    int cur = t.id;
    for (int steps = 0; steps <= n; ++steps) {
      const auto& head = sent.tokens[static_cast<std::size_t>(cur - 1)].head;
      if (!head || *head == 0) break;
      cur = *head;
      if (cur == t.id || steps == n) {
        throw Error(ErrorCode::CyclicGraph,
                    "token " + std::to_string(t.id) + " lies on a head cycle; fix it before drawing");
      }
    }
  }
}

std::string xml_escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

ArcDiagram horizontal(const Sentence& sent, LayoutMode mode) {
  ArcDiagram d;
  d.mode = mode;
  std::vector<double> widths;
  for (const auto& t : sent.tokens) widths.push_back(label_width(t));

  if (mode == LayoutMode::ArcsHorizontal) {
    const double slot = (widths.empty() ? 1.0 : *std::max_element(widths.begin(), widths.end())) + kGap;
    for (std::size_t i = 0; i < sent.size(); ++i) {
      const auto& t = sent.tokens[i];
      d.nodes.push_back({t.id, (static_cast<double>(i) + 0.5) * slot, 0.0, widths[i], t.form,
                         t.upos.value_or("")});
    }
    d.width = static_cast<double>(sent.size()) * slot;
  } else {
    double left = 0;
    for (std::size_t i = 0; i < sent.size(); ++i) {
      const auto& t = sent.tokens[i];
      d.nodes.push_back({t.id, left + (widths[i] + kGap) / 2, 0.0, widths[i], t.form,
                         t.upos.value_or("")});
      left += widths[i] + kGap;
    }
    d.width = left;
  }

  const auto x_of = [&](int id) { return d.nodes[static_cast<std::size_t>(id - 1)].x; };

  // Arcs between tokens get nested levels; root attachments rise above all of them.
  std::vector<std::pair<int, int>> arcs;
  std::vector<const Token*> arc_deps;
  std::vector<const Token*> roots;
  for (const auto& t : sent.tokens) {
    if (!t.head) continue;
    if (*t.head == 0) {
      roots.push_back(&t);
    } else {
      arcs.push_back({*t.head, t.id});
      arc_deps.push_back(&t);
    }
  }
  const auto heights = arc_heights(arcs);
  const int top = heights.empty() ? 0 : *std::max_element(heights.begin(), heights.end());

  for (std::size_t k = 0; k < arcs.size(); ++k) {
    const int level = heights[k];
    const double xh = x_of(arcs[k].first);
    const double xd = x_of(arcs[k].second);
    d.edges.push_back({arcs[k].first, arcs[k].second, arc_deps[k]->deprel.value_or(""), level,
                       {{xh, 0.0}, {xh, static_cast<double>(level)},
                        {xd, static_cast<double>(level)}, {xd, 0.0}}});
  }
  for (const Token* r : roots) {
    const double x = x_of(r->id);
    d.edges.push_back({0, r->id, r->deprel.value_or(""), top + 1,
                       {{x, static_cast<double>(top + 1)}, {x, 0.0}}});
  }
  std::stable_sort(d.edges.begin(), d.edges.end(),
                   [](const LayoutEdge& a, const LayoutEdge& b) { return a.dep_id < b.dep_id; });
  d.height = static_cast<double>(top + (roots.empty() ? 0 : 1)) + 2.0;  // arcs plus two label rows
  return d;
}

ArcDiagram vertical(const Sentence& sent) {
  ArcDiagram d;
  d.mode = LayoutMode::TreeVertical;
  const auto n = sent.size();
  std::vector<std::vector<int>> children(n + 1);
  for (const auto& t : sent.tokens) {
    children[t.head ? static_cast<std::size_t>(*t.head) : 0].push_back(t.id);
  }
  double slot = 1.0;
  for (const auto& t : sent.tokens) slot = std::max(slot, label_width(t));
  slot += kGap;

  std::vector<double> xs(n + 1, 0.0);
  std::vector<int> depth(n + 1, 0);
  double next_leaf = 0;
  std::function<void(int, int)> place = [&](int id, int level) {
    depth[static_cast<std::size_t>(id)] = level;
    const auto& kids = children[static_cast<std::size_t>(id)];
    if (kids.empty()) {
      xs[static_cast<std::size_t>(id)] = (next_leaf + 0.5) * slot;
      next_leaf += 1;
      return;
    }
    for (int kid : kids) place(kid, level + 1);
    xs[static_cast<std::size_t>(id)] =
        (xs[static_cast<std::size_t>(kids.front())] + xs[static_cast<std::size_t>(kids.back())]) / 2;
  };
  for (int top : children[0]) place(top, 1);

  int max_depth = 0;
  for (const auto& t : sent.tokens) {
    const auto i = static_cast<std::size_t>(t.id);
    max_depth = std::max(max_depth, depth[i]);
    d.nodes.push_back({t.id, xs[i], static_cast<double>(depth[i]), label_width(t), t.form,
                       t.upos.value_or("")});
  }
  d.width = next_leaf * slot;
  const double root_x = d.width / 2;
  for (const auto& t : sent.tokens) {
    if (!t.head) continue;
    const auto i = static_cast<std::size_t>(t.id);
    const Point from = *t.head == 0
                           ? Point{root_x, 0.0}
                           : Point{xs[static_cast<std::size_t>(*t.head)],
                                   static_cast<double>(depth[static_cast<std::size_t>(*t.head)])};
    d.edges.push_back({*t.head, t.id, t.deprel.value_or(""), depth[i],
                       {from, {xs[i], static_cast<double>(depth[i])}}});
  }
  d.height = static_cast<double>(max_depth) + 1.0;
  return d;
}

}  // namespace

std::string_view layout_mode_name(LayoutMode mode) {
  switch (mode) {
    case LayoutMode::CompactHorizontal: return "compact_horizontal";
    case LayoutMode::ArcsHorizontal: return "arcs_horizontal";
    case LayoutMode::TreeVertical: return "tree_vertical";
  }
  return "compact_horizontal";
}

std::optional<LayoutMode> parse_layout_mode(std::string_view name) {
  for (auto mode : {LayoutMode::CompactHorizontal, LayoutMode::ArcsHorizontal,
                    LayoutMode::TreeVertical}) {
    if (layout_mode_name(mode) == name) return mode;
  }
  return std::nullopt;
}

std::vector<int> arc_heights(std::span<const std::pair<int, int>> arcs) {
  struct Span {
    int lo;
    int hi;
    std::size_t index;
  };
  std::vector<Span> spans;
  spans.reserve(arcs.size());
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    const auto [a, b] = arcs[i];
    spans.push_back({std::min(a, b), std::max(a, b), i});
  }
  std::stable_sort(spans.begin(), spans.end(), [](const Span& x, const Span& y) {
    return (x.hi - x.lo) < (y.hi - y.lo);
  });
  std::vector<int> heights(arcs.size(), 1);
  for (std::size_t i = 0; i < spans.size(); ++i) {
    int inner = 0;
    for (std::size_t j = 0; j < i; ++j) {
      const bool strictly_inside = spans[j].lo >= spans[i].lo && spans[j].hi <= spans[i].hi &&
                                   (spans[j].lo != spans[i].lo || spans[j].hi != spans[i].hi);
      if (strictly_inside) inner = std::max(inner, heights[spans[j].index]);
    }
    heights[spans[i].index] = inner + 1;
  }
  return heights;
}

ArcDiagram layout(const Sentence& sent, LayoutMode mode) {
  check_heads(sent);
  return mode == LayoutMode::TreeVertical ? vertical(sent) : horizontal(sent, mode);
}

std::string render_svg(const ArcDiagram& d) {
  constexpr double kUnit = 9.0;    // px per character unit
  constexpr double kLevel = 18.0;  // px per arc level / tree depth
  constexpr double kMargin = 10.0;
  const bool tree = d.mode == LayoutMode::TreeVertical;
  const double width = d.width * kUnit + 2 * kMargin;
  const double height = (tree ? d.height * 2 : d.height) * kLevel + 2 * kMargin + 24;
  const double baseline = tree ? 0.0 : height - kMargin - 30;

  const auto px = [&](double x) { return kMargin + x * kUnit; };
  const auto py = [&](double y) {
    return tree ? kMargin + 12 + y * 2 * kLevel : baseline - y * kLevel;
  };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" +
         num(height) + "\" viewBox=\"0 0 " + num(width) + " " + num(height) + "\" " +
         "font-family=\"sans-serif\" font-size=\"12\" data-mode=\"" +
         std::string(layout_mode_name(d.mode)) + "\">\n";
  for (const auto& e : d.edges) {
    out += "  <polyline fill=\"none\" stroke=\"#444\" points=\"";
    for (std::size_t i = 0; i < e.anchors.size(); ++i) {
      if (i) out += ' ';
      out += num(px(e.anchors[i].x)) + "," + num(py(e.anchors[i].y));
    }
    out += "\"/>\n";
    const auto& mid = e.anchors.size() >= 3 ? e.anchors[1] : e.anchors.front();
    const auto& end = e.anchors.size() >= 3 ? e.anchors[2] : e.anchors.back();
    out += "  <text text-anchor=\"middle\" font-size=\"10\" fill=\"#06c\" x=\"" +
           num(px((mid.x + end.x) / 2)) + "\" y=\"" + num(py(mid.y) - 2) + "\">" +
           xml_escape(e.deprel) + "</text>\n";
  }
  for (const auto& node : d.nodes) {
    const double y = tree ? py(node.y) + 14 : baseline + 14;
    out += "  <text text-anchor=\"middle\" x=\"" + num(px(node.x)) + "\" y=\"" + num(y) + "\">" +
           xml_escape(node.label) + "</text>\n";
    if (!node.sublabel.empty()) {
      out += "  <text text-anchor=\"middle\" font-size=\"10\" fill=\"#888\" x=\"" + num(px(node.x)) +
             "\" y=\"" + num(y + 12) + "\">" + xml_escape(node.sublabel) + "</text>\n";
    }
  }
  out += "</svg>\n";
  return out;
}

}  // namespace boat
