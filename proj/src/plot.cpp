#include "treepca/plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <sstream>

#include "treepca/errors.hpp"
#include "treepca/format.hpp"

namespace treepca {

namespace {

// Cell geometry lives on a grid 6x finer than the lattice, so lattice
// points, edge midpoints and triangle centroids all have integer
// barycentric coordinates (a, b) with c implied.
using GridPoint = std::array<long, 2>;

constexpr double kSide = 520.0;
constexpr double kLeft = 40.0;
constexpr double kBase = 480.0;

const std::array<std::array<int, 3>, 6> kDirections{{{1, -1, 0}, {1, 0, -1}, {0, 1, -1}, {-1, 1, 0}, {-1, 0, 1}, {0, -1, 1}}};

std::array<double, 2> to_canvas(double p0, double /*p1*/, double p2) {
  // v0 at the top, v1 bottom left, v2 bottom right
  const double height = kSide * std::sqrt(3.0) / 2.0;
  return {kLeft + p2 * kSide + p0 * kSide / 2.0, kBase - p0 * height};
}

std::array<double, 2> grid_to_canvas(const GridPoint& g, long scale) {
  const double a = static_cast<double>(g[0]) / static_cast<double>(scale);
  const double b = static_cast<double>(g[1]) / static_cast<double>(scale);
  return to_canvas(a, b, 1.0 - a - b);
}

// Dual cell of lattice point (a, b, c) as a counter-clockwise grid polygon.
std::vector<GridPoint> cell_polygon(int a, int b, int c) {
  const std::array<int, 3> p{a, b, c};
  auto valid = [&](int k) {
    for (int i = 0; i < 3; ++i)
      if (p[i] + kDirections[k][i] < 0) return false;
    return true;
  };
  std::vector<GridPoint> out;
  for (int k = 0; k < 6; ++k) {
    const int next = (k + 1) % 6;
    const auto& d = kDirections[k];
    const auto& e = kDirections[next];
    if (valid(k)) out.push_back({6L * p[0] + 3L * d[0], 6L * p[1] + 3L * d[1]});
    if (valid(k) && valid(next)) {
      out.push_back({6L * p[0] + 2L * (d[0] + e[0]), 6L * p[1] + 2L * (d[1] + e[1])});
    } else if (valid(k)) {
      out.push_back({6L * p[0], 6L * p[1]});
    }
  }
  return out;
}

// Outline loops of a union of cells: edges shared by two cells cancel.
std::vector<std::vector<GridPoint>> outline(const std::vector<std::vector<GridPoint>>& cells) {
  std::map<std::pair<GridPoint, GridPoint>, int> edges;
  for (const auto& cell : cells)
    for (std::size_t i = 0; i < cell.size(); ++i) {
      const auto& u = cell[i];
      const auto& v = cell[(i + 1) % cell.size()];
      auto reverse = edges.find({v, u});
      if (reverse != edges.end()) {
        if (--reverse->second == 0) edges.erase(reverse);
      } else {
        ++edges[{u, v}];
      }
    }
  std::multimap<GridPoint, GridPoint> next;
  for (const auto& [e, count] : edges)
    for (int i = 0; i < count; ++i) next.emplace(e.first, e.second);
  std::vector<std::vector<GridPoint>> loops;
  while (!next.empty()) {
    auto it = next.begin();
    const GridPoint start = it->first;
    std::vector<GridPoint> loop{start};
    GridPoint at = it->second;
    next.erase(it);
    while (at != start) {
      loop.push_back(at);
      auto step = next.find(at);
      if (step == next.end()) break;
      at = step->second;
      next.erase(step);
    }
    // drop vertices in the middle of straight runs
    std::vector<GridPoint> simple;
    for (std::size_t i = 0; i < loop.size(); ++i) {
      const auto& prev = loop[(i + loop.size() - 1) % loop.size()];
      const auto& cur = loop[i];
      const auto& nxt = loop[(i + 1) % loop.size()];
      const long cross = (cur[0] - prev[0]) * (nxt[1] - cur[1]) - (cur[1] - prev[1]) * (nxt[0] - cur[0]);
      if (cross != 0) simple.push_back(cur);
    }
    loops.push_back(simple.empty() ? loop : simple);
  }
  return loops;
}

std::string colour(std::size_t index) {
  static const std::array<const char*, 12> palette{"#8dd3c7", "#ffffb3", "#bebada", "#fb8072", "#80b1d3", "#fdb462",
                                                   "#b3de69", "#fccde5", "#d9d9d9", "#bc80bd", "#ccebc5", "#ffed6f"};
  return palette[index % palette.size()];
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    if (ch == '&') out += "&amp;";
    else if (ch == '<') out += "&lt;";
    else if (ch == '>') out += "&gt;";
    else if (ch == '"') out += "&quot;";
    else out += ch;
  }
  return out;
}

std::string fixed(double v) {
  std::ostringstream s;
  s.imbue(std::locale::classic());
  s.setf(std::ios::fixed);
  s.precision(2);
  s << v;
  return s.str();
}

void check_map(const TopologyMap& map) {
  if (map.resolution < 1 || map.cells.empty() || map.cells.front().weights.size() != 3)
    throw UnsupportedOrder("simplex plots need a k = 2 topology map");
}

}  // namespace

std::string simplex_svg(const TopologyMap& map, const LeafSet& leaves, const std::vector<std::vector<double>>& dots) {
  check_map(map);
  const long scale = 6L * map.resolution;
  std::map<int, std::vector<std::vector<GridPoint>>> region_cells;
  std::map<int, std::size_t> region_topology;
  for (const auto& cell : map.cells) {
    const int a = static_cast<int>(std::lround(cell.weights[0] * map.resolution));
    const int b = static_cast<int>(std::lround(cell.weights[1] * map.resolution));
    region_cells[cell.region].push_back(cell_polygon(a, b, map.resolution - a - b));
    const auto pos = std::find(map.topologies.begin(), map.topologies.end(), cell.topology);
    region_topology[cell.region] = static_cast<std::size_t>(pos - map.topologies.begin());
  }

  std::ostringstream svg;
  svg.imbue(std::locale::classic());
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kPlotWidth << "\" height=\"" << kPlotHeight
      << "\" viewBox=\"0 0 " << kPlotWidth << " " << kPlotHeight << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (const auto& [region, cells] : region_cells) {
    const std::size_t topo = region_topology[region];
    svg << "<path class=\"region\" data-region=\"" << region << "\" data-topology=\"" << topo << "\" fill=\"" << colour(topo)
        << "\" stroke=\"#555555\" stroke-width=\"0.6\" d=\"";
    for (const auto& loop : outline(cells)) {
      for (std::size_t i = 0; i < loop.size(); ++i) {
        const auto xy = grid_to_canvas(loop[i], scale);
        svg << (i == 0 ? "M" : "L") << fixed(xy[0]) << " " << fixed(xy[1]) << " ";
      }
      svg << "Z ";
    }
    svg << "\"/>\n";
  }
  const auto c0 = to_canvas(1, 0, 0), c1 = to_canvas(0, 1, 0), c2 = to_canvas(0, 0, 1);
  svg << "<polygon fill=\"none\" stroke=\"black\" stroke-width=\"1.2\" points=\"" << fixed(c0[0]) << "," << fixed(c0[1]) << " "
      << fixed(c1[0]) << "," << fixed(c1[1]) << " " << fixed(c2[0]) << "," << fixed(c2[1]) << "\"/>\n";
  svg << "<text x=\"" << fixed(c0[0]) << "\" y=\"" << fixed(c0[1] - 8) << "\" font-size=\"13\" text-anchor=\"middle\">v0</text>\n";
  svg << "<text x=\"" << fixed(c1[0]) << "\" y=\"" << fixed(c1[1] + 18) << "\" font-size=\"13\" text-anchor=\"middle\">v1</text>\n";
  svg << "<text x=\"" << fixed(c2[0]) << "\" y=\"" << fixed(c2[1] + 18) << "\" font-size=\"13\" text-anchor=\"middle\">v2</text>\n";
  for (const auto& p : dots) {
    if (p.size() != 3) throw UnsupportedOrder("dots need three weights");
    const auto xy = to_canvas(p[0], p[1], p[2]);
    svg << "<circle class=\"datum\" cx=\"" << fixed(xy[0]) << "\" cy=\"" << fixed(xy[1]) << "\" r=\"2.5\" fill=\"black\"/>\n";
  }
  for (std::size_t t = 0; t < map.topologies.size(); ++t) {
    const double y = 18.0 + 14.0 * static_cast<double>(t);
    svg << "<rect x=\"8\" y=\"" << fixed(y - 9) << "\" width=\"10\" height=\"10\" fill=\"" << colour(t) << "\" stroke=\"#555555\"/>\n";
    svg << "<text x=\"22\" y=\"" << fixed(y) << "\" font-size=\"10\">" << t << ": "
        << xml_escape(map.topologies[t].to_string(leaves)) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string lattice_csv(const TopologyMap& map, const LeafSet& leaves) {
  check_map(map);
  std::ostringstream out;
  out << "p0,p1,p2,topology,topology_index,region\n";
  for (const auto& cell : map.cells) {
    const auto pos = std::find(map.topologies.begin(), map.topologies.end(), cell.topology);
    out << format_number(cell.weights[0]) << "," << format_number(cell.weights[1]) << "," << format_number(cell.weights[2]) << ","
        << cell.topology.to_string(leaves) << "," << (pos - map.topologies.begin()) << "," << cell.region << "\n";
  }
  return out.str();
}

}  // namespace treepca
