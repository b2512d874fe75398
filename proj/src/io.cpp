#include "sbridge/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "sbridge/error.hpp"

namespace sbridge {

namespace {

using nlohmann::json;

std::string strip_comment(std::string_view line) {
  const auto hash = line.find('#');
  return std::string(line.substr(0, hash));
}

std::vector<std::string> split_fields(const std::string& line) {
  std::string s = line;
  std::replace(s.begin(), s.end(), ',', ' ');
  std::replace(s.begin(), s.end(), '\t', ' ');
  std::replace(s.begin(), s.end(), '\r', ' ');
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

[[noreturn]] void parse_fail(std::size_t line, const std::string& what) {
  fail(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + what);
}

double parse_double(const std::string& tok, std::size_t line) {
  double v = 0.0;
  const char* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, v);
  if (ec != std::errc() || ptr != end) parse_fail(line, "'" + tok + "' is not a number");
  return v;
}

std::size_t parse_node(const std::string& tok, std::size_t line) {
  std::size_t v = 0;
  const char* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, v);
  if (ec != std::errc() || ptr != end || v == 0) parse_fail(line, "'" + tok + "' is not a 1-based node number");
  return v;
}

bool looks_like_json(std::string_view text) {
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    return c == '{' || c == '[';
  }
  return false;
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::ParseError, std::string("malformed JSON: ") + e.what());
  }
}

std::vector<std::string> lines_of(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto nl = text.find('\n', start);
    const auto stop = nl == std::string_view::npos ? text.size() : nl;
    out.emplace_back(text.substr(start, stop - start));
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  return out;
}

double json_number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(ErrorCode::ParseError, where + " is not a number");
  return j.get<double>();
}

}  // namespace

WeightedDigraph parse_graph(std::string_view text) {
  return looks_like_json(text) ? parse_graph_json(text) : parse_graph_text(text);
}

WeightedDigraph parse_graph_text(std::string_view text) {
  struct Edge {
    std::size_t line, src, dst;
    double length;
  };
  std::vector<Edge> edges;
  std::size_t n = 0;
  const auto lines = lines_of(text);
  for (std::size_t k = 0; k < lines.size(); ++k) {
    const auto f = split_fields(strip_comment(lines[k]));
    if (f.empty()) continue;
    if (f.size() < 2 || f.size() > 3) parse_fail(k + 1, "expected 'src dst [length]'");
    Edge e{k + 1, parse_node(f[0], k + 1), parse_node(f[1], k + 1), 1.0};
    if (f.size() == 3) e.length = parse_double(f[2], k + 1);
    if (!std::isfinite(e.length) || e.length < 0.0) parse_fail(k + 1, "edge length must be finite and >= 0");
    n = std::max({n, e.src, e.dst});
    edges.push_back(e);
  }
  if (edges.empty()) fail(ErrorCode::ParseError, "graph has no edges");
  WeightedDigraph g{NodeSet(n)};
  for (const auto& e : edges) {
    if (g.has_edge(e.src - 1, e.dst - 1))
      parse_fail(e.line, "duplicate edge " + std::to_string(e.src) + " -> " + std::to_string(e.dst));
    g.add_edge(e.src - 1, e.dst - 1, e.length);
  }
  return g;
}

WeightedDigraph parse_graph_json(std::string_view text) {
  const json doc = parse_json(text);
  if (!doc.is_object() || !doc.contains("edges")) fail(ErrorCode::ParseError, "graph document needs an 'edges' array");

  std::optional<NodeSet> nodes;
  if (doc.contains("nodes")) {
    const json& jn = doc["nodes"];
    if (jn.is_number_unsigned() && jn.get<std::size_t>() > 0) {
      nodes.emplace(jn.get<std::size_t>());
    } else if (jn.is_array() && !jn.empty()) {
      std::vector<std::string> labels;
      for (const auto& l : jn) {
        if (l.is_string())
          labels.push_back(l.get<std::string>());
        else if (l.is_number_integer())
          labels.push_back(std::to_string(l.get<long long>()));
        else
          fail(ErrorCode::ParseError, "node labels must be strings or integers");
      }
      try {
        nodes.emplace(std::move(labels));
      } catch (const Error& e) {
        fail(ErrorCode::ParseError, e.what());
      }
    } else {
      fail(ErrorCode::ParseError, "'nodes' must be a positive count or a label array");
    }
  }

  struct Edge {
    json src, dst;
    double length;
  };
  std::vector<Edge> edges;
  const json& je = doc["edges"];
  if (!je.is_array() || je.empty()) fail(ErrorCode::ParseError, "'edges' must be a nonempty array");
  for (std::size_t k = 0; k < je.size(); ++k) {
    const std::string where = "edge " + std::to_string(k + 1);
    const json& e = je[k];
    Edge out{};
    if (e.is_array()) {
      if (e.size() < 2 || e.size() > 3) fail(ErrorCode::ParseError, where + ": expected [src, dst, length?]");
      out = {e[0], e[1], e.size() == 3 ? json_number(e[2], where + " length") : 1.0};
    } else if (e.is_object() && e.contains("src") && e.contains("dst")) {
      out = {e["src"], e["dst"], e.contains("length") ? json_number(e["length"], where + " length") : 1.0};
    } else {
      fail(ErrorCode::ParseError, where + ": expected an array or an object with src and dst");
    }
    if (!std::isfinite(out.length) || out.length < 0.0)
      fail(ErrorCode::ParseError, where + ": length must be finite and >= 0");
    edges.push_back(std::move(out));
  }

  std::size_t max_number = 0;
  for (const auto& e : edges)
    for (const json* end : {&e.src, &e.dst})
      if (end->is_number_unsigned()) max_number = std::max(max_number, end->get<std::size_t>());
  if (!nodes) {
    if (max_number == 0) fail(ErrorCode::ParseError, "labelled edges need a 'nodes' array");
    nodes.emplace(max_number);
  }

  auto resolve = [&](const json& end, const std::string& where) -> std::size_t {
    if (end.is_number_unsigned()) {
      const auto v = end.get<std::size_t>();
      if (v >= 1 && v <= nodes->size()) {
        if (!nodes->has_labels()) return v - 1;
        if (auto hit = nodes->find(std::to_string(v))) return *hit;
        return v - 1;
      }
    } else if (end.is_string()) {
      if (auto hit = nodes->find(end.get<std::string>())) return *hit;
    }
    fail(ErrorCode::ParseError, where + ": unknown node " + end.dump());
  };

  WeightedDigraph g{*nodes};
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const std::string where = "edge " + std::to_string(k + 1);
    const std::size_t s = resolve(edges[k].src, where), d = resolve(edges[k].dst, where);
    if (g.has_edge(s, d))
      fail(ErrorCode::ParseError, where + ": duplicate edge " + g.nodes().label(s) + " -> " + g.nodes().label(d));
    g.add_edge(s, d, edges[k].length);
  }
  return g;
}

Vector parse_vector(std::string_view text) {
  Vector out;
  if (looks_like_json(text)) {
    const json doc = parse_json(text);
    if (!doc.is_array()) fail(ErrorCode::ParseError, "expected a JSON array of numbers");
    for (std::size_t k = 0; k < doc.size(); ++k) out.push_back(json_number(doc[k], "entry " + std::to_string(k + 1)));
  } else {
    const auto lines = lines_of(text);
    for (std::size_t k = 0; k < lines.size(); ++k)
      for (const auto& tok : split_fields(strip_comment(lines[k]))) out.push_back(parse_double(tok, k + 1));
  }
  if (out.empty()) fail(ErrorCode::ParseError, "vector is empty");
  return out;
}

Matrix parse_matrix(std::string_view text) {
  std::vector<Vector> rows;
  if (looks_like_json(text)) {
    const json doc = parse_json(text);
    if (!doc.is_array()) fail(ErrorCode::ParseError, "expected a JSON array of rows");
    for (std::size_t r = 0; r < doc.size(); ++r) {
      if (!doc[r].is_array()) fail(ErrorCode::ParseError, "row " + std::to_string(r + 1) + " is not an array");
      Vector row;
      for (const auto& v : doc[r]) row.push_back(json_number(v, "row " + std::to_string(r + 1) + " entry"));
      rows.push_back(std::move(row));
    }
  } else {
    const auto lines = lines_of(text);
    std::size_t first_line = 0;
    for (std::size_t k = 0; k < lines.size(); ++k) {
      const auto f = split_fields(strip_comment(lines[k]));
      if (f.empty()) continue;
      Vector row;
      for (const auto& tok : f) row.push_back(parse_double(tok, k + 1));
      if (!rows.empty() && row.size() != rows.front().size())
        parse_fail(k + 1, "row has " + std::to_string(row.size()) + " entries, line " +
                              std::to_string(first_line + 1) + " has " + std::to_string(rows.front().size()));
      if (rows.empty()) first_line = k;
      rows.push_back(std::move(row));
    }
  }
  if (rows.empty() || rows.front().empty()) fail(ErrorCode::ParseError, "matrix is empty");
  for (std::size_t r = 1; r < rows.size(); ++r)
    if (rows[r].size() != rows[0].size()) fail(ErrorCode::ParseError, "matrix rows have different lengths");
  return Matrix::from_rows(rows);
}

DensityTable parse_density_table(std::string_view text) {
  DensityTable t;
  const auto lines = lines_of(text);
  for (std::size_t k = 0; k < lines.size(); ++k) {
    const auto f = split_fields(strip_comment(lines[k]));
    if (f.empty()) continue;
    if (f.size() != 2) parse_fail(k + 1, "expected two columns 'x value'");
    const double x = parse_double(f[0], k + 1), v = parse_double(f[1], k + 1);
    if (!std::isfinite(x) || !std::isfinite(v)) parse_fail(k + 1, "values must be finite");
    if (v < 0.0) parse_fail(k + 1, "density value is negative");
    if (!t.x.empty() && !(x > t.x.back())) parse_fail(k + 1, "abscissae must be strictly increasing");
    t.x.push_back(x);
    t.value.push_back(v);
  }
  if (t.x.size() < 2) fail(ErrorCode::ParseError, "density table needs at least two rows");
  return t;
}

GridDensity density_on_grid(const Grid& grid, const DensityTable& table) {
  Vector v(grid.size(), 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid[i];
    if (x < table.x.front() || x > table.x.back()) continue;
    const auto it = std::upper_bound(table.x.begin(), table.x.end(), x);
    if (it == table.x.end()) {
      v[i] = table.value.back();
      continue;
    }
    const std::size_t k = static_cast<std::size_t>(it - table.x.begin());
    const double w = (x - table.x[k - 1]) / (table.x[k] - table.x[k - 1]);
    v[i] = (1.0 - w) * table.value[k - 1] + w * table.value[k];
  }
  return GridDensity::normalize(grid, v);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::InvalidArgument, "cannot read file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double report_round(double x) {
  if (!std::isfinite(x) || x == 0.0) return x == 0.0 ? 0.0 : x;
  return std::strtod(format_number(x).c_str(), nullptr);
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

}  // namespace sbridge
