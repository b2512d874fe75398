#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "sbridge/core.hpp"
#include "sbridge/grid1d.hpp"

namespace sbridge {

// Graph files: either text lines "src dst [length]" (1-based node numbers,
// length defaults to 1, '#' starts a comment) or a JSON document
//   {"nodes": 9 | ["a", ...], "edges": [[src, dst, length?] | {"src", "dst", "length"}]}
// JSON edges use 1-based numbers or node labels. Node count for text input is
// the largest number seen.
WeightedDigraph parse_graph(std::string_view text);
WeightedDigraph parse_graph_text(std::string_view text);
WeightedDigraph parse_graph_json(std::string_view text);

// Numbers separated by whitespace or commas, '#' comments; or a JSON array.
Vector parse_vector(std::string_view text);
// One row per line; or a JSON array of arrays. Rows must have equal length.
Matrix parse_matrix(std::string_view text);

struct DensityTable {
  Vector x;
  Vector value;
};

// Two columns "x value" per line, x strictly increasing.
DensityTable parse_density_table(std::string_view text);
// Linear interpolation of the table onto the grid, zero outside its range,
// normalized to unit integral.
GridDensity density_on_grid(const Grid& grid, const DensityTable& table);

std::string read_text_file(const std::string& path);

// Rounds to 12 significant digits, the precision every report carries.
double report_round(double x);
std::string format_number(double x);

}  // namespace sbridge
