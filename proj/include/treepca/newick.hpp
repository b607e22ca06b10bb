#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "treepca/tree.hpp"

namespace treepca {

enum class MissingLengthPolicy { error, default_one };

struct NewickOptions {
  // Label of the leaf that becomes index 0; empty selects "0" when present,
  // else the first label in sorted order. Must match the pinned root when
  // `leaves` is set.
  std::string root_label;
  MissingLengthPolicy missing_length = MissingLengthPolicy::error;
  // Pins the leaf index order. When null, the root takes index 0 and the
  // other labels are sorted (numerically when all are integers).
  LeafSetPtr leaves;
};

// Parses one Newick string. Rooted and unrooted inputs give the same split
// set; degree-2 nodes are suppressed and zero-length edges contracted.
PhyloTree parse_newick(std::string_view text, const NewickOptions& options);

// Writes the tree hanging from the root leaf's neighbour, root leaf first
// with length 0. Lengths use 12 significant digits; absent pendants are ":0".
std::string write_newick(const PhyloTree& tree);

struct TreeFile {
  LeafSetPtr leaves;
  std::vector<PhyloTree> trees;
  std::vector<std::size_t> line_numbers;  // 1-based source line of each tree
};

// One tree per line; blank lines and lines starting with '#' are skipped.
// All trees must share the first tree's taxa. Errors carry "file:line".
TreeFile read_tree_file(const std::filesystem::path& path, const NewickOptions& options);
TreeFile parse_tree_lines(std::string_view content, const NewickOptions& options, const std::string& source_name = "<input>");

void write_tree_file(const std::filesystem::path& path, const std::vector<PhyloTree>& trees,
                     const std::string& header_comment = "");

// JSON object {label: index} with indices 0..N; index 0 is the root.
LeafSetPtr read_leaf_map(const std::filesystem::path& path);
LeafSetPtr parse_leaf_map(std::string_view json_text);

}  // namespace treepca
