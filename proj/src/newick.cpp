#include "treepca/newick.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include <nlohmann/json.hpp>

#include "treepca/errors.hpp"
#include "treepca/format.hpp"

namespace treepca {

namespace {

struct RawNode {
  int parent = -1;
  std::vector<int> children;
  std::string label;
  std::optional<double> length;
};

class NewickReader {
 public:
  explicit NewickReader(std::string_view text) : text_(text) {}

  std::vector<RawNode> read() {
    skip();
    if (at_end()) throw NewickSyntaxError("empty Newick string", pos_);
    read_subtree(-1);
    skip();
    if (at_end() || text_[pos_] != ';') throw NewickSyntaxError("expected ';'", pos_);
    ++pos_;
    skip();
    if (!at_end()) throw NewickSyntaxError("trailing characters after ';'", pos_);
    return std::move(nodes_);
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }

  void skip() {
    while (!at_end()) {
      const char c = text_[pos_];
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        ++pos_;
      } else if (c == '[') {
        const auto close = text_.find(']', pos_);
        if (close == std::string_view::npos) throw NewickSyntaxError("unterminated comment", pos_);
        pos_ = close + 1;
      } else {
        break;
      }
    }
  }

  static bool is_label_char(char c) {
    switch (c) {
      case '(': case ')': case ',': case ':': case ';': case '[': case ']': case '\'':
      case ' ': case '\t': case '\n': case '\r':
        return false;
      default:
        return true;
    }
  }

  std::string read_label() {
    skip();
    std::string out;
    if (!at_end() && text_[pos_] == '\'') {
      const std::size_t start = pos_++;
      while (true) {
        if (at_end()) throw NewickSyntaxError("unterminated quoted label", start);
        if (text_[pos_] == '\'') {
          if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '\'') {
            out += '\'';
            pos_ += 2;
            continue;
          }
          ++pos_;
          break;
        }
        out += text_[pos_++];
      }
      return out;
    }
    while (!at_end() && is_label_char(text_[pos_])) out += text_[pos_++];
    std::replace(out.begin(), out.end(), '_', ' ');
    return out;
  }

  std::optional<double> read_length() {
    skip();
    if (at_end() || text_[pos_] != ':') return std::nullopt;
    ++pos_;
    skip();
    const std::size_t start = pos_;
    while (!at_end() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.' ||
                         text_[pos_] == 'e' || text_[pos_] == 'E' || text_[pos_] == '-' || text_[pos_] == '+')) {
      ++pos_;
    }
    double value = 0.0;
    const char* first = text_.data() + start;
    const char* last = text_.data() + pos_;
    if (first != last && *first == '+') ++first;
    auto res = std::from_chars(first, last, value);
    if (start == pos_ || res.ec != std::errc{} || res.ptr != last) throw NewickSyntaxError("malformed branch length", start);
    return value;
  }

  int read_subtree(int parent) {
    skip();
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(RawNode{parent, {}, {}, std::nullopt});
    if (parent >= 0) nodes_[static_cast<std::size_t>(parent)].children.push_back(id);
    if (!at_end() && text_[pos_] == '(') {
      ++pos_;
      while (true) {
        read_subtree(id);
        skip();
        if (at_end()) throw NewickSyntaxError("unexpected end inside '('", pos_);
        if (text_[pos_] == ',') {
          ++pos_;
          continue;
        }
        if (text_[pos_] == ')') {
          ++pos_;
          break;
        }
        throw NewickSyntaxError(std::string("unexpected character '") + text_[pos_] + "'", pos_);
      }
      nodes_[static_cast<std::size_t>(id)].label = read_label();  // internal labels are ignored
    } else {
      const std::size_t at = pos_;
      auto label = read_label();
      if (label.empty()) throw NewickSyntaxError("expected a leaf label or '('", at);
      nodes_[static_cast<std::size_t>(id)].label = std::move(label);
    }
    nodes_[static_cast<std::size_t>(id)].length = read_length();
    return id;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::vector<RawNode> nodes_;
};

bool is_integer(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

bool label_order(const std::string& a, const std::string& b) {
  if (is_integer(a) && is_integer(b) && a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

LeafSetPtr leaf_set_for(const std::vector<std::string>& leaf_labels, const NewickOptions& options) {
  if (options.leaves) {
    if (!options.root_label.empty() && options.leaves->label(0) != options.root_label) {
      throw UnknownRootLabel("root label '" + options.root_label + "' does not match pinned root '" +
                             options.leaves->label(0) + "'");
    }
    if (leaf_labels.size() != options.leaves->size()) {
      throw LeafSetMismatch("tree has " + std::to_string(leaf_labels.size()) + " taxa, expected " +
                            std::to_string(options.leaves->size()));
    }
    for (const auto& l : leaf_labels) {
      if (!options.leaves->index_of(l)) throw LeafSetMismatch("taxon '" + l + "' is not in the leaf set");
    }
    return options.leaves;
  }
  std::string root = options.root_label;
  if (root.empty()) {
    // leaf "0" by convention, else the first label in sorted order
    const bool has_zero = std::find(leaf_labels.begin(), leaf_labels.end(), "0") != leaf_labels.end();
    root = has_zero ? "0" : *std::min_element(leaf_labels.begin(), leaf_labels.end(), label_order);
  }
  if (std::find(leaf_labels.begin(), leaf_labels.end(), root) == leaf_labels.end()) {
    throw UnknownRootLabel("root label '" + root + "' is not a leaf of the tree");
  }
  std::vector<std::string> ordered;
  ordered.push_back(root);
  for (const auto& l : leaf_labels) {
    if (l != root) ordered.push_back(l);
  }
  std::sort(ordered.begin() + 1, ordered.end(), label_order);
  return std::make_shared<const LeafSet>(std::move(ordered));
}

std::string quote_label(const std::string& label) {
  bool plain = !label.empty();
  for (char c : label) {
    if (c == '(' || c == ')' || c == ',' || c == ':' || c == ';' || c == '[' || c == ']' || c == '\'' ||
        c == ' ' || c == '_' || c == '\t') {
      plain = false;
    }
  }
  if (plain) return label;
  std::string out = "'";
  for (char c : label) {
    if (c == '\'') out += '\'';
    out += c;
  }
  return out + "'";
}

}  // namespace

PhyloTree parse_newick(std::string_view text, const NewickOptions& options) {
  auto nodes = NewickReader(text).read();

  std::vector<std::string> leaf_labels;
  for (const auto& node : nodes) {
    if (node.children.empty()) {
      if (std::find(leaf_labels.begin(), leaf_labels.end(), node.label) != leaf_labels.end()) {
        throw DuplicateTaxon("taxon '" + node.label + "' appears more than once");
      }
      leaf_labels.push_back(node.label);
    }
  }
  if (leaf_labels.size() < 2) throw InvalidLeafSet("a tree needs at least two leaves");
  auto leaves = leaf_set_for(leaf_labels, options);

  // Children always follow their parent in `nodes`, so a reverse sweep
  // accumulates leaf clusters bottom-up.
  std::vector<std::uint64_t> cluster(nodes.size(), 0);
  for (std::size_t i = nodes.size(); i-- > 0;) {
    const auto& node = nodes[i];
    if (node.children.empty()) {
      cluster[i] = std::uint64_t{1} << *leaves->index_of(node.label);
    }
    if (node.parent >= 0) cluster[static_cast<std::size_t>(node.parent)] |= cluster[i];
  }

  std::map<std::uint64_t, double> lengths;
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    const auto& node = nodes[i];
    double length = 1.0;
    if (node.length) {
      length = *node.length;
    } else if (options.missing_length == MissingLengthPolicy::error) {
      throw MissingLength("edge above '" + (node.children.empty() ? node.label : std::string("internal node")) +
                          "' has no length");
    }
    std::uint64_t side = cluster[i];
    if (side & 1U) side = (~side) & leaves->full_mask();
    side &= leaves->full_mask();
    // Both edges of a degree-2 node map to the same bipartition and merge.
    lengths[side] += length;
  }

  std::vector<Edge> edges;
  for (const auto& [side, length] : lengths) {
    if (side == 0 || side == leaves->full_mask()) continue;  // root pendant / degenerate
    if (length == 0.0) continue;                             // contracted edge
    edges.push_back({Split(side), length});
  }
  return PhyloTree::validated(std::move(leaves), std::move(edges));
}

namespace {

void write_clade(const PhyloTree& tree, std::uint64_t clade, const std::vector<Edge>& internal, std::string& out) {
  const auto& leaves = *tree.leaves();
  // Children: maximal internal clusters strictly inside `clade`, then singletons.
  std::vector<std::uint64_t> children;
  std::uint64_t covered = 0;
  for (auto it = internal.rbegin(); it != internal.rend(); ++it) {
    const std::uint64_t m = it->split.mask();
    if (m == clade || (m & clade) != m || (m & covered)) continue;
    // sorted by popcount descending, so the first fitting cluster is maximal
    children.push_back(m);
    covered |= m;
  }
  for (std::uint64_t rest = clade & ~covered; rest != 0; rest &= rest - 1) children.push_back(rest & (~rest + 1));
  std::sort(children.begin(), children.end(), [](std::uint64_t a, std::uint64_t b) { return std::countr_zero(a) < std::countr_zero(b); });

  out += '(';
  for (std::size_t k = 0; k < children.size(); ++k) {
    if (k) out += ',';
    const std::uint64_t child = children[k];
    if (std::popcount(child) == 1) {
      out += quote_label(leaves.label(std::countr_zero(child)));
    } else {
      write_clade(tree, child, internal, out);
    }
    out += ':';
    out += format_number(tree.length(Split(child)));
  }
  out += ')';
}

}  // namespace

std::string write_newick(const PhyloTree& tree) {
  const auto& leaves = *tree.leaves();
  auto internal = tree.internal_edges();
  std::stable_sort(internal.begin(), internal.end(), [](const Edge& a, const Edge& b) { return a.split.size() < b.split.size(); });
  std::string body;
  write_clade(tree, leaves.full_mask(), internal, body);
  // body is "(c1,c2,...)"; splice the root leaf in as the first child.
  std::string out = "(" + quote_label(leaves.label(0)) + ":0";
  if (body.size() > 2) out += "," + body.substr(1);
  else out += ")";
  return out + ";";
}

TreeFile parse_tree_lines(std::string_view content, const NewickOptions& options, const std::string& source_name) {
  TreeFile file;
  NewickOptions opts = options;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= content.size()) {
    std::size_t end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    std::string_view line = content.substr(start, end - start);
    ++line_no;
    start = end + 1;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string_view::npos || line[first] == '#') {
      if (end == content.size()) break;
      continue;
    }
    try {
      auto tree = parse_newick(line, opts);
      if (!opts.leaves) opts.leaves = tree.leaves();
      file.trees.push_back(std::move(tree));
      file.line_numbers.push_back(line_no);
    } catch (const DataError& e) {
      throw DataError(source_name + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (end == content.size()) break;
  }
  file.leaves = opts.leaves;
  return file;
}

TreeFile read_tree_file(const std::filesystem::path& path, const NewickOptions& options) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open tree file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  auto file = parse_tree_lines(buffer.str(), options, path.string());
  if (file.trees.empty()) throw DataError(path.string() + ": no trees found");
  return file;
}

void write_tree_file(const std::filesystem::path& path, const std::vector<PhyloTree>& trees, const std::string& header_comment) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  if (!header_comment.empty()) out << "# " << header_comment << '\n';
  for (const auto& t : trees) out << write_newick(t) << '\n';
}

LeafSetPtr parse_leaf_map(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("leaf map is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw DataError("leaf map must be a JSON object {label: index}");
  std::vector<std::string> labels(j.size());
  std::vector<bool> seen(j.size(), false);
  for (const auto& [label, index] : j.items()) {
    if (!index.is_number_integer()) throw DataError("leaf map index for '" + label + "' is not an integer");
    const auto i = index.get<long long>();
    if (i < 0 || i >= static_cast<long long>(labels.size()) || seen[static_cast<std::size_t>(i)]) {
      throw DataError("leaf map indices must be a permutation of 0..N");
    }
    seen[static_cast<std::size_t>(i)] = true;
    labels[static_cast<std::size_t>(i)] = label;
  }
  return std::make_shared<const LeafSet>(std::move(labels));
}

LeafSetPtr read_leaf_map(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open leaf map " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_leaf_map(buffer.str());
}

}  // namespace treepca
