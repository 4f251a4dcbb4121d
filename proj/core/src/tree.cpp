#include "treelab/tree.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "treelab/rng.hpp"

namespace treelab {

VertexPath::VertexPath(std::vector<std::uint32_t> elems) : elems_(std::move(elems)) {
  for (auto e : elems_)
    if (e < 1) throw std::invalid_argument("vertex path entries are 1-based");
}

VertexPath VertexPath::child(std::uint32_t i) const {
  if (i < 1) throw std::invalid_argument("child index is 1-based");
  auto e = elems_;
  e.push_back(i);
  return VertexPath(std::move(e));
}

VertexPath VertexPath::genitor() const {
  if (is_root()) throw std::invalid_argument("root has no genitor");
  auto e = elems_;
  e.pop_back();
  return VertexPath(std::move(e));
}

std::string VertexPath::to_string() const {
  if (is_root()) return "-";
  std::ostringstream os;
  for (std::size_t i = 0; i < elems_.size(); ++i) {
    if (i) os << '.';
    os << elems_[i];
  }
  return os.str();
}

VertexPath VertexPath::parse(const std::string& text) {
  if (text == "-") return VertexPath();
  std::vector<std::uint32_t> elems;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, '.')) {
    int v = std::stoi(item);
    if (v < 1) throw std::invalid_argument("bad vertex path '" + text + "'");
    elems.push_back(static_cast<std::uint32_t>(v));
  }
  if (elems.empty()) throw std::invalid_argument("bad vertex path '" + text + "'");
  return VertexPath(std::move(elems));
}

TreeStream::TreeStream(ChildLaw law, std::uint64_t seed)
    : law_(std::move(law)), seed_(seed), root_key_(trial_key(seed, 0)) {}

std::uint64_t TreeStream::key_of(const VertexPath& v) const {
  std::uint64_t key = root_key_;
  for (auto i : v.elems()) key = child_key(key, i);
  return key;
}

std::uint32_t TreeStream::child_count(const VertexPath& v) const {
  return child_count_by_key(key_of(v));
}

std::uint32_t TreeStream::child_count_by_key(std::uint64_t vertex_key) const {
  if (law_.is_regular()) return law_.regular_k();
  return law_.sample(unit_draw(vertex_key, kStreamChildCount));
}

FiniteTree FiniteTree::single_root() {
  FiniteTree t;
  t.parent_ = {-1};
  t.sibling_index_ = {0};
  t.depth_ = {0};
  t.n_children_ = {0};
  t.first_child_ = {0};
  return t;
}

FiniteTree FiniteTree::empty() { return FiniteTree{}; }

std::uint32_t FiniteTree::max_depth() const {
  return is_empty() ? 0 : depth_.back();
}

VertexPath FiniteTree::path_of(std::size_t v) const {
  std::vector<std::uint32_t> elems;
  for (std::size_t cur = v; parent_[cur] >= 0; cur = static_cast<std::size_t>(parent_[cur]))
    elems.push_back(sibling_index_[cur]);
  std::reverse(elems.begin(), elems.end());
  return VertexPath(std::move(elems));
}

std::uint64_t FiniteTree::count_at_depth(std::uint32_t k) const {
  std::uint64_t n = 0;
  for (auto d : depth_) n += (d == k);
  return n;
}

void FiniteTree::serialize(std::ostream& out) const {
  for (std::size_t v = 0; v < size(); ++v)
    out << path_of(v).to_string() << '\t' << n_children_[v] << '\n';
}

FiniteTree FiniteTree::parse(std::istream& in) {
  // Rebuild breadth-first regardless of input line order beyond "root first".
  std::map<std::vector<std::uint32_t>, std::uint32_t> entries;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw std::invalid_argument("tree line without tab: '" + line + "'");
    VertexPath p = VertexPath::parse(line.substr(0, tab));
    int n = std::stoi(line.substr(tab + 1));
    if (n < 0) throw std::invalid_argument("negative child count");
    if (first && !p.is_root()) throw std::invalid_argument("root line must come first");
    first = false;
    if (!entries.emplace(p.elems(), static_cast<std::uint32_t>(n)).second)
      throw std::invalid_argument("duplicate vertex " + p.to_string());
  }
  if (entries.empty()) return FiniteTree::empty();

  FiniteTree t;
  std::vector<std::pair<std::vector<std::uint32_t>, std::int64_t>> frontier;  // path, index
  auto root = entries.find({});
  if (root == entries.end()) throw std::invalid_argument("missing root line");
  t.parent_ = {-1};
  t.sibling_index_ = {0};
  t.depth_ = {0};
  t.n_children_ = {root->second};
  t.first_child_ = {0};
  frontier.push_back({{}, 0});
  std::size_t visited = 1;
  while (!frontier.empty()) {
    std::vector<std::pair<std::vector<std::uint32_t>, std::int64_t>> next;
    for (auto& [path, idx] : frontier) {
      t.first_child_[static_cast<std::size_t>(idx)] = t.parent_.size();
      const std::uint32_t n = t.n_children_[static_cast<std::size_t>(idx)];
      for (std::uint32_t i = 1; i <= n; ++i) {
        auto child_path = path;
        child_path.push_back(i);
        auto it = entries.find(child_path);
        if (it == entries.end())
          throw std::invalid_argument("vertex with missing child " + std::to_string(i));
        ++visited;
        t.parent_.push_back(idx);
        t.sibling_index_.push_back(i);
        t.depth_.push_back(t.depth_[static_cast<std::size_t>(idx)] + 1);
        t.n_children_.push_back(it->second);
        t.first_child_.push_back(0);
        next.push_back({std::move(child_path), static_cast<std::int64_t>(t.parent_.size() - 1)});
      }
    }
    frontier = std::move(next);
  }
  if (visited != entries.size())
    throw std::invalid_argument("tree has vertices unreachable from the root");
  return t;
}

FiniteTree truncate(const TreeStream& stream, std::uint32_t depth,
                    std::uint64_t vertex_budget) {
  FiniteTree t = FiniteTree::single_root();
  std::vector<std::uint64_t> keys = {stream.root_key()};
  std::size_t level_begin = 0;
  for (std::uint32_t lev = 0; lev < depth; ++lev) {
    const std::size_t level_end = t.parent_.size();
    if (level_begin == level_end) break;  // died out early
    for (std::size_t v = level_begin; v < level_end; ++v) {
      const std::uint32_t n = stream.child_count_by_key(keys[v]);
      t.n_children_[v] = n;
      t.first_child_[v] = t.parent_.size();
      for (std::uint32_t i = 1; i <= n; ++i) {
        if (t.parent_.size() >= vertex_budget)
          throw BudgetExceeded("truncate: vertex budget " +
                               std::to_string(vertex_budget) + " exceeded");
        t.parent_.push_back(static_cast<std::int64_t>(v));
        t.sibling_index_.push_back(i);
        t.depth_.push_back(lev + 1);
        t.n_children_.push_back(0);
        t.first_child_.push_back(t.parent_.size());
        keys.push_back(child_key(keys[v], i));
      }
    }
    level_begin = level_end;
  }
  return t;
}

FiniteTree iterative_prune(const FiniteTree& tree, std::uint32_t threshold,
                           std::uint32_t rounds) {
  if (threshold < 1) throw std::invalid_argument("prune threshold must be >= 1");
  if (tree.is_empty()) return FiniteTree::empty();
  std::vector<char> alive(tree.size(), 1);
  for (std::uint32_t r = 0; r < rounds; ++r) {
    std::vector<char> remove(tree.size(), 0);
    bool any = false;
    for (std::size_t v = 0; v < tree.size(); ++v) {
      if (!alive[v]) continue;
      std::uint32_t surviving = 0;
      const std::size_t fc = tree.first_child(v);
      for (std::uint32_t i = 0; i < tree.n_children(v); ++i)
        surviving += alive[fc + i];
      if (surviving < threshold) {
        remove[v] = 1;
        any = true;
      }
    }
    if (!any) break;
    for (std::size_t v = 0; v < tree.size(); ++v)
      if (remove[v]) alive[v] = 0;
    if (!alive[0]) return FiniteTree::empty();
  }

  // Rebuild the alive subtree below the root, renumbering sibling indices.
  FiniteTree out = FiniteTree::single_root();
  std::vector<std::size_t> src = {0};
  std::size_t level_begin = 0;
  while (level_begin < out.parent_.size()) {
    const std::size_t level_end = out.parent_.size();
    for (std::size_t v = level_begin; v < level_end; ++v) {
      const std::size_t s = src[v];
      out.first_child_[v] = out.parent_.size();
      std::uint32_t idx = 0;
      const std::size_t fc = tree.first_child(s);
      for (std::uint32_t i = 0; i < tree.n_children(s); ++i) {
        const std::size_t c = fc + i;
        if (!alive[c]) continue;
        ++idx;
        out.parent_.push_back(static_cast<std::int64_t>(v));
        out.sibling_index_.push_back(idx);
        out.depth_.push_back(out.depth_[v] + 1);
        out.n_children_.push_back(0);
        out.first_child_.push_back(0);
        src.push_back(c);
      }
      out.n_children_[v] = idx;
    }
    level_begin = level_end;
  }
  return out;
}

}  // namespace treelab
