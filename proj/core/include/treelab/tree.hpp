#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "treelab/offspring.hpp"

namespace treelab {

// Canonical vertex identifier: a tuple of positive child indices, the empty
// tuple being the root.
class VertexPath {
 public:
  VertexPath() = default;
  explicit VertexPath(std::vector<std::uint32_t> elems);

  std::size_t depth() const { return elems_.size(); }
  bool is_root() const { return elems_.empty(); }
  VertexPath child(std::uint32_t i) const;
  VertexPath genitor() const;
  const std::vector<std::uint32_t>& elems() const { return elems_; }

  bool operator==(const VertexPath&) const = default;

  // "-" for the root, else dot-separated indices like "1.2.1".
  std::string to_string() const;
  static VertexPath parse(const std::string& text);

 private:
  std::vector<std::uint32_t> elems_;
};

struct BudgetExceeded : std::runtime_error {
  explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

// Lazily realized rooted random tree: the child count of any vertex is a
// pure function of (seed, path), so two traversals always agree.
class TreeStream {
 public:
  TreeStream(ChildLaw law, std::uint64_t seed);

  const ChildLaw& law() const { return law_; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t root_key() const { return root_key_; }

  std::uint64_t key_of(const VertexPath& v) const;
  std::uint32_t child_count(const VertexPath& v) const;
  std::uint32_t child_count_by_key(std::uint64_t vertex_key) const;

 private:
  ChildLaw law_;
  std::uint64_t seed_ = 0;
  std::uint64_t root_key_ = 0;
};

// Materialized finite tree in breadth-first order; children of any vertex
// occupy a contiguous index range and carry sibling indices 1..n_v.
class FiniteTree {
 public:
  static FiniteTree single_root();
  static FiniteTree empty();

  std::size_t size() const { return parent_.size(); }
  bool is_empty() const { return parent_.empty(); }
  std::uint32_t max_depth() const;

  std::int64_t parent(std::size_t v) const { return parent_[v]; }
  std::uint32_t sibling_index(std::size_t v) const { return sibling_index_[v]; }
  std::uint32_t depth(std::size_t v) const { return depth_[v]; }
  std::uint32_t n_children(std::size_t v) const { return n_children_[v]; }
  std::size_t first_child(std::size_t v) const { return first_child_[v]; }

  VertexPath path_of(std::size_t v) const;
  std::uint64_t count_at_depth(std::uint32_t k) const;

  // One line per vertex, `path<TAB>n_children`, root first.
  void serialize(std::ostream& out) const;
  static FiniteTree parse(std::istream& in);

  friend FiniteTree truncate(const TreeStream&, std::uint32_t, std::uint64_t);
  friend FiniteTree iterative_prune(const FiniteTree&, std::uint32_t, std::uint32_t);

 private:
  std::vector<std::int64_t> parent_;           // -1 for the root
  std::vector<std::uint32_t> sibling_index_;   // 1-based; 0 for the root
  std::vector<std::uint32_t> depth_;
  std::vector<std::uint32_t> n_children_;
  std::vector<std::size_t> first_child_;
};

// Materialize the stream down to `depth` generations (inclusive).
FiniteTree truncate(const TreeStream& stream, std::uint32_t depth,
                    std::uint64_t vertex_budget = 10'000'000);

// `rounds` synchronous pruning passes: a pass removes every vertex whose
// surviving child count is below `threshold`. Returns the subtree still
// hanging off the root (empty if the root itself was removed).
FiniteTree iterative_prune(const FiniteTree& tree, std::uint32_t threshold,
                           std::uint32_t rounds);

}  // namespace treelab
