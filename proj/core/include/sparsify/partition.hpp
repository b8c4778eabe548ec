#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "sparsify/grid.hpp"

namespace sparsify {

enum class SkeletonKind { cell, face, edge, vertex };

std::string_view to_string(SkeletonKind kind);

/// Kind of a skeleton set with `normal_axes` interface-normal coordinates.
SkeletonKind skeleton_kind(int dim, int normal_axes);

/// One cell/face/edge/vertex set of the leaf tiling.
///
/// `normal_mask` has bit a set when axis a is interface-normal (the set's
/// coordinate along a equals the anchor's). Sets that share a mask are
/// translates of each other, so `normal_mask` doubles as the stencil class.
struct SkeletonSet {
  SkeletonKind kind = SkeletonKind::cell;
  unsigned normal_mask = 0;
  Coord anchor{0, 0, 0};
  /// Lexicographic in the offsets from `anchor`.
  std::vector<Index> points;
  /// beta = gamma \ points, lexicographic in the offsets from anchor - 1.
  std::vector<Index> beta;
  /// points followed by beta: the canonical column order of the set's rows.
  std::vector<Index> gamma;
};

struct Partition {
  GridSpec grid;
  std::vector<SkeletonSet> sets;
  /// Set id owning each grid index.
  std::vector<int> owner;
  /// Lower corners of the leaf boxes.
  std::vector<Coord> boxes;

  int class_count() const { return 1 << grid.dim(); }
  const SkeletonSet& set_of(Index j) const {
    return sets[static_cast<std::size_t>(owner[static_cast<std::size_t>(j)])];
  }
  /// Row support mu(j) of the sparsified operator.
  std::span<const Index> mu(Index j) const { return set_of(j).gamma; }
};

/// Throws IndivisibleGrid when n is not a multiple of b or the tiling has a
/// single box per axis (neighborhoods would overlap themselves), InvalidGrid
/// when b < 2.
Partition build_partition(const GridSpec& grid);

/// Torus l-infinity dilation by one grid step, sorted by linear index.
std::vector<Index> dilate(const GridSpec& grid, std::span<const Index> points);

/// One elimination group of the nested-dissection ordering.
struct SeparatorNode {
  std::vector<Index> vars;  // sorted by linear index
  int parent = -1;
  std::vector<int> children;
  int depth = 0;
  bool is_leaf = false;
};

/// Nested-dissection tree over the torus, nodes stored in postorder (every
/// child precedes its parent; the root is last).
///
/// The root holds the torus seam (every point with some coordinate 0). Below
/// it the open box (0, n)^d is bisected along its longest axis at a leaf-box
/// interface until single leaf boxes remain, whose cells are the leaves.
struct SeparatorTree {
  std::vector<SeparatorNode> nodes;
  /// first_descendant[t] .. t is the postorder range of t's subtree.
  std::vector<int> first_descendant;

  int root() const { return static_cast<int>(nodes.size()) - 1; }
  bool in_subtree(int node, int of) const {
    return first_descendant[static_cast<std::size_t>(of)] <= node && node <= of;
  }
  /// Concatenation of node vars in postorder: position -> grid index.
  std::vector<Index> permutation() const;
};

SeparatorTree separator_tree(const Partition& partition);

}  // namespace sparsify
