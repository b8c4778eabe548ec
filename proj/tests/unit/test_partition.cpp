#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "sparsify/errors.hpp"
#include "sparsify/partition.hpp"
#include "sparsify/reference.hpp"
#include "sparsify/sparse_matrix.hpp"

using namespace sparsify;

namespace {

std::map<SkeletonKind, int> count_kinds(const Partition& p) {
  std::map<SkeletonKind, int> out;
  for (const SkeletonSet& s : p.sets) ++out[s.kind];
  return out;
}

std::size_t expected_points(int dim, int b, unsigned mask) {
  std::size_t n = 1;
  for (int a = 0; a < dim; ++a) n *= (mask >> a & 1u) ? 1 : static_cast<std::size_t>(b - 1);
  return n;
}

std::size_t expected_gamma(int dim, int b, unsigned mask) {
  std::size_t n = 1;
  for (int a = 0; a < dim; ++a) n *= (mask >> a & 1u) ? 3 : static_cast<std::size_t>(b + 1);
  return n;
}

// Pattern with row j supported on mu(j).
SparseMatrix mu_pattern(const Partition& p) {
  std::vector<Index> ptr{0}, cols;
  std::vector<double> vals;
  for (Index j = 0; j < p.grid.size(); ++j) {
    for (Index c : p.mu(j)) {
      cols.push_back(c);
      vals.push_back(1.0);
    }
    ptr.push_back(static_cast<Index>(cols.size()));
  }
  return {p.grid.size(), p.grid.size(), ptr, cols, vals};
}

}  // namespace

TEST_CASE("skeleton set counts") {
  SUBCASE("d=2 n=4 b=2") {
    const Partition p = build_partition(GridSpec(2, 4, 2));
    const auto k = count_kinds(p);
    CHECK(p.boxes.size() == 4);
    CHECK(k.at(SkeletonKind::cell) == 4);
    CHECK(k.at(SkeletonKind::edge) == 8);
    CHECK(k.at(SkeletonKind::vertex) == 4);
  }
  SUBCASE("d=2 n=48 b=3") {
    const Partition p = build_partition(GridSpec(2, 48, 3));
    const auto k = count_kinds(p);
    CHECK(k.at(SkeletonKind::cell) == 256);
    CHECK(k.at(SkeletonKind::edge) == 512);
    CHECK(k.at(SkeletonKind::vertex) == 256);
  }
  SUBCASE("d=3 n=12 b=3") {
    const Partition p = build_partition(GridSpec(3, 12, 3));
    const auto k = count_kinds(p);
    CHECK(k.at(SkeletonKind::cell) == 64);
    CHECK(k.at(SkeletonKind::face) == 192);
    CHECK(k.at(SkeletonKind::edge) == 192);
    CHECK(k.at(SkeletonKind::vertex) == 64);
  }
}

TEST_CASE("partition invariants") {
  const GridSpec grids[] = {GridSpec(1, 8, 2),  GridSpec(1, 16, 4), GridSpec(2, 12, 3),
                            GridSpec(2, 16, 4), GridSpec(3, 12, 3), GridSpec(3, 8, 2)};
  for (const GridSpec& grid : grids) {
    CAPTURE(grid.describe());
    const Partition p = build_partition(grid);
    std::vector<int> seen(static_cast<std::size_t>(grid.size()), 0);
    for (std::size_t id = 0; id < p.sets.size(); ++id) {
      const SkeletonSet& s = p.sets[id];
      CHECK(s.kind == skeleton_kind(grid.dim(), std::popcount(s.normal_mask)));
      CHECK(s.points.size() == expected_points(grid.dim(), grid.leaf(), s.normal_mask));
      CHECK(s.gamma.size() == expected_gamma(grid.dim(), grid.leaf(), s.normal_mask));
      for (Index j : s.points) {
        ++seen[static_cast<std::size_t>(j)];
        CHECK(p.owner[static_cast<std::size_t>(j)] == static_cast<int>(id));
      }
      // gamma = points ++ beta, disjoint, and equal to the dilation.
      std::set<Index> pts(s.points.begin(), s.points.end());
      for (Index j : s.beta) CHECK(pts.count(j) == 0);
      std::vector<Index> g = s.gamma;
      std::sort(g.begin(), g.end());
      CHECK(std::adjacent_find(g.begin(), g.end()) == g.end());
      CHECK(g == dilate(grid, s.points));
      CHECK(std::equal(s.points.begin(), s.points.end(), s.gamma.begin()));
    }
    for (int c : seen) CHECK(c == 1);
    for (int m = 0; m < p.class_count(); ++m) {
      CHECK(p.sets[static_cast<std::size_t>(m)].normal_mask == static_cast<unsigned>(m));
      CHECK(p.sets[static_cast<std::size_t>(m)].anchor == Coord{0, 0, 0});
    }
  }
}

TEST_CASE("sets of one class are translates in canonical order") {
  const GridSpec grid(2, 12, 3);
  const Partition p = build_partition(grid);
  for (const SkeletonSet& s : p.sets) {
    const SkeletonSet& rep = p.sets[s.normal_mask];
    REQUIRE(rep.gamma.size() == s.gamma.size());
    for (std::size_t k = 0; k < s.gamma.size(); ++k) {
      const Coord a = grid.coord(s.gamma[k]);
      const Coord r = grid.coord(rep.gamma[k]);
      for (int ax = 0; ax < 2; ++ax)
        CHECK(grid.wrap(a[ax] - r[ax] - (s.anchor[ax] - rep.anchor[ax])) == 0);
    }
  }
}

TEST_CASE("dilate") {
  const GridSpec grid(2, 8, 2);
  const std::vector<Index> one = {grid.index({0, 0, 0})};
  const auto d = dilate(grid, one);
  CHECK(d.size() == 9);
  CHECK(std::find(d.begin(), d.end(), grid.index({7, 7, 0})) != d.end());
  const std::vector<Index> pair = {grid.index({3, 3, 0}), grid.index({3, 4, 0})};
  CHECK(dilate(grid, pair).size() == 12);
  CHECK(dilate(grid, std::vector<Index>{}).empty());
}

TEST_CASE("partition errors") {
  CHECK_THROWS_AS(build_partition(GridSpec(2, 8, 8)), IndivisibleGrid);
  CHECK_THROWS_AS(build_partition(GridSpec(2, 8, 1)), InvalidGrid);
  CHECK_THROWS_AS(GridSpec(2, 10, 3), IndivisibleGrid);
}

TEST_CASE("separator tree shape") {
  const GridSpec grid(2, 8, 2);
  const Partition p = build_partition(grid);
  const SeparatorTree tree = separator_tree(p);
  const SeparatorNode& root = tree.nodes[static_cast<std::size_t>(tree.root())];
  CHECK(root.parent == -1);
  for (Index j : root.vars) {
    const Coord c = grid.coord(j);
    CHECK((c[0] == 0 || c[1] == 0));
  }
  CHECK(root.vars.size() == 15);

  std::set<Index> leaf_vars, cell_vars;
  for (const SeparatorNode& node : tree.nodes)
    if (node.is_leaf) leaf_vars.insert(node.vars.begin(), node.vars.end());
  for (const SkeletonSet& s : p.sets)
    if (s.kind == SkeletonKind::cell) cell_vars.insert(s.points.begin(), s.points.end());
  CHECK(leaf_vars == cell_vars);

  for (std::size_t t = 0; t < tree.nodes.size(); ++t) {
    for (int c : tree.nodes[t].children) {
      CHECK(c < static_cast<int>(t));
      CHECK(tree.nodes[static_cast<std::size_t>(c)].parent == static_cast<int>(t));
      CHECK(tree.in_subtree(c, static_cast<int>(t)));
    }
  }
  std::vector<Index> perm = tree.permutation();
  CHECK(perm.size() == static_cast<std::size_t>(grid.size()));
  std::sort(perm.begin(), perm.end());
  for (Index i = 0; i < grid.size(); ++i) CHECK(perm[static_cast<std::size_t>(i)] == i);
}

TEST_CASE("elimination fill stays inside ancestor groups") {
  const GridSpec grids[] = {GridSpec(2, 8, 2), GridSpec(2, 12, 3), GridSpec(3, 8, 2),
                            GridSpec(1, 16, 2)};
  for (const GridSpec& grid : grids) {
    CAPTURE(grid.describe());
    const Partition p = build_partition(grid);
    const SeparatorTree tree = separator_tree(p);
    const std::vector<Index> perm = tree.permutation();
    std::vector<int> node_at(perm.size());
    std::size_t pos = 0;
    for (std::size_t t = 0; t < tree.nodes.size(); ++t)
      for (std::size_t k = 0; k < tree.nodes[t].vars.size(); ++k) node_at[pos++] = static_cast<int>(t);

    const auto reach = reference::elimination_structure(mu_pattern(p), perm);
    for (std::size_t i = 0; i < reach.size(); ++i) {
      for (Index later : reach[i]) {
        const int owner = node_at[static_cast<std::size_t>(later)];
        CHECK(tree.in_subtree(node_at[i], owner));
      }
    }
  }
}
