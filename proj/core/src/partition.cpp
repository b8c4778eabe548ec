#include "sparsify/partition.hpp"

#include <algorithm>
#include <bit>

#include "sparsify/errors.hpp"

namespace sparsify {

namespace {

// Calls fn(offset) for every offset in the box [0, extent) in lexicographic
// order (axis 0 slowest).
template <typename Fn>
void for_each_offset(int dim, const Coord& extent, Fn&& fn) {
  Coord off{0, 0, 0};
  for (int a = 0; a < dim; ++a) {
    if (extent[a] <= 0) return;
  }
  while (true) {
    fn(off);
    int a = dim - 1;
    while (a >= 0) {
      if (++off[a] < extent[a]) break;
      off[a] = 0;
      --a;
    }
    if (a < 0) return;
  }
}

}  // namespace

std::string_view to_string(SkeletonKind kind) {
  switch (kind) {
    case SkeletonKind::cell:
      return "cell";
    case SkeletonKind::face:
      return "face";
    case SkeletonKind::edge:
      return "edge";
    case SkeletonKind::vertex:
      return "vertex";
  }
  return "unknown";
}

SkeletonKind skeleton_kind(int dim, int normal_axes) {
  if (normal_axes == 0) return SkeletonKind::cell;
  if (normal_axes == dim) return SkeletonKind::vertex;
  if (normal_axes == dim - 1) return SkeletonKind::edge;
  return SkeletonKind::face;
}

std::vector<Index> dilate(const GridSpec& grid, std::span<const Index> points) {
  std::vector<Index> out;
  const Coord extent{3, 3, 3};
  out.reserve(points.size() * 9);
  for (Index p : points) {
    const Coord c = grid.coord(p);
    for_each_offset(grid.dim(), extent, [&](const Coord& off) {
      Coord q{0, 0, 0};
      for (int a = 0; a < grid.dim(); ++a) q[a] = c[a] + off[a] - 1;
      out.push_back(grid.wrapped_index(q));
    });
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Partition build_partition(const GridSpec& grid) {
  const int dim = grid.dim();
  const int b = grid.leaf();
  if (b < 2) throw InvalidGrid("leaf width b must be at least 2");
  if (grid.n() % b != 0) {
    throw IndivisibleGrid("n is not a multiple of the leaf width");
  }
  if (grid.boxes_per_axis() < 2) {
    throw IndivisibleGrid("the tiling needs at least two leaf boxes per axis");
  }

  Partition part;
  part.grid = grid;
  part.owner.assign(static_cast<std::size_t>(grid.size()), -1);

  const int nb = grid.boxes_per_axis();
  Coord box_extent{1, 1, 1};
  for (int a = 0; a < dim; ++a) box_extent[a] = nb;
  for_each_offset(dim, box_extent, [&](const Coord& box) {
    Coord anchor{0, 0, 0};
    for (int a = 0; a < dim; ++a) anchor[a] = box[a] * b;
    part.boxes.push_back(anchor);
  });

  const unsigned classes = 1u << dim;
  for (const Coord& anchor : part.boxes) {
    for (unsigned mask = 0; mask < classes; ++mask) {
      SkeletonSet set;
      set.normal_mask = mask;
      set.kind = skeleton_kind(dim, std::popcount(mask));
      set.anchor = anchor;

      Coord extent{1, 1, 1};
      Coord gamma_extent{1, 1, 1};
      for (int a = 0; a < dim; ++a) {
        const bool normal = (mask >> a) & 1u;
        extent[a] = normal ? 1 : b - 1;
        gamma_extent[a] = extent[a] + 2;
      }
      for_each_offset(dim, extent, [&](const Coord& off) {
        Coord c{0, 0, 0};
        for (int a = 0; a < dim; ++a) {
          const bool normal = (mask >> a) & 1u;
          c[a] = anchor[a] + off[a] + (normal ? 0 : 1);
        }
        set.points.push_back(grid.index(c));
      });
      for_each_offset(dim, gamma_extent, [&](const Coord& off) {
        bool inside = true;
        Coord c{0, 0, 0};
        for (int a = 0; a < dim; ++a) {
          const bool normal = (mask >> a) & 1u;
          // Points occupy gamma offsets 1 .. extent along every axis.
          inside = inside && off[a] >= 1 && off[a] <= extent[a];
          c[a] = anchor[a] + off[a] - (normal ? 1 : 0);
        }
        if (!inside) set.beta.push_back(grid.wrapped_index(c));
      });
      set.gamma = set.points;
      set.gamma.insert(set.gamma.end(), set.beta.begin(), set.beta.end());

      const int id = static_cast<int>(part.sets.size());
      for (Index p : set.points) {
        auto& slot = part.owner[static_cast<std::size_t>(p)];
        if (slot != -1) throw std::logic_error("skeleton sets overlap");
        slot = id;
      }
      part.sets.push_back(std::move(set));
    }
  }
  if (std::find(part.owner.begin(), part.owner.end(), -1) != part.owner.end()) {
    throw std::logic_error("skeleton sets do not cover the grid");
  }
  return part;
}

std::vector<Index> SeparatorTree::permutation() const {
  std::vector<Index> perm;
  for (const SeparatorNode& node : nodes) {
    perm.insert(perm.end(), node.vars.begin(), node.vars.end());
  }
  return perm;
}

namespace {

struct TreeBuilder {
  const GridSpec& grid;
  SeparatorTree tree;

  // Open region lo < x < hi along every axis; lo and hi are interfaces.
  int build(const Coord& lo, const Coord& hi, int depth) {
    const int dim = grid.dim();
    const int b = grid.leaf();
    int axis = 0;
    for (int a = 1; a < dim; ++a) {
      if (hi[a] - lo[a] > hi[axis] - lo[axis]) axis = a;
    }
    SeparatorNode node;
    node.depth = depth;
    Coord extent{1, 1, 1};
    for (int a = 0; a < dim; ++a) extent[a] = hi[a] - lo[a] - 1;

    if (hi[axis] - lo[axis] == b) {
      node.is_leaf = true;
      for_each_offset(dim, extent, [&](const Coord& off) {
        Coord c{0, 0, 0};
        for (int a = 0; a < dim; ++a) c[a] = lo[a] + 1 + off[a];
        node.vars.push_back(grid.index(c));
      });
      return push(std::move(node), {});
    }

    const int boxes = (hi[axis] - lo[axis]) / b;
    const int mid = lo[axis] + (boxes / 2) * b;
    Coord left_hi = hi;
    left_hi[axis] = mid;
    Coord right_lo = lo;
    right_lo[axis] = mid;
    const int left = build(lo, left_hi, depth + 1);
    const int right = build(right_lo, hi, depth + 1);

    extent[axis] = 1;
    for_each_offset(dim, extent, [&](const Coord& off) {
      Coord c{0, 0, 0};
      for (int a = 0; a < dim; ++a) c[a] = a == axis ? mid : lo[a] + 1 + off[a];
      node.vars.push_back(grid.index(c));
    });
    std::sort(node.vars.begin(), node.vars.end());
    return push(std::move(node), {left, right});
  }

  int push(SeparatorNode node, std::vector<int> children) {
    const int id = static_cast<int>(tree.nodes.size());
    int first = id;
    for (int c : children) {
      tree.nodes[static_cast<std::size_t>(c)].parent = id;
      first = std::min(first, tree.first_descendant[static_cast<std::size_t>(c)]);
    }
    node.children = std::move(children);
    tree.nodes.push_back(std::move(node));
    tree.first_descendant.push_back(first);
    return id;
  }
};

}  // namespace

SeparatorTree separator_tree(const Partition& partition) {
  const GridSpec& grid = partition.grid;
  TreeBuilder builder{grid, {}};
  Coord lo{0, 0, 0};
  Coord hi{0, 0, 0};
  for (int a = 0; a < grid.dim(); ++a) hi[a] = grid.n();
  const int body = builder.build(lo, hi, 1);

  SeparatorNode seam;
  for (Index i = 0; i < grid.size(); ++i) {
    const Coord c = grid.coord(i);
    bool on_seam = false;
    for (int a = 0; a < grid.dim(); ++a) on_seam = on_seam || c[a] == 0;
    if (on_seam) seam.vars.push_back(i);
  }
  builder.push(std::move(seam), {body});
  return std::move(builder.tree);
}

}  // namespace sparsify
