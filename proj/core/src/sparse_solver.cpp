#include "sparsify/sparse_solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "sparsify/errors.hpp"

namespace sparsify {

namespace {

using Eigen::MatrixXd;

constexpr Eigen::Index kPanel = 48;

std::vector<std::vector<Index>> symmetric_adjacency(const SparseMatrix& a,
                                                    const std::vector<Index>& pos) {
  std::vector<std::vector<Index>> adj(static_cast<std::size_t>(a.rows()));
  for (Index r = 0; r < a.rows(); ++r) {
    const Index pr = pos[static_cast<std::size_t>(r)];
    for (Index c : a.row_cols(r)) {
      const Index pc = pos[static_cast<std::size_t>(c)];
      if (pc == pr) continue;
      adj[static_cast<std::size_t>(pr)].push_back(pc);
      adj[static_cast<std::size_t>(pc)].push_back(pr);
    }
  }
  for (auto& list : adj) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  return adj;
}

}  // namespace

int SymbolicPlan::node_of(Index pos) const {
  auto it = std::upper_bound(
      fronts.begin(), fronts.end(), pos,
      [](Index p, const Front& f) { return p < f.end; });
  return static_cast<int>(it - fronts.begin());
}

SeparatorTree single_group_tree(Index size) {
  SeparatorTree tree;
  SeparatorNode node;
  node.vars.resize(static_cast<std::size_t>(size));
  for (Index i = 0; i < size; ++i) node.vars[static_cast<std::size_t>(i)] = i;
  node.is_leaf = true;
  tree.nodes.push_back(std::move(node));
  tree.first_descendant.push_back(0);
  return tree;
}

SymbolicPlan symbolic_factor(const SparseMatrix& pattern,
                             const SeparatorTree& tree) {
  SymbolicPlan plan;
  plan.size = pattern.rows();
  plan.permutation = tree.permutation();
  if (static_cast<Index>(plan.permutation.size()) != plan.size) {
    throw std::invalid_argument("separator tree does not cover the matrix");
  }
  plan.position.assign(static_cast<std::size_t>(plan.size), -1);
  for (std::size_t p = 0; p < plan.permutation.size(); ++p) {
    auto& slot = plan.position[static_cast<std::size_t>(plan.permutation[p])];
    if (slot != -1) throw std::invalid_argument("separator tree repeats an index");
    slot = static_cast<Index>(p);
  }

  Index begin = 0;
  for (const SeparatorNode& node : tree.nodes) {
    SymbolicPlan::Front front;
    front.begin = begin;
    front.end = begin + static_cast<Index>(node.vars.size());
    front.parent = node.parent;
    plan.fronts.push_back(std::move(front));
    begin = plan.fronts.back().end;
  }

  const auto adj = symmetric_adjacency(pattern, plan.position);
  std::vector<int> mark(static_cast<std::size_t>(plan.size), -1);
  for (std::size_t t = 0; t < plan.fronts.size(); ++t) {
    SymbolicPlan::Front& front = plan.fronts[t];
    std::vector<Index> update;
    const auto stamp = static_cast<int>(t);
    auto consider = [&](Index p) {
      if (p < front.end || mark[static_cast<std::size_t>(p)] == stamp) return;
      mark[static_cast<std::size_t>(p)] = stamp;
      const int owner = plan.node_of(p);
      if (!tree.in_subtree(static_cast<int>(t), owner)) {
        throw std::logic_error(
            "pattern couples a front to a non-ancestor separator group");
      }
      update.push_back(p);
    };
    for (Index v = front.begin; v < front.end; ++v) {
      for (Index p : adj[static_cast<std::size_t>(v)]) consider(p);
    }
    for (int child : tree.nodes[t].children) {
      for (Index p : plan.fronts[static_cast<std::size_t>(child)].update) {
        consider(p);
      }
    }
    std::sort(update.begin(), update.end());
    front.update = std::move(update);

    const Index g = front.group_size();
    const auto u = static_cast<Index>(front.update.size());
    plan.factor_entries += g * g + 2 * g * u;
    plan.peak_front = std::max(plan.peak_front, g + u);
  }
  return plan;
}

void dense_lu_in_place(Eigen::Ref<MatrixXd> a, std::vector<int>& piv,
                       double tiny) {
  const Eigen::Index n = a.rows();
  piv.assign(static_cast<std::size_t>(n), 0);
  for (Eigen::Index k0 = 0; k0 < n; k0 += kPanel) {
    const Eigen::Index k1 = std::min(n, k0 + kPanel);
    // Unblocked elimination of the panel columns k0..k1.
    for (Eigen::Index k = k0; k < k1; ++k) {
      Eigen::Index p = k;
      double best = std::abs(a(k, k));
      for (Eigen::Index i = k + 1; i < n; ++i) {
        const double v = std::abs(a(i, k));
        if (v > best) {
          best = v;
          p = i;
        }
      }
      if (!(best >= tiny) || best == 0.0) {
        throw SingularMatrix("front pivot " + std::to_string(k) +
                             " has magnitude " + std::to_string(best));
      }
      piv[static_cast<std::size_t>(k)] = static_cast<int>(p);
      if (p != k) a.row(k).swap(a.row(p));
      const double inv = 1.0 / a(k, k);
      a.col(k).tail(n - k - 1) *= inv;
      if (k + 1 < k1) {
        a.block(k + 1, k + 1, n - k - 1, k1 - k - 1).noalias() -=
            a.col(k).tail(n - k - 1) * a.row(k).segment(k + 1, k1 - k - 1);
      }
    }
    if (k1 < n) {
      auto l11 = a.block(k0, k0, k1 - k0, k1 - k0);
      auto u12 = a.block(k0, k1, k1 - k0, n - k1);
      l11.triangularView<Eigen::UnitLower>().solveInPlace(u12);
      a.block(k1, k1, n - k1, n - k1).noalias() -=
          a.block(k1, k0, n - k1, k1 - k0) * u12;
    }
  }
}

Factorization numeric_factor(const SparseMatrix& matrix,
                             const SymbolicPlan& plan) {
  if (matrix.rows() != plan.size || matrix.cols() != plan.size) {
    throw std::invalid_argument("numeric_factor: matrix does not match plan");
  }
  Factorization fact;
  fact.plan_ = plan;
  fact.factors_.resize(plan.fronts.size());

  // Each entry is assembled into the front that eliminates its earlier index.
  struct Entry {
    Index row;
    Index col;
    double value;
  };
  std::vector<std::vector<Entry>> entries(plan.fronts.size());
  for (Index r = 0; r < matrix.rows(); ++r) {
    const Index pr = plan.position[static_cast<std::size_t>(r)];
    const auto cols = matrix.row_cols(r);
    const auto vals = matrix.row_values(r);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const Index pc = plan.position[static_cast<std::size_t>(cols[k])];
      entries[static_cast<std::size_t>(plan.node_of(std::min(pr, pc)))]
          .push_back({pr, pc, vals[k]});
    }
  }

  std::vector<Index> local(static_cast<std::size_t>(plan.size), -1);
  std::vector<MatrixXd> pending;  // Schur complements awaiting their parent
  std::vector<int> pending_owner;

  for (std::size_t t = 0; t < plan.fronts.size(); ++t) {
    const auto& front = plan.fronts[t];
    const Index g = front.group_size();
    const auto u = static_cast<Index>(front.update.size());
    for (Index i = 0; i < g; ++i) {
      local[static_cast<std::size_t>(front.begin + i)] = i;
    }
    for (Index i = 0; i < u; ++i) {
      local[static_cast<std::size_t>(front.update[static_cast<std::size_t>(i)])] =
          g + i;
    }

    MatrixXd f = MatrixXd::Zero(g + u, g + u);
    for (const Entry& e : entries[t]) {
      const Index lr = local[static_cast<std::size_t>(e.row)];
      const Index lc = local[static_cast<std::size_t>(e.col)];
      if (lr < 0 || lc < 0) {
        throw std::logic_error("matrix entry outside the symbolic plan");
      }
      f(lr, lc) += e.value;
    }
    // Children are the most recent pending blocks (postorder).
    while (!pending_owner.empty() &&
           plan.fronts[static_cast<std::size_t>(pending_owner.back())].parent ==
               static_cast<int>(t)) {
      const auto& child =
          plan.fronts[static_cast<std::size_t>(pending_owner.back())];
      const MatrixXd& s = pending.back();
      std::vector<Index> map(child.update.size());
      for (std::size_t i = 0; i < map.size(); ++i) {
        map[i] = local[static_cast<std::size_t>(child.update[i])];
      }
      for (std::size_t j = 0; j < map.size(); ++j) {
        for (std::size_t i = 0; i < map.size(); ++i) {
          f(map[i], map[j]) += s(static_cast<Eigen::Index>(i),
                                 static_cast<Eigen::Index>(j));
        }
      }
      pending.pop_back();
      pending_owner.pop_back();
    }

    const double front_max = f.size() > 0 ? f.cwiseAbs().maxCoeff() : 0.0;
    auto& out = fact.factors_[t];
    try {
      dense_lu_in_place(f.topLeftCorner(g, g), out.piv, kPivotFloor * front_max);
    } catch (const SingularMatrix& e) {
      throw SingularMatrix("front " + std::to_string(t) + ": " + e.what());
    }
    auto f12 = f.topRightCorner(g, u);
    for (Index k = 0; k < g; ++k) {
      const int p = out.piv[static_cast<std::size_t>(k)];
      if (p != k) f12.row(k).swap(f12.row(p));
    }
    const auto f11 = f.topLeftCorner(g, g);
    f11.triangularView<Eigen::UnitLower>().solveInPlace(f12);
    auto f21 = f.bottomLeftCorner(u, g);
    f11.triangularView<Eigen::Upper>().solveInPlace<Eigen::OnTheRight>(f21);
    if (u > 0) {
      MatrixXd schur = f.bottomRightCorner(u, u);
      schur.noalias() -= f21 * f12;
      pending.push_back(std::move(schur));
      pending_owner.push_back(static_cast<int>(t));
    }
    out.lu = f11;
    out.l21 = f21;
    out.u12 = f12;

    for (Index i = 0; i < g; ++i) local[static_cast<std::size_t>(front.begin + i)] = -1;
    for (Index p : front.update) local[static_cast<std::size_t>(p)] = -1;
  }
  if (!pending.empty()) {
    throw std::logic_error("unassembled Schur complements left after the root");
  }
  return fact;
}

void Factorization::solve(std::span<const double> y, std::span<double> x) const {
  const auto n = static_cast<std::size_t>(plan_.size);
  if (y.size() != n || x.size() != n) {
    throw LengthMismatch("Factorization::solve: size mismatch");
  }
  Eigen::VectorXd w(static_cast<Eigen::Index>(n));
  for (std::size_t p = 0; p < n; ++p) {
    w(static_cast<Eigen::Index>(p)) =
        y[static_cast<std::size_t>(plan_.permutation[p])];
  }

  Eigen::VectorXd gathered;
  for (std::size_t t = 0; t < plan_.fronts.size(); ++t) {
    const auto& front = plan_.fronts[t];
    const auto& fac = factors_[t];
    auto z = w.segment(front.begin, front.group_size());
    for (Index k = 0; k < front.group_size(); ++k) {
      const int p = fac.piv[static_cast<std::size_t>(k)];
      if (p != k) std::swap(z(k), z(p));
    }
    fac.lu.triangularView<Eigen::UnitLower>().solveInPlace(z);
    if (!front.update.empty()) {
      gathered.noalias() = fac.l21 * z;
      for (std::size_t i = 0; i < front.update.size(); ++i) {
        w(front.update[i]) -= gathered(static_cast<Eigen::Index>(i));
      }
    }
  }
  for (std::size_t t = plan_.fronts.size(); t-- > 0;) {
    const auto& front = plan_.fronts[t];
    const auto& fac = factors_[t];
    auto z = w.segment(front.begin, front.group_size());
    if (!front.update.empty()) {
      gathered.resize(static_cast<Eigen::Index>(front.update.size()));
      for (std::size_t i = 0; i < front.update.size(); ++i) {
        gathered(static_cast<Eigen::Index>(i)) = w(front.update[i]);
      }
      z.noalias() -= fac.u12 * gathered;
    }
    fac.lu.triangularView<Eigen::Upper>().solveInPlace(z);
  }
  for (std::size_t p = 0; p < n; ++p) {
    x[static_cast<std::size_t>(plan_.permutation[p])] =
        w(static_cast<Eigen::Index>(p));
  }
}

std::vector<double> Factorization::solve(std::span<const double> y) const {
  std::vector<double> x(y.size());
  solve(y, x);
  return x;
}

}  // namespace sparsify
