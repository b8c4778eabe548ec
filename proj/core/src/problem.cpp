#include "sparsify/problem.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>

#include "sparsify/errors.hpp"

namespace sparsify {

namespace {

constexpr std::array<std::pair<MediaKind, std::string_view>, 6> kKindNames{{
    {MediaKind::helmholtz_constant, "helmholtz_constant"},
    {MediaKind::helmholtz_gaussian, "helmholtz_gaussian"},
    {MediaKind::helmholtz_random_gaussians, "helmholtz_random_gaussians"},
    {MediaKind::schrodinger_constant, "schrodinger_constant"},
    {MediaKind::schrodinger_random, "schrodinger_random"},
    {MediaKind::schrodinger_lattice_vacancy, "schrodinger_lattice_vacancy"},
}};

double mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) /
         static_cast<double>(v.size());
}

double positive_or_default(const std::optional<double>& value, double fallback,
                           const char* what) {
  const double v = value.value_or(fallback);
  if (!(v > 0.0)) {
    throw InvalidMedia(std::string(what) + " must be positive");
  }
  return v;
}

Point domain_center(const GridSpec& grid) {
  Point c{0.0, 0.0, 0.0};
  for (int a = 0; a < grid.dim(); ++a) c[a] = 0.5;
  return c;
}

SplitProblem finish(SplitProblem p) {
  const ShiftAdjustment adj = adjust_shift(p.grid, p.shift, p.q);
  p.shift = adj.shift;
  p.q = adj.q;
  p.shift_steps = adj.steps;
  p.f = center_delta(p.grid);
  return p;
}

}  // namespace

std::string_view to_string(MediaKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

MediaKind media_kind_from_string(std::string_view name) {
  for (const auto& [k, n] : kKindNames) {
    if (n == name) return k;
  }
  throw InvalidMedia("unknown media kind '" + std::string(name) + "'");
}

bool is_helmholtz(MediaKind kind) {
  return kind == MediaKind::helmholtz_constant ||
         kind == MediaKind::helmholtz_gaussian ||
         kind == MediaKind::helmholtz_random_gaussians;
}

Field gaussian_field(const GridSpec& grid, std::span<const Point> centers,
                     double amplitude, double sigma) {
  if (!(sigma > 0.0)) throw InvalidMedia("gaussian sigma must be positive");
  const double h = grid.h();
  const double inv = 1.0 / (2.0 * sigma * sigma);
  Field out(static_cast<std::size_t>(grid.size()), 0.0);
  for (Index i = 0; i < grid.size(); ++i) {
    const Coord c = grid.coord(i);
    double acc = 0.0;
    for (const Point& center : centers) {
      double r2 = 0.0;
      for (int a = 0; a < grid.dim(); ++a) {
        double dx = c[a] * h - center[a];
        dx -= std::round(dx);
        r2 += dx * dx;
      }
      acc += std::exp(-r2 * inv);
    }
    out[static_cast<std::size_t>(i)] = amplitude * acc;
  }
  return out;
}

std::vector<Point> random_centers(const GridSpec& grid, const MediaSpec& media) {
  MediaRng rng(media.seed);
  std::vector<Point> centers;
  if (media.kind == MediaKind::helmholtz_random_gaussians) {
    const int count = media.count.value_or(3);
    if (count < 1) throw InvalidMedia("count must be at least 1");
    for (int i = 0; i < count; ++i) {
      Point p{0.0, 0.0, 0.0};
      for (int a = 0; a < grid.dim(); ++a) p[a] = rng.uniform(0.2, 0.8);
      // 3D centers sit on the middle slice x3 = 1/2.
      if (grid.dim() == 3) p[2] = 0.5;
      centers.push_back(p);
    }
  } else if (media.kind == MediaKind::schrodinger_random) {
    Index per_cell = 1;
    for (int a = 0; a < grid.dim(); ++a) per_cell *= 8;
    const int fallback =
        static_cast<int>((grid.size() + per_cell - 1) / per_cell);
    const int count = media.count.value_or(fallback);
    if (count < 1) throw InvalidMedia("count must be at least 1");
    for (int i = 0; i < count; ++i) {
      Point p{0.0, 0.0, 0.0};
      for (int a = 0; a < grid.dim(); ++a) p[a] = rng.uniform();
      centers.push_back(p);
    }
  }
  return centers;
}

std::vector<Point> lattice_centers(const GridSpec& grid, bool with_vacancy) {
  constexpr int kSpacing = 8;
  if (grid.n() % kSpacing != 0) {
    throw InvalidMedia("lattice media need n divisible by 8 (got n = " +
                       std::to_string(grid.n()) + ")");
  }
  const int sites = grid.n() / kSpacing;
  const double step = kSpacing * grid.h();
  const Point mid = domain_center(grid);

  std::vector<Point> centers;
  Index total = 1;
  for (int a = 0; a < grid.dim(); ++a) total *= sites;
  Point nearest{};
  double best = 1e300;
  for (Index s = 0; s < total; ++s) {
    Point p{0.0, 0.0, 0.0};
    Index rest = s;
    for (int a = grid.dim() - 1; a >= 0; --a) {
      p[a] = static_cast<double>(rest % sites) * step;
      rest /= sites;
    }
    double r2 = 0.0;
    for (int a = 0; a < grid.dim(); ++a) r2 += (p[a] - mid[a]) * (p[a] - mid[a]);
    if (r2 < best) {
      best = r2;
      nearest = p;
    }
    centers.push_back(p);
  }
  if (with_vacancy) {
    std::erase(centers, nearest);
  }
  return centers;
}

Field center_delta(const GridSpec& grid) {
  Field f(static_cast<std::size_t>(grid.size()), 0.0);
  Coord c{0, 0, 0};
  for (int a = 0; a < grid.dim(); ++a) c[a] = grid.n() / 2;
  f[static_cast<std::size_t>(grid.index(c))] = 1.0;
  return f;
}

SplitProblem split_coefficient(const GridSpec& grid, Field coefficient) {
  SplitProblem p;
  p.grid = grid;
  const bool uniform = std::all_of(coefficient.begin(), coefficient.end(),
                                   [&](double v) { return v == coefficient[0]; });
  // A constant medium must give q == 0 exactly, not to rounding.
  p.shift = uniform ? coefficient[0] : mean(coefficient);
  p.raw_shift = p.shift;
  p.q.resize(coefficient.size());
  for (std::size_t i = 0; i < coefficient.size(); ++i) {
    p.q[i] = p.shift - coefficient[i];
  }
  p.coefficient = std::move(coefficient);
  return p;
}

SplitProblem build_helmholtz(const GridSpec& grid, const MediaSpec& media) {
  if (!is_helmholtz(media.kind)) {
    throw InvalidMedia("build_helmholtz called with media kind " +
                       std::string(to_string(media.kind)));
  }
  const double omega = 2.0 * std::numbers::pi * media.omega_over_2pi;
  const double amplitude = positive_or_default(media.amplitude, 0.25, "amplitude");
  const double sigma = positive_or_default(media.sigma, 0.1, "sigma");

  Field c(static_cast<std::size_t>(grid.size()), 1.0);
  if (media.kind != MediaKind::helmholtz_constant) {
    std::vector<Point> centers = media.kind == MediaKind::helmholtz_gaussian
                                     ? std::vector<Point>{domain_center(grid)}
                                     : random_centers(grid, media);
    const Field bump = gaussian_field(grid, centers, amplitude, sigma);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] += bump[i];
  }

  Field k2(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (!(c[i] > 0.0)) throw InvalidMedia("velocity must be positive everywhere");
    k2[i] = omega * omega / (c[i] * c[i]);
  }
  SplitProblem p = split_coefficient(grid, std::move(k2));
  p.medium = std::move(c);
  p.label = std::string(to_string(media.kind)) +
            " omega/2pi=" + std::to_string(media.omega_over_2pi);
  return finish(std::move(p));
}

SplitProblem build_schrodinger(const GridSpec& grid, const MediaSpec& media) {
  if (is_helmholtz(media.kind)) {
    throw InvalidMedia("build_schrodinger called with media kind " +
                       std::string(to_string(media.kind)));
  }
  const double ell2 = static_cast<double>(grid.n()) * grid.n();
  const double amplitude = positive_or_default(media.amplitude, 1.0, "amplitude");
  const double sigma = positive_or_default(media.sigma, 1.5 * grid.h(), "sigma");

  Field v(static_cast<std::size_t>(grid.size()), 0.0);
  if (media.kind == MediaKind::schrodinger_random) {
    v = gaussian_field(grid, random_centers(grid, media), amplitude, sigma);
  } else if (media.kind == MediaKind::schrodinger_lattice_vacancy) {
    v = gaussian_field(grid, lattice_centers(grid, true), amplitude, sigma);
  }

  Field k2(v.size());
  Field scaled(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    scaled[i] = ell2 * v[i];
    k2[i] = ell2 * media.energy - scaled[i];
  }
  SplitProblem p = split_coefficient(grid, std::move(k2));
  p.medium = std::move(scaled);
  p.label = std::string(to_string(media.kind)) +
            " E=" + std::to_string(media.energy);
  return finish(std::move(p));
}

SplitProblem build_problem(const GridSpec& grid, const MediaSpec& media) {
  return is_helmholtz(media.kind) ? build_helmholtz(grid, media)
                                  : build_schrodinger(grid, media);
}

}  // namespace sparsify
