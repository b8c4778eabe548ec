#include "sparsify/harness.hpp"

#include <algorithm>
#include <chrono>
#include <future>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "sparsify/errors.hpp"
#include "sparsify/field_io.hpp"
#include "sparsify/preconditioner.hpp"
#include "sparsify/reference.hpp"

namespace sparsify {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string_view mode_name(RunMode mode) {
  switch (mode) {
    case RunMode::solve:
      return "solve";
    case RunMode::sweep:
      return "sweep";
    case RunMode::check:
      return "check";
  }
  return "solve";
}

RunMode mode_from(const std::string& s) {
  if (s == "solve") return RunMode::solve;
  if (s == "sweep" || s == "bench-sweep") return RunMode::sweep;
  if (s == "check") return RunMode::check;
  throw ConfigError("unknown mode '" + s + "'");
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

double relative_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const double scale = std::max(b.norm(), std::numeric_limits<double>::min());
  return (a - b).norm() / scale;
}

Eigen::VectorXd random_vector(Index n, std::uint64_t seed) {
  MediaRng rng(seed);
  Eigen::VectorXd v(n);
  for (Index i = 0; i < n; ++i) v(i) = rng.uniform(-1.0, 1.0);
  return v;
}

std::span<const double> span_of(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

void fill_stencil_columns(ResultRow& row, const StencilSet& stencils) {
  row.ls_cell = row.ls_face = row.ls_edge = row.ls_vertex = kNaN;
  for (const Stencil& st : stencils.by_class) {
    double* slot = nullptr;
    switch (st.kind) {
      case SkeletonKind::cell:
        slot = &row.ls_cell;
        break;
      case SkeletonKind::face:
        slot = &row.ls_face;
        break;
      case SkeletonKind::edge:
        slot = &row.ls_edge;
        break;
      case SkeletonKind::vertex:
        slot = &row.ls_vertex;
        break;
    }
    *slot = std::isnan(*slot) ? st.ls_residual : std::max(*slot, st.ls_residual);
  }
}

void dump(const RunConfig& config, const GridSpec& grid, FieldKind kind,
          const std::vector<double>& values) {
  FieldDump field{grid.dim(), grid.n(), kind, values};
  const std::string base =
      config.field_prefix.string() + "." + std::string(to_string(kind));
  write_field(base + ".wpf", field);
  if (config.text_fields) write_field_text(base + ".txt", field);
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  std::ostringstream os;
  os << std::setprecision(6) << std::scientific << v;
  return os.str();
}

}  // namespace

int default_leaf(int n) {
  int best = 2;
  for (int b = 2; b * b <= n; ++b) {
    if (n % b == 0 && n / b >= 2) best = b;
  }
  return best;
}

int RunConfig::resolved_leaf() const { return leaf.value_or(default_leaf(n)); }

std::int64_t ResultRow::unknowns() const {
  std::int64_t total = 1;
  for (int a = 0; a < dim; ++a) total *= n;
  return total;
}

void validate(const RunConfig& config) {
  if (config.dim < 1 || config.dim > 3) throw ConfigError("d must be 1, 2 or 3");
  auto check_size = [](int n, int b) {
    if (n <= 0 || n % 2 != 0) throw ConfigError("n must be a positive even integer");
    if (b < 2) throw ConfigError("b must be at least 2");
    if (n % b != 0) throw ConfigError("n must be a multiple of b");
  };
  if (config.mode != RunMode::sweep) check_size(config.n, config.resolved_leaf());
  for (std::size_t i = 0; i < config.sweep.size(); ++i) {
    check_size(config.sweep[i].first, config.sweep[i].second);
    if (i > 0 && config.sweep[i].first < config.sweep[i - 1].first) {
      throw ConfigError("sweep sizes must be ascending");
    }
  }
  if (!(config.tol > 0.0 && config.tol < 1.0)) throw ConfigError("tol must lie in (0, 1)");
  if (config.max_iter < 1) throw ConfigError("max_iter must be positive");
  if (config.media.amplitude && !(*config.media.amplitude > 0.0)) {
    throw ConfigError("media.amplitude must be positive");
  }
  if (config.media.sigma && !(*config.media.sigma > 0.0)) {
    throw ConfigError("media.sigma must be positive");
  }
  if (config.media.count && *config.media.count < 1) {
    throw ConfigError("media.count must be at least 1");
  }
}

RunConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  const std::string schema = get_or<std::string>(doc, "schema", kConfigSchema);
  if (schema != kConfigSchema) throw ConfigError("unsupported config schema '" + schema + "'");

  RunConfig cfg;
  cfg.mode = mode_from(get_or<std::string>(doc, "mode", "solve"));
  cfg.dim = get_or<int>(doc, "d", cfg.dim);
  cfg.n = get_or<int>(doc, "n", cfg.n);
  if (doc.contains("b") && !doc.at("b").is_null()) cfg.leaf = get_or<int>(doc, "b", 0);
  cfg.tol = get_or<double>(doc, "tol", cfg.tol);
  cfg.max_iter = get_or<int>(doc, "max_iter", cfg.max_iter);

  const std::string equation = get_or<std::string>(doc, "equation", "helmholtz");
  if (equation != "helmholtz" && equation != "schrodinger") {
    throw ConfigError("equation must be 'helmholtz' or 'schrodinger'");
  }
  const json media = doc.contains("media") ? doc.at("media") : json::object();
  const std::string fallback_kind =
      equation == "helmholtz" ? "helmholtz_gaussian" : "schrodinger_random";
  try {
    cfg.media.kind = media_kind_from_string(get_or<std::string>(media, "kind", fallback_kind));
  } catch (const InvalidMedia& e) {
    throw ConfigError(e.what());
  }
  if (is_helmholtz(cfg.media.kind) != (equation == "helmholtz")) {
    throw ConfigError("media.kind does not match the equation");
  }
  cfg.media.omega_over_2pi = get_or<double>(media, "omega_over_2pi", cfg.media.omega_over_2pi);
  cfg.media.energy = get_or<double>(media, "energy", cfg.media.energy);
  if (media.contains("amplitude")) cfg.media.amplitude = get_or<double>(media, "amplitude", 0.0);
  if (media.contains("sigma")) cfg.media.sigma = get_or<double>(media, "sigma", 0.0);
  if (media.contains("count")) cfg.media.count = get_or<int>(media, "count", 0);
  cfg.media.seed = get_or<std::uint64_t>(media, "seed", cfg.media.seed);

  if (doc.contains("sweep")) {
    for (const json& entry : doc.at("sweep")) {
      if (!entry.is_array() || entry.size() != 2) {
        throw ConfigError("sweep entries must be [n, b] pairs");
      }
      cfg.sweep.emplace_back(entry[0].get<int>(), entry[1].get<int>());
    }
  }
  const json outputs = doc.contains("outputs") ? doc.at("outputs") : json::object();
  cfg.table_path = get_or<std::string>(outputs, "table", "");
  cfg.field_prefix = get_or<std::string>(outputs, "fields", "");
  cfg.dump_fields = get_or<bool>(outputs, "dump_fields", !cfg.field_prefix.empty());
  cfg.text_fields = get_or<bool>(outputs, "text_fields", false);
  cfg.parallel_rows = get_or<bool>(doc, "parallel_rows", false);
  validate(cfg);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

std::string to_json(const RunConfig& config) {
  json media{{"kind", std::string(to_string(config.media.kind))},
             {"seed", config.media.seed}};
  if (config.helmholtz()) {
    media["omega_over_2pi"] = config.media.omega_over_2pi;
  } else {
    media["energy"] = config.media.energy;
  }
  if (config.media.amplitude) media["amplitude"] = *config.media.amplitude;
  if (config.media.sigma) media["sigma"] = *config.media.sigma;
  if (config.media.count) media["count"] = *config.media.count;
  json doc{{"schema", kConfigSchema},
           {"mode", std::string(mode_name(config.mode))},
           {"equation", config.helmholtz() ? "helmholtz" : "schrodinger"},
           {"d", config.dim},
           {"n", config.n},
           {"b", config.resolved_leaf()},
           {"tol", config.tol},
           {"max_iter", config.max_iter},
           {"media", media}};
  if (!config.sweep.empty()) {
    json sweep = json::array();
    for (const auto& [n, b] : config.sweep) sweep.push_back({n, b});
    doc["sweep"] = sweep;
  }
  if (config.parallel_rows) doc["parallel_rows"] = true;
  return doc.dump();
}

SolveOutcome run_solve(const RunConfig& config) {
  const GridSpec grid(config.dim, config.n, config.resolved_leaf());
  const SplitProblem problem = build_problem(grid, config.media);
  const Preconditioner pre = build_preconditioner(problem);

  SolveOutcome out;
  ResultRow& row = out.row;
  row.equation = config.helmholtz() ? "helmholtz" : "schrodinger";
  row.param = config.helmholtz() ? config.media.omega_over_2pi : config.media.energy;
  row.dim = grid.dim();
  row.n = grid.n();
  row.leaf = grid.leaf();
  row.setup_seconds = pre.timings.total;
  row.factor_entries = pre.factorization.factor_entries();
  row.peak_front = pre.factorization.peak_front();
  row.shift = problem.shift;
  row.shift_steps = problem.shift_steps;
  row.seed = config.media.seed;
  row.label = problem.label;
  fill_stencil_columns(row, pre.stencils);

  const GmresOptions options{config.tol, config.max_iter};
  IterationReport report;
  try {
    SystemSolution sol = solve_system(problem, pre, options);
    out.u = std::move(sol.u);
    report = std::move(sol.report);
  } catch (const MaxIterExceeded& e) {
    out.u = e.best().solution;
    report = e.best().report;
    row.status = "max_iter";
  }
  row.apply_seconds = report.apply_seconds;
  row.iterations = report.iterations;
  row.solve_seconds = report.solve_seconds;
  row.true_residual = report.true_residual;

  if (config.dump_fields && !config.field_prefix.empty()) {
    dump(config, grid, FieldKind::solution, out.u);
    dump(config, grid, FieldKind::medium, problem.medium);
  }
  return out;
}

namespace {

ResultRow sweep_row(const RunConfig& config, int n, int b) {
  RunConfig cfg = config;
  cfg.mode = RunMode::solve;
  cfg.n = n;
  cfg.leaf = b;
  cfg.dump_fields = false;
  if (cfg.helmholtz()) cfg.media.omega_over_2pi = n / 3.0;
  try {
    return run_solve(cfg).row;
  } catch (const std::exception& e) {
    ResultRow row;
    row.equation = cfg.helmholtz() ? "helmholtz" : "schrodinger";
    row.param = cfg.helmholtz() ? cfg.media.omega_over_2pi : cfg.media.energy;
    row.dim = cfg.dim;
    row.n = n;
    row.leaf = b;
    row.seed = cfg.media.seed;
    row.status = std::string("error: ") + e.what();
    return row;
  }
}

}  // namespace

std::vector<ResultRow> run_sweep(const RunConfig& config) {
  std::vector<ResultRow> rows;
  if (!config.parallel_rows) {
    for (const auto& [n, b] : config.sweep) rows.push_back(sweep_row(config, n, b));
    return rows;
  }
  std::vector<std::future<ResultRow>> pending;
  for (const auto& [n, b] : config.sweep) {
    pending.push_back(std::async(std::launch::async, sweep_row, std::cref(config), n, b));
  }
  for (auto& f : pending) rows.push_back(f.get());
  return rows;
}

bool CheckReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckResult& c) { return c.passed; });
}

CheckReport run_check(const RunConfig& config) {
  CheckReport report;
  auto record = [&](std::string name, bool passed, std::string detail) {
    report.checks.push_back({std::move(name), passed, std::move(detail)});
  };
  auto attempt = [&](const std::string& name, auto&& body) {
    try {
      body();
    } catch (const std::exception& e) {
      record(name, false, std::string("threw: ") + e.what());
    }
  };
  if (config.n > 16) {
    record("grid size", false, "dense oracles need n <= 16");
    return report;
  }

  const GridSpec grid(config.dim, config.n, config.resolved_leaf());
  const SplitProblem problem = build_problem(grid, config.media);
  const Index size = grid.size();
  const Eigen::VectorXd v = random_vector(size, 7);

  attempt("laplacian matches dense DFT", [&] {
    const Field lv = apply_laplacian(grid, span_of(v));
    const Eigen::VectorXd ref = reference::laplacian(grid) * v;
    const double err = relative_error(Eigen::Map<const Eigen::VectorXd>(lv.data(), size), ref);
    record("laplacian matches dense DFT", err <= 1e-12, "rel err " + format_double(err));
  });

  attempt("green matches dense DFT", [&] {
    const Field gv = apply_green(grid, problem.shift, span_of(v));
    const Eigen::VectorXd ref = reference::green(grid, problem.shift) * v;
    const double err = relative_error(Eigen::Map<const Eigen::VectorXd>(gv.data(), size), ref);
    record("green matches dense DFT", err <= 1e-12, "rel err " + format_double(err));
  });

  attempt("inverse identity", [&] {
    ShiftedLaplacian op(grid, problem.shift);
    Field gv(static_cast<std::size_t>(size));
    Field lgv(gv.size());
    op.apply_green(span_of(v), gv);
    op.apply_laplacian(gv, lgv);
    double num = 0.0;
    for (std::size_t i = 0; i < gv.size(); ++i) {
      const double r = lgv[i] - problem.shift * gv[i] - v(static_cast<Index>(i));
      num += r * r;
    }
    const double err = std::sqrt(num) / v.norm();
    record("inverse identity", err <= 1e-10, "rel err " + format_double(err));
  });

  const Partition partition = build_partition(grid);
  attempt("partition counting identity", [&] {
    Index total = 0;
    for (const SkeletonSet& s : partition.sets) total += static_cast<Index>(s.points.size());
    record("partition counting identity", total == size,
           std::to_string(partition.sets.size()) + " sets cover " + std::to_string(total) +
               " of " + std::to_string(size) + " points");
  });

  const GreensKernel kernel = green_kernel(grid, problem.shift);
  const Eigen::MatrixXd g_dense = reference::green(grid, problem.shift);
  attempt("kernel matches dense G", [&] {
    std::vector<Index> all(static_cast<std::size_t>(size));
    for (Index i = 0; i < size; ++i) all[static_cast<std::size_t>(i)] = i;
    const double err = relative_error(kernel.block(all, all), g_dense);
    record("kernel matches dense G", err <= 1e-12, "rel err " + format_double(err));
  });

  const StencilSet stencils = compute_stencils(kernel, partition);
  attempt("stencil translation invariance", [&] {
    double worst = 0.0;
    for (const SkeletonSet& set : partition.sets) {
      const Stencil st = compute_stencil(kernel, set);
      const Eigen::MatrixXd& ref = stencils.of(set).T;
      worst = std::max(worst, (st.T - ref).cwiseAbs().maxCoeff() /
                                  std::max(ref.cwiseAbs().maxCoeff(), 1e-300));
    }
    record("stencil translation invariance", worst <= 1e-12,
           "max rel diff " + format_double(worst));
  });

  const SparseMatrix Q = assemble_Q(partition, stencils);
  const SparseMatrix C = assemble_C(partition, stencils, kernel);
  const SparseMatrix P = assemble_P(Q, C, problem.q);
  attempt("C equals QG on pattern", [&] {
    const Eigen::MatrixXd qg = reference::to_dense(Q) * g_dense;
    double worst = 0.0;
    for (Index r = 0; r < size; ++r) {
      const auto cols = C.row_cols(r);
      const auto vals = C.row_values(r);
      for (std::size_t k = 0; k < cols.size(); ++k) {
        worst = std::max(worst, std::abs(vals[k] - qg(r, cols[k])));
      }
    }
    const double rel = worst / qg.cwiseAbs().maxCoeff();
    record("C equals QG on pattern", rel <= 1e-12, "max rel diff " + format_double(rel));
  });

  attempt("P equals Q(I+Gq) on pattern", [&] {
    const Eigen::Map<const Eigen::VectorXd> q(problem.q.data(), size);
    Eigen::MatrixXd full = reference::to_dense(Q) *
                           (Eigen::MatrixXd::Identity(size, size) + g_dense * q.asDiagonal());
    double worst = 0.0;
    for (Index r = 0; r < size; ++r) {
      const auto cols = P.row_cols(r);
      const auto vals = P.row_values(r);
      for (std::size_t k = 0; k < cols.size(); ++k) {
        worst = std::max(worst, std::abs(vals[k] - full(r, cols[k])));
      }
    }
    const double rel = worst / full.cwiseAbs().maxCoeff();
    record("P equals Q(I+Gq) on pattern", rel <= 1e-12, "max rel diff " + format_double(rel));
  });

  const SeparatorTree tree = separator_tree(partition);
  attempt("sparse LU backward error", [&] {
    const Factorization fact = numeric_factor(P, symbolic_factor(P, tree));
    double worst = 0.0;
    for (std::uint64_t s = 0; s < 10; ++s) {
      const Eigen::VectorXd y = random_vector(size, 100 + s);
      const std::vector<double> x = fact.solve(span_of(y));
      const std::vector<double> px = P.multiply(x);
      double num = 0.0;
      for (Index i = 0; i < size; ++i) {
        num += std::pow(px[static_cast<std::size_t>(i)] - y(i), 2);
      }
      worst = std::max(worst, std::sqrt(num) / y.norm());
    }
    record("sparse LU backward error", worst <= 1e-10, "max " + format_double(worst));
  });

  attempt("end-to-end matches dense solve", [&] {
    const Preconditioner pre = build_preconditioner(problem);
    const SystemSolution sol = solve_system(problem, pre, {config.tol, config.max_iter});
    const std::vector<double> ref = reference::direct_solve(problem);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) {
      num += std::pow(sol.u[i] - ref[i], 2);
      den += ref[i] * ref[i];
    }
    const double err = std::sqrt(num / den);
    record("end-to-end matches dense solve", err <= 1e-5,
           "rel err " + format_double(err) + ", n_p " + std::to_string(sol.report.iterations));
  });

  attempt("resonant shift rejected without adjustment", [&] {
    const double resonant = 4.0 * std::numbers::pi * std::numbers::pi;  // |k| = 1
    bool rejected = false;
    try {
      green_symbol(grid, resonant);
    } catch (const ShiftResonant&) {
      rejected = true;
    }
    record("resonant shift rejected without adjustment", rejected,
           rejected ? "expected failure: ShiftResonant raised" : "no error raised");
  });
  return report;
}

void write_table_header(std::ostream& os, const RunConfig& config) {
  os << "# schema: " << kResultsSchema << '\n';
  os << "# config: " << to_json(config) << '\n';
  os << "param,N,b,T_s,T_a,n_p,T_p,true_residual,ls_cell,ls_face,ls_edge,ls_vertex,"
        "factor_entries,peak_front,shift,shift_steps,equation,d,n,seed,status\n";
}

void write_table_row(std::ostream& os, const ResultRow& row) {
  std::string status = row.status;
  std::replace(status.begin(), status.end(), ',', ';');
  os << row.param << ',' << row.unknowns() << ',' << row.leaf << ','
     << format_double(row.setup_seconds) << ',' << format_double(row.apply_seconds) << ','
     << row.iterations << ',' << format_double(row.solve_seconds) << ','
     << format_double(row.true_residual) << ',' << format_double(row.ls_cell) << ','
     << format_double(row.ls_face) << ',' << format_double(row.ls_edge) << ','
     << format_double(row.ls_vertex) << ',' << row.factor_entries << ',' << row.peak_front
     << ',' << std::setprecision(17) << row.shift << std::setprecision(6) << ','
     << row.shift_steps << ',' << row.equation << ',' << row.dim << ',' << row.n << ','
     << row.seed << ',' << status << '\n';
}

void write_table(const std::filesystem::path& path, const RunConfig& config,
                 const std::vector<ResultRow>& rows) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  write_table_header(os, config);
  for (const ResultRow& row : rows) write_table_row(os, row);
}

}  // namespace sparsify
