#include <CLI11.hpp>

#include <cmath>
#include <iostream>
#include <optional>

#include "sparsify/errors.hpp"
#include "sparsify/harness.hpp"

namespace {

using namespace sparsify;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;

struct Overrides {
  std::string config;
  std::string out;
  bool dump_fields = false;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::optional<int> max_iter;
};

void add_common(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config, "JSON run configuration")->required();
  sub->add_option("--out", o.out, "CSV table path (solve, sweep) or field prefix base");
  sub->add_flag("--dump-fields", o.dump_fields, "write the solution and medium fields");
  sub->add_option("--seed", o.seed, "media seed");
  sub->add_option("--tol", o.tol, "GMRES relative tolerance");
  sub->add_option("--max-iter", o.max_iter, "GMRES iteration cap");
}

RunConfig resolve(const Overrides& o, RunMode mode) {
  RunConfig cfg = load_config(o.config);
  cfg.mode = mode;
  if (o.seed) cfg.media.seed = *o.seed;
  if (o.tol) cfg.tol = *o.tol;
  if (o.max_iter) cfg.max_iter = *o.max_iter;
  if (!o.out.empty()) cfg.table_path = o.out;
  if (o.dump_fields) {
    cfg.dump_fields = true;
    if (cfg.field_prefix.empty()) {
      std::filesystem::path base = cfg.table_path.empty() ? "sparsify" : cfg.table_path;
      cfg.field_prefix = base.replace_extension();
    }
  }
  validate(cfg);
  return cfg;
}

void print_row(const ResultRow& r) {
  std::cout << r.equation << " d=" << r.dim << " n=" << r.n << " b=" << r.leaf
            << " param=" << r.param << "  n_p=" << r.iterations << "  T_s=" << r.setup_seconds
            << "s T_a=" << r.apply_seconds << "s T_p=" << r.solve_seconds
            << "s  true_residual=" << r.true_residual << "  status=" << r.status << "\n";
}

void emit_table(const RunConfig& cfg, const std::vector<ResultRow>& rows) {
  if (cfg.table_path.empty()) {
    write_table_header(std::cout, cfg);
    for (const ResultRow& r : rows) write_table_row(std::cout, r);
  } else {
    write_table(cfg.table_path, cfg, rows);
    std::cout << "table written to " << cfg.table_path.string() << "\n";
  }
}

int do_solve(const RunConfig& cfg) {
  const SolveOutcome out = run_solve(cfg);
  print_row(out.row);
  emit_table(cfg, {out.row});
  return out.row.status == "ok" ? kExitOk : kExitFailure;
}

int do_sweep(const RunConfig& cfg) {
  const std::vector<ResultRow> rows = run_sweep(cfg);
  bool ok = true;
  for (const ResultRow& r : rows) {
    print_row(r);
    ok = ok && r.status == "ok";
  }
  emit_table(cfg, rows);
  return ok ? kExitOk : kExitFailure;
}

int do_check(const RunConfig& cfg) {
  const CheckReport report = run_check(cfg);
  for (const CheckResult& c : report.checks) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name;
    if (!c.detail.empty()) std::cout << "  (" << c.detail << ")";
    std::cout << "\n";
  }
  return report.all_passed() ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparsifying preconditioner for periodic Helmholtz and Schroedinger problems"};
  app.require_subcommand(1);
  Overrides o;
  CLI::App* solve = app.add_subcommand("solve", "run one configuration end to end");
  CLI::App* sweep = app.add_subcommand("sweep", "run the (n, b) list of the config");
  CLI::App* check = app.add_subcommand("check", "dense-oracle checks on a small grid");
  for (CLI::App* sub : {solve, sweep, check}) add_common(sub, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  const RunMode mode = solve->parsed() ? RunMode::solve
                       : sweep->parsed() ? RunMode::sweep
                                         : RunMode::check;
  RunConfig cfg;
  try {
    cfg = resolve(o, mode);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    switch (mode) {
      case RunMode::solve:
        return do_solve(cfg);
      case RunMode::sweep:
        return do_sweep(cfg);
      case RunMode::check:
        return do_check(cfg);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}
