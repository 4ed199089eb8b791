// Command-line front end: precompute coefficient tables, solve configured
// systems, reproduce the published benchmark tables, and time the two
// three-body assembly routes.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "obe/config.hpp"
#include "obe/reproduce.hpp"
#include "obe/solver.hpp"
#include "obe/systems.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitTolerance = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

double wall_seconds(const std::function<void()>& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int cmd_precompute(int qmax, const std::string& out, bool force, int guard) {
  if (qmax < 0) {
    std::cerr << "error: qmax must be >= 0\n";
    return kExitConfig;
  }
  if (qmax > guard) {
    std::cerr << "error: qmax " << qmax << " exceeds the guard of " << guard
              << "; raise it with --max-qmax if intended\n";
    return kExitConfig;
  }
  if (!force && std::filesystem::exists(out)) {
    std::cerr << "error: " << out << " exists; use --force to overwrite\n";
    return kExitIo;
  }
  const obe::CoefficientTables tables = obe::build_tables(qmax);
  const double residual = obe::hyper_table_normalization_residual(tables.hyper);
  std::cout << "channels: " << tables.hyper.channels.size()
            << "\nworst normalization residual: " << std::scientific << std::setprecision(3)
            << residual << std::defaultfloat << "\n";
  if (residual > 1e-8) {
    std::cerr << "error: normalization residual exceeds 1e-8; tables not written\n";
    return kExitTolerance;
  }
  try {
    obe::save_tables(tables, out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  std::cout << "wrote " << out << "\n";
  return kExitOk;
}

int cmd_solve(const std::string& config_path, const std::string& tables_path,
              const std::string& out_path) {
  obe::RunConfig rc;
  nlohmann::json config_json;
  try {
    std::ifstream f(config_path);
    if (!f) throw std::runtime_error("cannot open config file " + config_path);
    config_json = nlohmann::json::parse(f);
    rc = obe::parse_run_config(config_json);
  } catch (const obe::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const nlohmann::json::parse_error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  if (!tables_path.empty()) rc.tables_path = tables_path;
  if (!out_path.empty()) rc.output_path = out_path;

  obe::CoefficientTables tables;
  const bool needs_tables = !rc.system.three_body.empty();
  if (needs_tables) {
    if (rc.tables_path.empty()) {
      std::cerr << "configuration error: three-body forces need a coefficient table "
                   "(--tables or the 'tables' config section); run 'obe precompute' first\n";
      return kExitConfig;
    }
    try {
      tables = obe::load_tables(rc.tables_path);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitIo;
    }
    if (tables.qmax < rc.sector.qmax) {
      std::cerr << "configuration error: table cache covers qmax " << tables.qmax
                << " but the run needs " << rc.sector.qmax << "; re-run precompute\n";
      return kExitConfig;
    }
  }

  nlohmann::json result;
  result["config_hash"] = obe::config_hash(config_json);
  result["cache_checksum"] = needs_tables ? tables.checksum : 0;
  try {
    const obe::SymmetrizedBasis basis = obe::symmetrize(rc.sector);
    if (basis.size() == 0) {
      std::cout << "empty sector: no basis states\n";
      result["empty_sector"] = true;
      if (!rc.output_path.empty()) {
        std::ofstream f(rc.output_path);
        f << result.dump(2) << "\n";
      }
      return kExitOk;
    }

    double a = rc.variational.a;
    const obe::CoefficientTables* tp = needs_tables ? &tables : nullptr;
    if (rc.variational.mode != obe::ScaleMode::fixed) {
      obe::SectorSpec opt_sector = rc.sector;
      if (rc.variational.mode == obe::ScaleMode::optimize_at)
        opt_sector.qmax = rc.variational.optimize_at_q;
      const obe::SymmetrizedBasis opt_basis = obe::symmetrize(opt_sector);
      const double rel_tol = rc.variational.tolerance / std::sqrt(rc.a_low * rc.a_high);
      a = obe::optimize_scale(opt_basis, rc.system, tp, rc.a_low, rc.a_high, rel_tol).a;
    }
    const obe::ScaleParams s = obe::ScaleParams::locked_scale(a);
    const obe::SpectrumResult res =
        obe::solve_sector(basis, rc.system, s, tp, rc.variational.states);

    result["a"] = res.a;
    result["b"] = res.b;
    result["basis_size"] = res.basis_size;
    std::vector<double> evs(res.eigenvalues.data(), res.eigenvalues.data() + res.eigenvalues.size());
    result["energies"] = evs;
    if (rc.system.pairs_equal) {
      const Eigen::MatrixXd r12 = obe::assemble_channel_r12(basis.channels, s);
      std::vector<double> means;
      for (int c = 0; c < res.eigenvectors.cols(); ++c)
        means.push_back(obe::expectation(basis, r12, res.eigenvectors.col(c)));
      result["r12_mean"] = means;
    }

    std::cout << std::setprecision(12);
    std::cout << "a = " << res.a << "  basis size = " << res.basis_size << "\n";
    for (int i = 0; i < res.eigenvalues.size(); ++i)
      std::cout << "E[" << i << "] = " << res.eigenvalues[i] << "\n";
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }

  if (!rc.output_path.empty()) {
    std::ofstream f(rc.output_path);
    if (!f) {
      std::cerr << "error: cannot write " << rc.output_path << "\n";
      return kExitIo;
    }
    f << result.dump(2) << "\n";
  }
  return kExitOk;
}

int cmd_reproduce(int table, const std::string& tables_path) {
  obe::CoefficientTables tables;
  try {
    tables = obe::load_tables(tables_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  const int needed = (table == 3) ? 28 : 24;
  if (tables.qmax < needed) {
    std::cerr << "configuration error: table " << table << " needs coefficient tables up to qmax "
              << needed << " (cache has " << tables.qmax << ")\n";
    return kExitConfig;
  }
  std::vector<obe::CheckRow> rows;
  try {
    rows = obe::reproduce_table(table, tables);
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  }
  std::cout << std::left << std::setw(24) << "value" << std::right << std::setw(20) << "computed"
            << std::setw(20) << "reference" << std::setw(14) << "abs diff" << "\n";
  const bool ok = obe::print_check_rows(rows, std::cout);
  return ok ? kExitOk : kExitTolerance;
}

int cmd_benchmark(const std::string& config_path, const std::vector<int>& qmax_list) {
  obe::RunConfig rc;
  try {
    rc = obe::load_run_config(config_path);
  } catch (const obe::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  if (rc.system.three_body.empty()) {
    std::cerr << "configuration error: benchmark needs a three-body force\n";
    return kExitConfig;
  }
  if (qmax_list.empty()) {
    std::cerr << "configuration error: --qmax-list is empty\n";
    return kExitConfig;
  }

  const double a = rc.variational.a > 0.0 ? rc.variational.a : 1.0;
  const obe::ScaleParams s = obe::ScaleParams::locked_scale(a);
  std::cout << "qmax,n_channels,hyper_seconds,naive_seconds,speedup\n";
  std::vector<double> log_q, log_hyper, log_naive;
  double last_speedup = 0.0;
  for (int q : qmax_list) {
    obe::SectorSpec sector = rc.sector;
    sector.qmax = q;
    const std::vector<obe::ChannelState> channels = obe::enumerate_channels(sector);
    const obe::CoefficientTables tables = obe::build_tables(q);
    const int n = int(channels.size());
    Eigen::MatrixXd mh(n, n), mn(n, n);
    const double th = wall_seconds([&] {
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
          double v = 0.0;
          for (const obe::RadialKernel& k : rc.system.three_body)
            v += obe::three_body_me_hyper(channels[i], channels[j], k, rc.system, s, tables.hyper,
                                          &tables.bhyper);
          mh(i, j) = mh(j, i) = v;
        }
    });
    const double tn = wall_seconds([&] {
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
          double v = 0.0;
          for (const obe::RadialKernel& k : rc.system.three_body)
            v += obe::three_body_me_naive(channels[i], channels[j], k, rc.system, s);
          mn(i, j) = mn(j, i) = v;
        }
    });
    last_speedup = tn / th;
    std::cout << q << "," << n << "," << std::setprecision(6) << th << "," << tn << ","
              << last_speedup << "\n";
    if (q > 0) {
      log_q.push_back(std::log(double(q)));
      log_hyper.push_back(std::log(std::max(th, 1e-9)));
      log_naive.push_back(std::log(std::max(tn, 1e-9)));
    }
  }
  auto slope = [](const std::vector<double>& x, const std::vector<double>& y) {
    const int n = int(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
      sx += x[i];
      sy += y[i];
      sxx += x[i] * x[i];
      sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
  };
  if (log_q.size() >= 2) {
    std::cout << "log-log slope (hyper): " << std::setprecision(3) << slope(log_q, log_hyper)
              << "\nlog-log slope (naive): " << slope(log_q, log_naive) << "\n";
  }
  std::cout << "speedup at largest qmax: " << std::setprecision(3) << last_speedup << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Oscillator-basis expansion solver for three-body systems"};
  app.require_subcommand(1);

  auto* pre = app.add_subcommand("precompute", "Build and store coefficient tables");
  int pre_qmax = 0;
  std::string pre_out;
  bool pre_force = false;
  int pre_guard = 40;
  pre->add_option("--qmax", pre_qmax, "Largest number of quanta covered")->required();
  pre->add_option("--out", pre_out, "Output table file")->required();
  pre->add_flag("--force", pre_force, "Overwrite an existing file");
  pre->add_option("--max-qmax", pre_guard, "Safety guard on qmax");

  auto* sol = app.add_subcommand("solve", "Solve a configured system");
  std::string sol_config, sol_tables, sol_out;
  sol->add_option("--config", sol_config, "JSON run configuration")->required();
  sol->add_option("--tables", sol_tables, "Coefficient table file (overrides config)");
  sol->add_option("--out", sol_out, "Result file (overrides config)");

  auto* rep = app.add_subcommand("reproduce", "Recompute a published benchmark table");
  int rep_table = 0;
  std::string rep_tables;
  rep->add_option("--table", rep_table, "Table number, 1..5")
      ->required()
      ->check(CLI::Range(1, 5));
  rep->add_option("--tables", rep_tables, "Coefficient table file")->required();

  auto* ben = app.add_subcommand("benchmark", "Time both three-body assembly routes");
  std::string ben_config;
  std::vector<int> ben_qmax;
  ben->add_option("--config", ben_config, "JSON run configuration")->required();
  ben->add_option("--qmax-list", ben_qmax, "Basis sizes to time")->required()->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int r = app.exit(e);
    return r == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (pre->parsed()) return cmd_precompute(pre_qmax, pre_out, pre_force, pre_guard);
    if (sol->parsed()) return cmd_solve(sol_config, sol_tables, sol_out);
    if (rep->parsed()) return cmd_reproduce(rep_table, rep_tables);
    if (ben->parsed()) return cmd_benchmark(ben_config, ben_qmax);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitConfig;
}
