// qdecept: equilibrium values, optimal deception and budget sweeps for
// zero-sum quantum games.
//
//   qdecept value   --game diagonal
//   qdecept deceive --game quantum --delta 40 --out d40.json
//   qdecept sweep   --game pure --deltas 0,20,40 --format csv
//   qdecept verify  --game random:7 --delta 50
//
// Exit codes: 0 ok, 2 input error, 3 solver did not converge, 4 certificate failure.

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "qdecept/io.hpp"
#include "qdecept/sweep.hpp"

namespace fs = std::filesystem;
using namespace qdecept;

namespace {

enum Exit { kOk = 0, kInput = 2, kNoConvergence = 3, kCertificate = 4 };

struct Options {
  std::string game;
  double delta = 0;
  std::string deltas = "0,20,40,60,80,100";
  int restarts = 16;
  double tol = 1e-4;
  std::uint64_t seed = 0;
  std::string out;
  std::string out_dir;
  std::string format = "csv";
  double time_cap_s = 120;
  int samples = 200;
};

void print_matrix(std::ostream& os, const std::string& name, const ComplexMatrix<double>& m) {
  os << name << "_re:\n" << m.real() << "\n" << name << "_im:\n" << m.imag() << "\n";
}

// Explicit --out wins; otherwise a default file name under the output directory,
// or stdout when no directory is configured and stdout is allowed.
std::string output_path(const Options& o, const std::string& default_name, bool allow_stdout) {
  if (!o.out.empty()) return o.out;
  if (!o.out_dir.empty()) {
    fs::create_directories(o.out_dir);
    return (fs::path(o.out_dir) / default_name).string();
  }
  return allow_stdout ? std::string() : default_name;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw InvalidInputError("cannot write '" + path + "'");
  f << text;
}

std::string slug(const QuantumGamed& g) {
  std::string s = g.label();
  for (char& c : s)
    if (!std::isalnum(static_cast<unsigned char>(c))) c = '_';
  return s;
}

SolverConfig solver_config(const Options& o) {
  SolverConfig cfg;
  cfg.tolerance = o.tol;
  cfg.seed = o.seed;
  return cfg;
}

int cmd_value(const Options& o) {
  const auto g = resolve_game(o.game);
  const auto r = solve_equilibrium(g, solver_config(o));
  const double tol = scaled_tolerance(o.tol, frobenius_norm(g.hamiltonian()));
  const bool ok = is_security_policy(g, Player::kA, r.rho_a, r.value, tol) &&
                  is_security_policy(g, Player::kB, r.rho_b, r.value, tol);
  if (o.format == "json") {
    auto j = equilibrium_to_json(r);
    j["game"] = g.label();
    j["certified"] = ok;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "game " << g.label() << "\nvalue " << r.value << "\nlower " << r.lower
              << "\nupper " << r.upper << "\nduality_gap " << r.duality_gap << "\niterations "
              << r.iterations << "\ncertificate_residual_a " << r.certificate.residual_a
              << "\ncertificate_residual_b " << r.certificate.residual_b << "\n";
    print_matrix(std::cout, "rho_a", r.rho_a.matrix());
    print_matrix(std::cout, "rho_b", r.rho_b.matrix());
  }
  return ok ? kOk : kCertificate;
}

int cmd_deceive(const Options& o) {
  const auto g = resolve_game(o.game);
  if (!(o.delta >= 0)) throw InvalidInputError("--delta must be >= 0");
  SweepSpec spec;
  spec.restarts = o.restarts;
  spec.tolerance = o.tol;
  spec.seed = o.seed;
  spec.time_cap_s = o.time_cap_s;
  spec.deltas = {o.delta};
  validate(spec);
  const auto res = solve_deception(make_instance(g, o.delta, spec));

  char name[128];
  std::snprintf(name, sizeof name, "deceive_%s_%g.json", slug(g).c_str(), o.delta);
  const std::string path = output_path(o, name, false);
  write_text(path, deception_to_json(g, o.delta, res).dump(2) + "\n");

  std::cout << "game " << g.label() << "\ndelta " << o.delta << "\nrealized_payoff "
            << res.realized_payoff << "\nperceived_value " << res.perceived_value
            << "\nresidual " << res.residuals.max() << "\nwinner_restart " << res.winner
            << "\nwritten " << path << "\n";
  print_matrix(std::cout, "d", res.d_star.matrix());
  for (const auto& w : res.warnings) std::cerr << "warning: " << w << "\n";

  const double tol = scaled_tolerance(o.tol, frobenius_norm(g.hamiltonian()));
  if (!res.converged) return kNoConvergence;
  return res.residuals.max() <= tol ? kOk : kCertificate;
}

int cmd_sweep(const Options& o) {
  const auto g = resolve_game(o.game);
  SweepSpec spec;
  spec.deltas = parse_delta_list(o.deltas);
  spec.restarts = o.restarts;
  spec.tolerance = o.tol;
  spec.seed = o.seed;
  spec.time_cap_s = o.time_cap_s;
  validate(spec);

  const std::string path = output_path(o, "sweep_" + slug(g) + "." + o.format, true);
  std::ofstream file;
  if (!path.empty()) {
    file.open(path);
    if (!file) throw InvalidInputError("cannot write '" + path + "'");
  }
  std::ostream& os = path.empty() ? std::cout : file;

  // CSV rows are flushed as they complete so a later failure keeps earlier rows.
  const bool csv = o.format == "csv";
  if (csv) os << kSweepCsvHeader << "\n" << std::flush;
  const auto rows = run_sweep(g, spec, [&](const SweepRow& r) {
    if (csv) os << csv_line(r) << "\n" << std::flush;
    std::cerr << "delta " << r.delta << (r.failed ? " FAILED: " + r.error : " done") << "\n";
  });
  if (!csv) os << sweep_to_json(g, spec, rows).dump(2) << "\n";

  const double tol = scaled_tolerance(o.tol, frobenius_norm(g.hamiltonian()));
  bool certified = true;
  for (const auto& r : rows) {
    if (r.failed) return kNoConvergence;
    if (!r.result->converged) return kNoConvergence;
    certified = certified && r.residual <= tol;
  }
  return certified ? kOk : kCertificate;
}

int cmd_verify(const Options& o) {
  const auto g = resolve_game(o.game);
  if (!(o.delta >= 0)) throw InvalidInputError("--delta must be >= 0");
  if (o.samples < 1) throw InvalidInputError("--samples must be >= 1");
  const auto rep = verify_theorem1(g, o.delta, solver_config(o), o.samples, o.seed + 7);
  std::cout << "game " << g.label() << "\ndelta " << o.delta << "\nnaive_value "
            << rep.naive_value << "\nrobust_value " << rep.robust_value << "\nvalue_gap "
            << rep.naive_value - rep.robust_value << "\nvalue_gap_residual "
            << rep.value_gap_residual << "\nrayleigh_max " << rep.rayleigh_max
            << "\nrayleigh_residual " << rep.rayleigh_residual << "\ncross_certificate_a "
            << rep.cross_certificate_a << "\ncross_certificate_b " << rep.cross_certificate_b
            << "\ntolerance " << rep.tolerance << "\n"
            << (rep.passed ? "PASS" : "FAIL") << "\n";
  for (const auto& f : rep.failures) std::cout << "failure: " << f << "\n";
  return rep.passed ? kOk : kCertificate;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Security policies and optimal deception for zero-sum quantum games"};
  app.require_subcommand(1);
  app.set_config("--config", "", "INI/TOML file with default option values");
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--game", o.game, "pure | diagonal | quantum | random:<seed> | <file.json>")
        ->required();
    sub->add_option("--tol", o.tol, "duality-gap tolerance relative to ||H||_F")
        ->capture_default_str();
    sub->add_option("--seed", o.seed, "random seed")->capture_default_str();
  };
  auto search = [&](CLI::App* sub) {
    sub->add_option("--restarts", o.restarts, "random restarts per budget")->capture_default_str();
    sub->add_option("--time-cap-s", o.time_cap_s, "wall-time cap per budget")
        ->capture_default_str();
    sub->add_option("--out", o.out, "output file");
    sub->add_option("--out-dir", o.out_dir, "default output directory")
        ->envname("QDECEPT_OUT_DIR");
  };

  auto* value = app.add_subcommand("value", "equilibrium value and security policies");
  common(value);
  value->add_option("--format", o.format, "csv (plain text) | json")
      ->check(CLI::IsMember({"csv", "json"}));

  auto* deceive = app.add_subcommand("deceive", "optimal deception for one budget");
  common(deceive);
  search(deceive);
  deceive->add_option("--delta", o.delta, "deception budget")->required();

  auto* sweep = app.add_subcommand("sweep", "deception over a list of budgets");
  common(sweep);
  search(sweep);
  sweep->add_option("--deltas", o.deltas, "comma-separated ascending budgets")
      ->capture_default_str();
  sweep->add_option("--format", o.format, "csv | json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();

  auto* verify = app.add_subcommand("verify", "naive/robust victim equivalence check");
  common(verify);
  verify->add_option("--delta", o.delta, "deception budget")->required();
  verify->add_option("--samples", o.samples, "random product states")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInput;
  }

  try {
    if (*value) return cmd_value(o);
    if (*deceive) return cmd_deceive(o);
    if (*sweep) return cmd_sweep(o);
    if (*verify) return cmd_verify(o);
  } catch (const ConvergenceError& e) {
    std::cerr << "error: " << e.what() << " (best residual " << e.best_residual() << ")\n";
    return kNoConvergence;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  }
  return kInput;
}
