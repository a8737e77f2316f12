#include "qdecept/io.hpp"

#include <cmath>
#include <fstream>
#include <random>

#include "qdecept/hamiltonian.hpp"

namespace qdecept {

using nlohmann::json;

namespace {

// Flat row-major array, or an array of rows.
std::vector<double> flatten(const json& j, const std::string& key) {
  if (!j.contains(key)) throw InvalidInputError("missing field '" + key + "'");
  const json& a = j.at(key);
  if (!a.is_array()) throw InvalidInputError("field '" + key + "' must be an array");
  std::vector<double> out;
  for (const auto& x : a) {
    if (x.is_array()) {
      for (const auto& y : x) {
        if (!y.is_number()) throw InvalidInputError("field '" + key + "' has a non-numeric entry");
        out.push_back(y.get<double>());
      }
    } else if (x.is_number()) {
      out.push_back(x.get<double>());
    } else {
      throw InvalidInputError("field '" + key + "' has a non-numeric entry");
    }
  }
  return out;
}

Index positive_count(const json& j, const std::string& key) {
  if (!j.contains(key) || !j.at(key).is_number_integer()) {
    throw InvalidInputError("missing or non-integer field '" + key + "'");
  }
  const auto v = j.at(key).get<long long>();
  if (v < 1) throw InvalidInputError("field '" + key + "' must be >= 1");
  return Index(v);
}

DensityMatrixd state_from_json(const json& j, const std::string& prefix, Index dim) {
  return DensityMatrixd(HermitianOperatord(matrix_from_json(j, prefix, dim, dim)));
}

}  // namespace

json matrix_to_json(const ComplexMatrix<double>& m, const std::string& prefix) {
  std::vector<double> re, im;
  re.reserve(size_t(m.size()));
  im.reserve(size_t(m.size()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index k = 0; k < m.cols(); ++k) {
      re.push_back(m(i, k).real());
      im.push_back(m(i, k).imag());
    }
  return json{{prefix + "_re", re}, {prefix + "_im", im}};
}

ComplexMatrix<double> matrix_from_json(const json& j, const std::string& prefix, Index rows,
                                       Index cols) {
  const auto re = flatten(j, prefix + "_re");
  const auto im = flatten(j, prefix + "_im");
  const size_t n = size_t(rows * cols);
  if (re.size() != n || im.size() != n) {
    throw InvalidInputError(prefix + "_re/" + prefix + "_im must hold " + std::to_string(n) +
                            " entries");
  }
  ComplexMatrix<double> m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index k = 0; k < cols; ++k) {
      const size_t at = size_t(i * cols + k);
      m(i, k) = {re[at], im[at]};
    }
  if (!all_finite(m)) throw InvalidInputError(prefix + " has non-finite entries");
  return m;
}

json game_to_json(const QuantumGamed& g) {
  json j = matrix_to_json(g.hamiltonian().matrix(), "h");
  j["n_a"] = g.n_a();
  j["n_b"] = g.n_b();
  if (!g.label().empty()) j["label"] = g.label();
  return j;
}

QuantumGamed game_from_json(const json& j) {
  if (!j.is_object()) throw InvalidInputError("game file must hold a JSON object");
  const Index na = positive_count(j, "n_a");
  const Index nb = positive_count(j, "n_b");
  const Index d = na * nb;
  const ComplexMatrix<double> h = matrix_from_json(j, "h", d, d);
  const double asym = (h - h.adjoint()).cwiseAbs().maxCoeff();
  if (asym > kGameFileHermitianTolerance) {
    throw InvalidInputError("Hamiltonian is not Hermitian (max |H - H^H| = " +
                            std::to_string(asym) + ")");
  }
  std::string label = "file";
  if (j.contains("label")) {
    if (!j.at("label").is_string()) throw InvalidInputError("field 'label' must be a string");
    label = j.at("label").get<std::string>();
  }
  return QuantumGamed(na, nb, HermitianOperatord(h), label);
}

QuantumGamed load_game_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInputError("cannot open game file '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw InvalidInputError("malformed game file '" + path.string() + "': " + e.what());
  }
  return game_from_json(j);
}

QuantumGamed random_game(std::uint64_t seed, Index n_a, Index n_b) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 50.0);
  const Index d = n_a * n_b;
  ComplexMatrix<double> m(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index k = 0; k < d; ++k) m(i, k) = {normal(rng), normal(rng)};
  return QuantumGamed(n_a, n_b, HermitianOperatord(m), "random:" + std::to_string(seed));
}

QuantumGamed resolve_game(const std::string& selector) {
  if (auto c = parse_canned_game(selector)) return canned_game<double>(*c);
  const std::string tag = "random:";
  if (selector.rfind(tag, 0) == 0) {
    const std::string digits = selector.substr(tag.size());
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos) {
      throw InvalidInputError("bad random game selector '" + selector + "'");
    }
    return random_game(std::stoull(digits));
  }
  if (!std::filesystem::exists(selector)) {
    throw InvalidInputError("'" + selector + "' is neither a canned game nor an existing file");
  }
  return load_game_file(selector);
}

json residuals_to_json(const FeasibilityResiduals<double>& r) {
  return json{{"victim_security", r.victim_security},
              {"dual_certificate", r.dual_certificate},
              {"budget", r.budget},
              {"positivity", r.positivity},
              {"unit_trace", r.unit_trace},
              {"max", r.max()}};
}

json equilibrium_to_json(const EquilibriumResult<double>& r) {
  json j{{"value", r.value},
         {"lower", r.lower},
         {"upper", r.upper},
         {"duality_gap", r.duality_gap},
         {"iterations", r.iterations},
         {"converged", r.converged},
         {"certificate", {{"residual_a", r.certificate.residual_a},
                          {"residual_b", r.certificate.residual_b}}},
         {"tie_a", r.tie_a},
         {"tie_b", r.tie_b}};
  j.update(matrix_to_json(r.rho_a.matrix(), "rho_a"));
  j.update(matrix_to_json(r.rho_b.matrix(), "rho_b"));
  return j;
}

json deception_to_json(const QuantumGamed& g, double budget, const DeceptionResult<double>& r) {
  json j{{"game", game_to_json(g)},
         {"budget", budget},
         {"perceived_value", r.perceived_value},
         {"realized_payoff", r.realized_payoff},
         {"residuals", residuals_to_json(r.residuals)},
         {"restarts_used", r.restarts_used},
         {"winner_restart", r.winner},
         {"evaluations", r.evaluations},
         {"converged", r.converged},
         {"best_objective_trace", r.best_objective_trace},
         {"warnings", r.warnings}};
  j.update(matrix_to_json(r.d_star.matrix(), "d"));
  j.update(matrix_to_json(r.rho_a.matrix(), "rho_a"));
  j.update(matrix_to_json(r.rho_b.matrix(), "rho_b"));
  j.update(matrix_to_json(r.omega.matrix(), "omega"));
  return j;
}

StoredDeception deception_from_json(const json& j) {
  if (!j.is_object() || !j.contains("game")) {
    throw InvalidInputError("deception result must be an object with a 'game' field");
  }
  auto need = [&](const char* key) -> const json& {
    if (!j.contains(key)) throw InvalidInputError(std::string("missing field '") + key + "'");
    return j.at(key);
  };
  StoredDeception s(game_from_json(j.at("game")));
  s.budget = need("budget").get<double>();
  const Index d = s.game.dim();
  auto& r = s.result;
  r.d_star = HermitianOperatord(matrix_from_json(j, "d", d, d));
  r.rho_a = state_from_json(j, "rho_a", s.game.n_a());
  r.rho_b = state_from_json(j, "rho_b", s.game.n_b());
  r.omega = state_from_json(j, "omega", s.game.n_a());
  r.perceived_value = need("perceived_value").get<double>();
  r.realized_payoff = need("realized_payoff").get<double>();
  const json& res = need("residuals");
  s.stored_residuals.victim_security = res.at("victim_security").get<double>();
  s.stored_residuals.dual_certificate = res.at("dual_certificate").get<double>();
  s.stored_residuals.budget = res.at("budget").get<double>();
  s.stored_residuals.positivity = res.at("positivity").get<double>();
  s.stored_residuals.unit_trace = res.at("unit_trace").get<double>();
  r.residuals = s.stored_residuals;
  r.restarts_used = j.value("restarts_used", 0);
  r.winner = j.value("winner_restart", 0);
  r.evaluations = j.value("evaluations", 0L);
  r.converged = j.value("converged", false);
  r.best_objective_trace = j.value("best_objective_trace", std::vector<double>{});
  r.warnings = j.value("warnings", std::vector<std::string>{});
  return s;
}

FeasibilityResiduals<double> recompute_residuals(const StoredDeception& s) {
  const auto& r = s.result;
  return feasibility_residuals(s.game, r.d_star, s.budget, r.rho_a, r.rho_b, r.omega,
                               r.perceived_value);
}

}  // namespace qdecept
