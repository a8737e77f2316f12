#pragma once

// JSON serialization of games and deception results. Complex matrices are
// stored as parallel row-major real/imaginary arrays.

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>

#include <json.hpp>

#include "qdecept/deception.hpp"

namespace qdecept {

/// Hermiticity tolerance for game files, absolute in payoff units.
inline constexpr double kGameFileHermitianTolerance = 1e-8;

nlohmann::json game_to_json(const QuantumGamed& g);

/// Parses {n_a, n_b, h_re, h_im, label?}. Throws InvalidInputError on missing or
/// malformed fields and when max |H(i,j) - conj(H(j,i))| exceeds 1e-8.
QuantumGamed game_from_json(const nlohmann::json& j);

QuantumGamed load_game_file(const std::filesystem::path& path);

/// Random Hermitian qubit-qubit game with entries of order 100.
QuantumGamed random_game(std::uint64_t seed, Index n_a = 2, Index n_b = 2);

/// Resolves a game selector: a canned name (pure, diagonal, quantum),
/// "random:<seed>", or a path to a game file.
QuantumGamed resolve_game(const std::string& selector);

nlohmann::json matrix_to_json(const ComplexMatrix<double>& m, const std::string& prefix);
ComplexMatrix<double> matrix_from_json(const nlohmann::json& j, const std::string& prefix,
                                       Index rows, Index cols);

nlohmann::json residuals_to_json(const FeasibilityResiduals<double>& r);

nlohmann::json equilibrium_to_json(const EquilibriumResult<double>& r);

/// Game, budget and the full result, with D stored as d_re / d_im.
nlohmann::json deception_to_json(const QuantumGamed& g, double budget,
                                 const DeceptionResult<double>& r);

struct StoredDeception {
  explicit StoredDeception(QuantumGamed g) : game(std::move(g)) {}

  QuantumGamed game;
  double budget = 0;
  DeceptionResult<double> result;
  FeasibilityResiduals<double> stored_residuals;
};

StoredDeception deception_from_json(const nlohmann::json& j);

/// Residuals recomputed from the stored strategies, D and u.
FeasibilityResiduals<double> recompute_residuals(const StoredDeception& s);

}  // namespace qdecept
