#pragma once

// Deception-budget sweeps: one solve_deception per budget, each warm-started
// from the deceptions found at the smaller budgets.

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qdecept/deception.hpp"

namespace qdecept {

struct SweepSpec {
  std::vector<double> deltas{0, 20, 40, 60, 80, 100};
  int restarts = 16;
  double tolerance = 1e-4;
  std::uint64_t seed = 0;
  double time_cap_s = 120;
};

struct SweepRow {
  double delta = 0;
  double realized_payoff = 0;
  double perceived_value = 0;
  double residual = 0;
  double wall_time_s = 0;
  int winner_restart = 0;
  bool failed = false;
  std::string error;
  std::optional<DeceptionResult<double>> result;
};

/// Rejects negative, non-finite or unsorted budget lists and bad settings.
void validate(const SweepSpec& spec);

/// Parses "0,20,40".
std::vector<double> parse_delta_list(const std::string& text);

DeceptionInstance<double> make_instance(const QuantumGamed& g, double delta,
                                        const SweepSpec& spec);

/// Runs the sweep in budget order. A solver exception ends the sweep with a failed
/// row for that budget. on_row sees each row as soon as it is complete.
std::vector<SweepRow> run_sweep(const QuantumGamed& g, const SweepSpec& spec,
                                const std::function<void(const SweepRow&)>& on_row = {});

inline constexpr const char* kSweepCsvHeader =
    "delta,realized_payoff,perceived_value,residual,wall_time_s,winner_restart";

std::string csv_line(const SweepRow& row);
void write_csv(std::ostream& out, const std::vector<SweepRow>& rows);
nlohmann::json sweep_to_json(const QuantumGamed& g, const SweepSpec& spec,
                             const std::vector<SweepRow>& rows);

}  // namespace qdecept
