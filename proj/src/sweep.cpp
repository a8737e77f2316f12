#include "qdecept/sweep.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "qdecept/io.hpp"

namespace qdecept {

void validate(const SweepSpec& spec) {
  if (spec.deltas.empty()) throw InvalidInputError("sweep: empty budget list");
  for (size_t k = 0; k < spec.deltas.size(); ++k) {
    const double d = spec.deltas[k];
    if (!std::isfinite(d) || d < 0) throw InvalidInputError("sweep: budgets must be finite and >= 0");
    if (k > 0 && d < spec.deltas[k - 1]) throw InvalidInputError("sweep: budgets must be ascending");
  }
  if (spec.restarts < 0) throw InvalidInputError("sweep: restarts must be >= 0");
  if (!(spec.tolerance > 0)) throw InvalidInputError("sweep: tolerance must be > 0");
  if (!(spec.time_cap_s > 0)) throw InvalidInputError("sweep: time cap must be > 0");
}

std::vector<double> parse_delta_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    size_t used = 0;
    double v = 0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw InvalidInputError("bad budget '" + item + "'");
    }
    if (item.find_first_not_of(" \t", used) != std::string::npos) {
      throw InvalidInputError("bad budget '" + item + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw InvalidInputError("empty budget list");
  return out;
}

DeceptionInstance<double> make_instance(const QuantumGamed& g, double delta,
                                        const SweepSpec& spec) {
  DeceptionInstance<double> inst(g, delta);
  inst.config.tolerance = spec.tolerance;
  inst.config.seed = spec.seed;
  inst.restarts = spec.restarts;
  inst.time_cap_s = spec.time_cap_s;
  return inst;
}

std::vector<SweepRow> run_sweep(const QuantumGamed& g, const SweepSpec& spec,
                                const std::function<void(const SweepRow&)>& on_row) {
  validate(spec);
  std::vector<SweepRow> rows;
  std::vector<HermitianOperatord> found;
  for (const double delta : spec.deltas) {
    auto inst = make_instance(g, delta, spec);
    inst.warm_starts = found;
    SweepRow row;
    row.delta = delta;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      auto res = solve_deception(inst);
      row.realized_payoff = res.realized_payoff;
      row.perceived_value = res.perceived_value;
      row.residual = res.residuals.max();
      row.winner_restart = res.winner;
      found.push_back(res.d_star);
      row.result = std::move(res);
    } catch (const std::exception& e) {
      row.failed = true;
      row.error = e.what();
      row.realized_payoff = row.perceived_value = row.residual = std::nan("");
      row.winner_restart = -1;
    }
    row.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rows.push_back(row);
    if (on_row) on_row(rows.back());
    if (row.failed) break;
  }
  return rows;
}

std::string csv_line(const SweepRow& row) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g,%.6g,%.3f,%d", row.delta, row.realized_payoff,
                row.perceived_value, row.residual, row.wall_time_s, row.winner_restart);
  return buf;
}

void write_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << kSweepCsvHeader << '\n';
  for (const auto& r : rows) out << csv_line(r) << '\n';
}

nlohmann::json sweep_to_json(const QuantumGamed& g, const SweepSpec& spec,
                             const std::vector<SweepRow>& rows) {
  nlohmann::json out{{"game", game_to_json(g)},
                     {"restarts", spec.restarts},
                     {"tolerance", spec.tolerance},
                     {"seed", spec.seed},
                     {"rows", nlohmann::json::array()}};
  for (const auto& r : rows) {
    nlohmann::json j{{"delta", r.delta},
                     {"wall_time_s", r.wall_time_s},
                     {"winner_restart", r.winner_restart},
                     {"failed", r.failed}};
    if (r.failed) {
      j["error"] = r.error;
    } else {
      j["realized_payoff"] = r.realized_payoff;
      j["perceived_value"] = r.perceived_value;
      j["residual"] = r.residual;
      j.update(matrix_to_json(r.result->d_star.matrix(), "d"));
    }
    out["rows"].push_back(std::move(j));
  }
  return out;
}

}  // namespace qdecept
