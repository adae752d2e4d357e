#pragma once

// Configuration, seeded instance generation, sweeps and reports.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mfl/hartree.hpp"
#include "mfl/types.hpp"

namespace mfl {

using Json = nlohmann::json;

/// Parsed run configuration. Matrix-valued entries keep their JSON spec and are
/// resolved (and validated) by instantiate().
struct ModelConfig {
  int d = 2;
  double hbar = 1.0;
  std::uint64_t seed = 0;
  Json h = {{"kind", "random"}};
  Json v = {{"kind", "random_pair_table"}, {"norm", 1.0}};
  Json rho0 = {{"kind", "random_pure"}};
  Json observable = {{"p", 1}, {"kind", "random"}};
  std::vector<int> particles;    // N list
  std::vector<double> times;     // absolute, or in units of τ
  bool times_in_tau = false;
  double rk4_step = 0.0;         // 0: default
  int picard_intervals = 128;
  double quadrature_tol = 1e-6;
  std::optional<int> truncation; // empty: auto
  int samples = 100;             // simulate
  std::size_t element_cap = std::size_t{1} << 26;
};

/// Throws InvalidConfig on missing/ill-typed fields.
ModelConfig parse_config(const Json& j);
ModelConfig load_config(const std::string& path);
Json to_json(const ModelConfig& config);

struct Instance {
  InteractionModel model;
  DensityMatrix rho0;
  PObservable observable;
  bool rho_pure;
};

/// Draws every random component from its own fork of Rng(seed): h (1), V (2),
/// ρ0 (3), observable (4).
Instance instantiate(const ModelConfig& config);

/// Absolute times of the config (τ units resolved; τ = ∞ when V = 0).
std::vector<double> resolved_times(const ModelConfig& config, const InteractionModel& model);

struct SweepRecord {
  int N = 0;
  double t = 0.0;
  int p = 0;
  double qm = 0.0;
  double hartree = 0.0;
  double abs_error = 0.0;
  double bound_coarse = 0.0;
  double bound_fine = 0.0;
  std::optional<double> bound_small_time;
  double wall_time_ms = 0.0;
};

struct RunOptions {
  int workers = 1;
  bool timing = true;  // false writes 0 to wall_time_ms
};

/// Records sorted by (t, N). Throws BoundViolation if abs_error > bound_coarse,
/// InvalidConfig if ρ0 is not pure.
std::vector<SweepRecord> run_converge_sweep(const ModelConfig& config, const RunOptions& options = {});

/// Bounds of a record's (N, t, p); τ = ∞ (t/τ = 0) for a free model.
void fill_bounds(SweepRecord& record, double hbar, double v_inf, double a_norm);

struct BoundRow {
  int N = 0;
  double t = 0.0;
  int p = 0;
  double coarse = 0.0;
  double fine = 0.0;
  std::optional<double> small_time;
};

/// ‖a‖ = 1 rows over the config's (N, t) grid.
std::vector<BoundRow> run_bound_table(const ModelConfig& config);

struct SimulationRow {
  double t = 0.0;
  double trace = 0.0;
  double energy = 0.0;
  double min_eigenvalue = 0.0;
  double hermiticity_error = 0.0;
  double purity = 0.0;
  double observable = 0.0;
};

/// Hartree trajectory diagnostics on [0, max t] at config.samples + 1 points.
std::vector<SimulationRow> run_simulate(const ModelConfig& config);

struct IdentityResult {
  std::string name;
  bool passed = false;
  double residual = 0.0;
  double tolerance = 0.0;
  std::string detail;

  friend bool operator==(const IdentityResult&, const IdentityResult&) = default;
};

struct VerifyReport {
  std::uint64_t seed = 0;
  std::vector<IdentityResult> results;

  bool all_passed() const;
  friend bool operator==(const VerifyReport&, const VerifyReport&) = default;
};

VerifyReport run_verify_identities(const ModelConfig& config, const RunOptions& options = {});

Json to_json(const VerifyReport& report);
VerifyReport report_from_json(const Json& j);

void write_csv(std::ostream& os, const std::vector<SweepRecord>& records);
void write_csv(std::ostream& os, const std::vector<BoundRow>& rows);
void write_csv(std::ostream& os, const std::vector<SimulationRow>& rows);
void write_csv(std::ostream& os, const VerifyReport& report);
Json to_json(const std::vector<SweepRecord>& records);
Json to_json(const std::vector<BoundRow>& rows);
Json to_json(const std::vector<SimulationRow>& rows);

/// Shortest decimal that reads back to the same double.
std::string format_double(double x);

/// ‖ρ² − ρ‖ ≤ 1e-10 and Tr ρ = 1 within 1e-10.
bool is_pure_state(const ComplexMatrix& rho);

}  // namespace mfl
