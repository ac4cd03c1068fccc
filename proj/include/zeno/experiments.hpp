#pragma once

// Scenario definitions and drivers that bind a model, a control field family,
// an observation template, a cost functional and the optimizer. Every table
// row of the reproduction is one Scenario.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "zeno/control_field.hpp"
#include "zeno/dynamics.hpp"
#include "zeno/observation.hpp"
#include "zeno/optimizer.hpp"
#include "zeno/system.hpp"

namespace zeno {

inline constexpr double kDefaultSearchTimeStep = 0.02;  // fs, inside the GA loop only

enum class FieldFamily { none, shaped, rectangular };
enum class ObservationKind { none, instantaneous, sequence, continuous };

const char* field_family_name(FieldFamily f);
const char* observation_kind_name(ObservationKind k);

struct FieldTemplate {
  FieldFamily family = FieldFamily::shaped;
  bool optimize = true;
  double amplitude_max = 2.0;
  /// Initial GA population draws amplitudes from [0, amplitude_init_max];
  /// NaN means amplitude_max.
  double amplitude_init_max = std::numeric_limits<double>::quiet_NaN();
  /// Fixed values when not optimized; one per model transition frequency for
  /// shaped fields, a single amplitude for the rectangular pulse.
  std::vector<double> amplitudes;
  std::vector<double> phases;
};

struct ObservationTemplate {
  ObservationKind kind = ObservationKind::none;
  /// "mu", "H0" or "P<label>" (population projector of a level).
  std::string op;
  /// Instantaneous event time; NaN means T_f / 2.
  double time = std::numeric_limits<double>::quiet_NaN();
  /// Number of equally spaced events for sequences.
  std::size_t count = 0;
  /// Continuous observation: optimize (gamma, T1, T2) or use the fixed window.
  bool optimize_window = false;
  double gamma_max = 5.0;
  double gamma = 0.0;
  double t1 = 0.0;
  double t2 = std::numeric_limits<double>::quiet_NaN();  // NaN means T_f
};

struct Scenario {
  std::string name;
  std::string model;
  FieldTemplate field;
  ObservationTemplate observation;
  CostSpec cost;
  GAConfig ga;
  /// Reporting grid; every number in a RunResult is computed on it.
  PropagationConfig propagation;
  /// Step used while optimizing; 0 means propagation.dt.
  double search_dt = kDefaultSearchTimeStep;
  /// Trajectory sample interval in steps for traj.csv (0: none).
  std::size_t trajectory_every = 0;
  std::filesystem::path output_dir;

  /// Throws std::invalid_argument when the model is unknown, an operator
  /// cannot be resolved, or a parameter lies outside its bounds.
  void validate() const;
};

/// Declarative INI-style scenario text (sections [scenario], [field],
/// [observation], [cost], [ga], [propagation], [output]).
Scenario parse_scenario(std::istream& in);
Scenario load_scenario(const std::filesystem::path& path);
/// Canonical text form; parse_scenario(serialize_scenario(s)) reproduces s.
std::string serialize_scenario(const Scenario& s);
/// 64-bit FNV-1a of the canonical text, as 16 hex digits.
std::string config_hash(const Scenario& s);

struct NamedValue {
  std::string name;
  double value = 0.0;
};

struct RunResult {
  std::string scenario;
  std::string model;
  double yield = 0.0;  // fraction
  double fluence = 0.0;
  /// Tr[rho(T_m) A] just before a single instantaneous observation.
  std::optional<double> observed_value;
  /// Same field with every observation disabled.
  std::optional<double> counterfactual_yield;
  /// Same observations with the field switched off.
  std::optional<double> observation_only_yield;
  std::vector<double> final_populations;
  Genotype genotype;
  std::vector<NamedValue> parameters;
  std::vector<NamedValue> extras;
  OptimizationResult optimization;
  bool optimized = false;
  Trajectory trajectory;
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
  std::optional<double> extra(std::string_view name) const;
};

/// Decoded physical content of one genotype.
struct ScenarioInstance {
  Field field;
  ObservationPlan plan;
  std::vector<NamedValue> parameters;
};

/// Evaluates genotypes of one scenario. Chooses the cheapest exact route for
/// the scenario's structure:
///   - no continuous observation and at most one event: the state is pure up
///     to the event, so it is propagated forward to the event and the target
///     backward from T_f, and the two are combined through the measurement;
///   - fixed field, projector sequence: cached segment propagators;
///   - otherwise: batched density-matrix propagation.
class ScenarioEngine {
 public:
  ScenarioEngine(const Scenario& scenario, double dt);

  const SystemSpec& system() const { return system_; }
  const GeneSpace& gene_space() const { return space_; }
  ScenarioInstance decode(const Genotype& genes) const;
  std::vector<Evaluation> evaluate(std::span<const Genotype> batch) const;
  const char* route() const;

 private:
  enum class Route { split, sequence, density };

  std::vector<Evaluation> evaluate_split(std::span<const Genotype> batch) const;
  std::vector<Evaluation> evaluate_sequence(std::span<const Genotype> batch) const;
  std::vector<Evaluation> evaluate_density(std::span<const Genotype> batch) const;

  Scenario scenario_;
  SystemSpec system_;
  GeneSpace space_;
  PropagationConfig config_;
  Route route_ = Route::density;
  std::optional<SequenceEvaluator> sequence_;
  std::optional<DensityPropagator> density_;
};

/// Gene layout: field amplitudes, field phases, then observation genes.
GeneSpace scenario_gene_space(const Scenario& s, const SystemSpec& system);

/// Evaluates a fixed genotype on the reporting grid, including the
/// counterfactual columns and invariant checks.
RunResult evaluate_scenario(const Scenario& s, const Genotype& genes);

/// Optimizes (when the scenario has genes) and reports.
RunResult run_scenario(const Scenario& s);

/// Writes result.json, history.csv, manifest.json and, when sampled, traj.csv.
void write_run_outputs(const Scenario& s, const RunResult& r, const std::filesystem::path& dir);

/// RunResult as JSON; yields appear both as fractions and as percent rounded
/// to two decimals.
std::string result_json(const Scenario& s, const RunResult& r);
std::string manifest_json(const Scenario& s, const RunResult& r);

// ---------------------------------------------------------------------------
// Table drivers. Each builds the scenario of one table row; run_table* runs it.

struct TableOptions {
  std::optional<std::uint64_t> seed;
  std::filesystem::path output_dir;  // empty: no files written
  /// Scales the number of generations (at least one is kept).
  double budget = 1.0;
};

/// selector: none, mu, H0, P0..P4.
Scenario table1_scenario(std::string_view selector);
/// Objective yield in percent, 10..100.
Scenario table2_scenario(double target_percent, bool observe = true);
/// N in {0,1,3,5,7,9}.
Scenario table3_scenario(std::size_t count, bool with_field);
/// selector: none, P0, P1, P2. Instantaneous at T_f/2 or optimized window.
enum class Model3Mode { instantaneous, continuous };
Scenario table4_5_scenario(std::string_view selector, Model3Mode mode);
Scenario table6_scenario(double kappa);

RunResult run_table1(std::string_view selector, const TableOptions& opt = {});
/// Adds extra "F0": fluence of the field optimized for the same objective
/// without the observation (skipped when with_reference is false).
RunResult run_table2(double target_percent, const TableOptions& opt = {},
                     bool with_reference = true);
RunResult run_table3(std::size_t count, bool with_field, const TableOptions& opt = {});
RunResult run_table4_5(std::string_view selector, Model3Mode mode, const TableOptions& opt = {});
/// Adds extra "P1'": residual population of level 1' at T_f. `warm_start`
/// genotypes are injected into the initial populations.
RunResult run_table6(double kappa, const TableOptions& opt = {},
                     const std::vector<Genotype>& warm_start = {});

std::vector<std::string> table1_rows();
std::vector<double> table2_rows();
std::vector<std::size_t> table3_rows();
std::vector<std::string> table4_5_rows();
std::vector<double> table6_rows();

/// Table CSV layouts; yields in percent with two decimals.
std::vector<std::string> table_header(int table);
/// One row of tables 1, 2, 4, 5 or 6; `key` fills the first column.
std::vector<std::string> table_row(int table, const std::string& key, const RunResult& r);
/// Table 3 merges the no-field and with-field runs of the same N.
std::vector<std::string> table3_row(std::size_t count, const RunResult& no_field,
                                    const RunResult& with_field);
void write_table_csv(std::ostream& os, int table, const std::vector<std::vector<std::string>>& rows);
std::string percent(double fraction);

}  // namespace zeno
