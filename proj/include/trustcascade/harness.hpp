#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "trustcascade/analytic.hpp"
#include "trustcascade/cascade.hpp"
#include "trustcascade/graph.hpp"
#include "trustcascade/learning.hpp"
#include "trustcascade/random.hpp"

namespace trustcascade {

inline constexpr std::uint64_t kDefaultSeed = 20181104;

/// Settings shared by every harness command. Parsed from a JSON document
/// whose keys are either nested ({"topology": {"n": 10}}) or dotted
/// ({"topology.n": 10}): topology.shape/n/l/h, model.eta, mc.replications,
/// learning.delta/floor/max_iterations/stability_eps/stability_window, seed,
/// output_dir. Optional extras: eta_grid, size_grid, limit_weights,
/// analytic_mode ("exact" | "asymptotic"), trained, threads.
struct RunConfig {
  TopologySpec topology = TopologySpec::chain(10);
  ModelConfig model;
  std::size_t replications = 10'000;
  LearningConfig learning;
  bool learning_iterations_set = false;
  Seed seed{kDefaultSeed};
  std::filesystem::path output_dir = "out";
  std::vector<double> eta_grid;
  std::vector<int> size_grid;
  bool limit_weights = false;
  bool trained = false;
  std::optional<SumMode> analytic_mode;
  unsigned threads = 0;
};

RunConfig parse_run_config(std::string_view json_text);

/// Analytic metrics for the configured topology as JSON.
std::string analytic_report(const RunConfig& cfg);
/// Monte Carlo abilities (and per-source spreads) for the configured topology
/// as JSON; trained graphs use the learning loop unless limit_weights is set.
std::string mc_report(const RunConfig& cfg);

struct TrainingRun {
  TrustGraph graph;
  TrainingReport report;
};
TrainingRun train_topology(const RunConfig& cfg);

enum class FigureId { Fig4 = 4, Fig5, Fig6, Fig7, Fig8, Fig9 };

FigureId parse_figure_id(std::string_view text);
const char* to_string(FigureId id) noexcept;

struct ExperimentConfig {
  FigureId figure = FigureId::Fig4;
  std::vector<double> eta_grid{0.3, 0.5, 0.7, 0.9};
  std::vector<int> size_grid;
  std::size_t replications = 10'000;
  LearningConfig learning;
  Seed seed{kDefaultSeed};
  std::filesystem::path output_dir = "out";
  bool limit_weights = false;  // substitute the limit pattern for training
  SumMode ifa_mode = SumMode::Asymptotic;
  int bridge_l = 4;
  int bridge_h = 8;
  unsigned threads = 0;

  /// Protocol defaults for one figure (sizes, training budget).
  static ExperimentConfig defaults(FigureId figure);
  /// Defaults for `figure` overridden by whatever `run` sets explicitly.
  static ExperimentConfig from_run_config(FigureId figure, const RunConfig& run);
  void validate() const;
};

/// Writes fig<id>_a.csv (before training), fig<id>_b.csv (after training)
/// and fig<id>_c.csv (difference) into output_dir and returns their paths.
std::vector<std::filesystem::path> run_figure(const ExperimentConfig& cfg);

struct OracleCheckConfig {
  Shape shape = Shape::Chain;
  std::vector<int> sizes{10};
  int l = 4;
  int h = 8;
  std::vector<double> eta_grid{0.3, 0.5, 0.7, 0.9};
  SumMode mode = SumMode::ExactSum;
  std::size_t mc_replications = 0;  // 0 skips Monte Carlo
  Seed seed{kDefaultSeed};
  double tolerance = 1e-12;
};

struct OracleCheckRow {
  std::string shape;
  int n = 0;
  double eta = 0.0;
  Regime regime = Regime::Untrained;
  std::string quantity;
  double analytic = 0.0;
  double oracle = 0.0;
  std::optional<double> mc;
  std::optional<double> mc_stderr;
  bool checked = true;  // false for asymptotic aggregates: gap reported only
  bool violated = false;
};

struct OracleCheckReport {
  std::vector<OracleCheckRow> rows;
  std::size_t violations = 0;
  double max_checked_gap = 0.0;

  std::string to_csv() const;
};

OracleCheckReport run_oracle_check(const OracleCheckConfig& cfg);
OracleCheckConfig oracle_check_config_from(const RunConfig& run);

/// Number format shared by every CSV writer: 12 significant digits, "nan" for NaN.
std::string format_number(double v);

}  // namespace trustcascade
