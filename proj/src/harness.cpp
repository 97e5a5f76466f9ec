#include "trustcascade/harness.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "parallel.hpp"
#include "trustcascade/oracle.hpp"

namespace trustcascade {

using nlohmann::json;
using nlohmann::ordered_json;

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Configuration

namespace {

void flatten(const json& node, const std::string& prefix, std::map<std::string, json>& out) {
  if (node.is_object()) {
    for (const auto& [key, value] : node.items()) {
      flatten(value, prefix.empty() ? key : prefix + "." + key, out);
    }
    return;
  }
  require(!out.contains(prefix), ErrorCode::Config, "configuration key '" + prefix + "' given twice");
  out[prefix] = node;
}

template <typename T>
T take(const std::map<std::string, json>& keys, const std::string& key, T fallback) {
  const auto it = keys.find(key);
  if (it == keys.end()) return fallback;
  try {
    return it->second.get<T>();
  } catch (const json::exception& e) {
    fail(ErrorCode::Config, "configuration key '" + key + "' has the wrong type: " + e.what());
  }
}

Shape parse_shape(const std::string& s) {
  if (s == "chain") return Shape::Chain;
  if (s == "star") return Shape::Star;
  if (s == "bridged") return Shape::BridgedChains;
  fail(ErrorCode::Config, "unknown topology shape '" + s + "' (chain|star|bridged)");
}

SumMode parse_mode(const std::string& s) {
  if (s == "exact") return SumMode::ExactSum;
  if (s == "asymptotic") return SumMode::Asymptotic;
  fail(ErrorCode::Config, "unknown analytic mode '" + s + "' (exact|asymptotic)");
}

std::uint64_t eta_bits(double eta) { return std::bit_cast<std::uint64_t>(eta); }

}  // namespace

RunConfig parse_run_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text.empty() ? std::string_view("{}") : json_text);
  } catch (const json::exception& e) {
    fail(ErrorCode::Config, std::string("configuration is not valid JSON: ") + e.what());
  }
  require(doc.is_object(), ErrorCode::Config, "configuration must be a JSON object");
  std::map<std::string, json> keys;
  flatten(doc, "", keys);

  static const std::vector<std::string> known = {
      "topology.shape", "topology.n", "topology.l", "topology.h", "model.eta", "mc.replications",
      "learning.delta", "learning.floor", "learning.max_iterations", "learning.stability_eps",
      "learning.stability_window", "learning.check_stride", "learning.trajectory_stride", "seed",
      "output_dir", "eta_grid", "size_grid", "limit_weights", "trained", "analytic_mode", "threads"};
  for (const auto& [key, _] : keys) {
    require(std::find(known.begin(), known.end(), key) != known.end(), ErrorCode::Config,
            "unknown configuration key '" + key + "'");
  }

  RunConfig cfg;
  const auto shape = take<std::string>(keys, "topology.shape", "chain");
  cfg.topology.shape = parse_shape(shape);
  cfg.topology.n = take<int>(keys, "topology.n", 10);
  cfg.topology.l = take<int>(keys, "topology.l", cfg.topology.shape == Shape::BridgedChains ? 4 : 0);
  cfg.topology.h = take<int>(keys, "topology.h", cfg.topology.shape == Shape::BridgedChains ? 8 : 0);
  cfg.model.eta = take<double>(keys, "model.eta", 0.5);
  cfg.replications = take<std::size_t>(keys, "mc.replications", 10'000);
  cfg.learning.delta = take<double>(keys, "learning.delta", cfg.learning.delta);
  cfg.learning.floor = take<double>(keys, "learning.floor", cfg.learning.floor);
  cfg.learning_iterations_set = keys.contains("learning.max_iterations");
  cfg.learning.max_iterations = take<std::uint64_t>(keys, "learning.max_iterations", cfg.learning.max_iterations);
  cfg.learning.stability_eps = take<double>(keys, "learning.stability_eps", cfg.learning.stability_eps);
  cfg.learning.stability_window =
      take<std::size_t>(keys, "learning.stability_window", cfg.learning.stability_window);
  cfg.learning.check_stride = take<std::uint64_t>(keys, "learning.check_stride", cfg.learning.check_stride);
  cfg.learning.trajectory_stride =
      take<std::uint64_t>(keys, "learning.trajectory_stride", cfg.learning.trajectory_stride);
  cfg.seed = Seed{take<std::uint64_t>(keys, "seed", kDefaultSeed)};
  cfg.output_dir = take<std::string>(keys, "output_dir", "out");
  cfg.eta_grid = take<std::vector<double>>(keys, "eta_grid", {});
  cfg.size_grid = take<std::vector<int>>(keys, "size_grid", {});
  cfg.limit_weights = take<bool>(keys, "limit_weights", false);
  cfg.trained = take<bool>(keys, "trained", false);
  if (keys.contains("analytic_mode")) cfg.analytic_mode = parse_mode(take<std::string>(keys, "analytic_mode", ""));
  cfg.threads = take<unsigned>(keys, "threads", 0);

  try {
    cfg.topology.validate();
  } catch (const Error& e) {
    fail(ErrorCode::Config, e.what());
  }
  cfg.model.validate();
  cfg.learning.validate();
  require(cfg.replications >= 1, ErrorCode::Config, "mc.replications must be >= 1");
  for (double eta : cfg.eta_grid) {
    require(eta >= 0.0 && eta <= 1.0, ErrorCode::Config, "eta_grid values must lie in [0, 1]");
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// Single-topology reports

namespace {

ordered_json series_json(const IndexedSeries& s) {
  ordered_json j;
  j["first"] = s.first;
  j["values"] = s.values;
  return j;
}

ordered_json estimate_json(const Estimate& e) { return {{"mean", e.mean}, {"stderr", e.std_error}}; }

Regime regime_of(const RunConfig& cfg) { return cfg.trained ? Regime::Trained : Regime::Untrained; }

TrustGraph trained_graph(const TopologySpec& spec, double eta, const LearningConfig& learning,
                         bool limit_weights, Seed seed) {
  auto g = build_topology(spec);
  if (limit_weights) {
    set_limit_weights(g, spec);
  } else {
    train(g, ModelConfig{eta}, learning,
          derive(seed, {stream_tag::kTraining, static_cast<std::uint64_t>(spec.shape),
                        static_cast<std::uint64_t>(spec.n), static_cast<std::uint64_t>(spec.l),
                        static_cast<std::uint64_t>(spec.h), eta_bits(eta)}));
  }
  return g;
}

}  // namespace

std::string analytic_report(const RunConfig& cfg) {
  const auto regime = regime_of(cfg);
  const auto mode = cfg.analytic_mode.value_or(SumMode::ExactSum);
  const auto& t = cfg.topology;
  const double eta = cfg.model.eta;
  ordered_json j;
  j["topology"] = json::parse(topology_to_text(t));
  j["eta"] = eta;
  j["regime"] = to_string(regime);
  switch (t.shape) {
    case Shape::Chain: {
      const auto m = chain_metrics(t.n, eta, regime, mode);
      j["mode"] = to_string(mode);
      j["n_true"] = series_json(m.n_true);
      j["n_false"] = series_json(m.n_false);
      j["tta"] = m.tta;
      j["fta"] = m.fta;
      j["ifa"] = m.ifa;
      if (t.n >= 3) {
        const auto p = stratification_profile(t.n, eta, regime);
        j["d_true"] = series_json(p.d_true);
        j["d_false"] = series_json(p.d_false);
        j["switching_point"] = p.switching_point;
      }
      break;
    }
    case Shape::Star: {
      const auto m = star_metrics(t.n, eta, regime);
      j["n_true"] = series_json(m.n_true);
      j["n_false"] = series_json(m.n_false);
      j["tta"] = m.tta;
      j["fta"] = m.fta;
      j["ifa"] = m.ifa;
      break;
    }
    case Shape::BridgedChains: {
      const auto m = crossover_metrics(t.n, t.l, t.h, eta, regime);
      j["n_true_a"] = series_json(m.n_true_a);
      j["n_false_a"] = series_json(m.n_false_a);
      j["n_true_b"] = series_json(m.n_true_b);
      j["n_false_b"] = series_json(m.n_false_b);
      j["d_true_a"] = series_json(m.d_true_a);
      j["d_false_a"] = series_json(m.d_false_a);
      j["theta_true"] = m.theta_true;
      j["theta_false"] = m.theta_false;
      j["beta_true"] = m.beta_true;
      j["beta_false"] = m.beta_false;
      break;
    }
  }
  return j.dump(2);
}

std::string mc_report(const RunConfig& cfg) {
  const auto& t = cfg.topology;
  const auto graph = cfg.trained ? trained_graph(t, cfg.model.eta, cfg.learning, cfg.limit_weights, cfg.seed)
                                 : build_topology(t);
  const auto stats = estimate_stats(graph, cfg.model, cfg.replications, cfg.seed, cfg.threads);
  ordered_json j;
  j["topology"] = json::parse(topology_to_text(t));
  j["eta"] = cfg.model.eta;
  j["regime"] = to_string(regime_of(cfg));
  j["replications"] = stats.replications;
  j["tta"] = estimate_json(stats.tta);
  j["fta"] = estimate_json(stats.fta);
  j["ifa"] = estimate_json(stats.ifa);
  auto& per_source = j["per_source"] = ordered_json::array();
  for (std::size_t i = 0; i < graph.node_count(); ++i) {
    ordered_json row;
    row["node"] = i + 1;
    row["true"] = estimate_json(stats.true_spread[i]);
    if (!graph.is_smart(i)) row["false"] = estimate_json(stats.false_spread[i]);
    per_source.push_back(row);
  }
  return j.dump(2);
}

TrainingRun train_topology(const RunConfig& cfg) {
  TrainingRun run{build_topology(cfg.topology), {}};
  run.report = train(run.graph, cfg.model, cfg.learning, cfg.seed);
  return run;
}

// ---------------------------------------------------------------------------
// Figures

FigureId parse_figure_id(std::string_view text) {
  std::string s(text);
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (s.starts_with("fig")) s = s.substr(3);
  if (s.size() == 1 && s[0] >= '4' && s[0] <= '9') return static_cast<FigureId>(s[0] - '0');
  fail(ErrorCode::Config, "unknown figure id '" + std::string(text) + "' (fig4 .. fig9)");
}

const char* to_string(FigureId id) noexcept {
  switch (id) {
    case FigureId::Fig4: return "fig4";
    case FigureId::Fig5: return "fig5";
    case FigureId::Fig6: return "fig6";
    case FigureId::Fig7: return "fig7";
    case FigureId::Fig8: return "fig8";
    case FigureId::Fig9: return "fig9";
  }
  return "fig?";
}

ExperimentConfig ExperimentConfig::defaults(FigureId figure) {
  ExperimentConfig cfg;
  cfg.figure = figure;
  switch (figure) {
    case FigureId::Fig4:
      cfg.size_grid = {2, 3, 4, 5, 6, 7, 8, 9, 10};
      cfg.learning.max_iterations = 4'000'000;
      break;
    case FigureId::Fig5:
      cfg.size_grid = {10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
      cfg.learning.max_iterations = 2'000;
      break;
    case FigureId::Fig6:
    case FigureId::Fig7:
      cfg.size_grid = {10};
      cfg.learning.max_iterations = 4'000'000;
      break;
    case FigureId::Fig8:
    case FigureId::Fig9:
      cfg.size_grid = {10};
      cfg.learning.max_iterations = 8'000'000;
      break;
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::from_run_config(FigureId figure, const RunConfig& run) {
  auto cfg = defaults(figure);
  if (!run.eta_grid.empty()) cfg.eta_grid = run.eta_grid;
  if (!run.size_grid.empty()) cfg.size_grid = run.size_grid;
  cfg.replications = run.replications;
  const auto iterations = cfg.learning.max_iterations;
  cfg.learning = run.learning;
  if (!run.learning_iterations_set) cfg.learning.max_iterations = iterations;
  cfg.seed = run.seed;
  cfg.output_dir = run.output_dir;
  cfg.limit_weights = run.limit_weights;
  if (run.analytic_mode) cfg.ifa_mode = *run.analytic_mode;
  if (run.topology.shape == Shape::BridgedChains) {
    cfg.bridge_l = run.topology.l;
    cfg.bridge_h = run.topology.h;
  }
  cfg.threads = run.threads;
  return cfg;
}

void ExperimentConfig::validate() const {
  require(!eta_grid.empty(), ErrorCode::Config, "eta grid must not be empty");
  require(!size_grid.empty(), ErrorCode::Config, "size grid must not be empty");
  require(replications >= 1, ErrorCode::Config, "replications must be >= 1");
  for (double eta : eta_grid) {
    require(eta >= 0.0 && eta <= 1.0, ErrorCode::Config, "eta values must lie in [0, 1]");
  }
  const bool stratification = figure != FigureId::Fig4 && figure != FigureId::Fig5;
  for (int n : size_grid) {
    require(n >= (stratification ? 3 : 2), ErrorCode::Config,
            "network size " + std::to_string(n) + " too small for " + to_string(figure));
  }
  if (figure == FigureId::Fig8 || figure == FigureId::Fig9) {
    for (int n : size_grid) {
      require(bridge_l >= 2 && bridge_l <= n && bridge_h >= 2 && bridge_h <= n, ErrorCode::Config,
              "bridge indices must satisfy 2 <= l,h <= n");
    }
  }
  learning.validate();
}

namespace {

class CsvFile {
 public:
  CsvFile(const std::filesystem::path& path, const std::string& header) : path_(path) {
    out_ << header << '\n';
  }

  void row(std::initializer_list<std::string> cells) {
    bool first = true;
    for (const auto& c : cells) {
      if (!first) out_ << ',';
      out_ << c;
      first = false;
    }
    out_ << '\n';
  }

  void write() const {
    std::ofstream file(path_, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(file), ErrorCode::Io, "cannot write " + path_.string());
    file << out_.str();
    require(static_cast<bool>(file), ErrorCode::Io, "failed writing " + path_.string());
  }

 private:
  std::filesystem::path path_;
  std::ostringstream out_;
};

void prepare_output_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  require(!ec && std::filesystem::is_directory(dir), ErrorCode::Io,
          "cannot create output directory " + dir.string() + (ec ? ": " + ec.message() : ""));
}

std::filesystem::path panel_path(const ExperimentConfig& cfg, char panel) {
  return cfg.output_dir / (std::string(to_string(cfg.figure)) + "_" + panel + ".csv");
}

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

// Relative improvement that reports NaN instead of failing on a non-positive baseline.
double improvement_or_nan(double after, double before) {
  if (!(before > 0.0) || std::isnan(after)) return nan();
  return relative_improvement(after, before);
}

double improvement_stderr(const Estimate& after, const Estimate& before) {
  if (!(before.mean > 0.0)) return nan();
  const double d_after = 1.0 / before.mean;
  const double d_before = -after.mean / (before.mean * before.mean);
  return std::hypot(d_after * after.std_error, d_before * before.std_error);
}

struct IfaCell {
  int n = 0;
  double eta = 0.0;
  std::size_t eta_index = 0;
  SpreadStats before;
  SpreadStats after;
  double analytic_before = 0.0;
  double analytic_after = 0.0;
  double exact_before = 0.0;
  double exact_after = 0.0;
};

double chain_ifa(int n, double eta, Regime regime, SumMode mode) {
  if (mode == SumMode::Asymptotic && regime == Regime::Trained && eta >= 1.0) return nan();
  return chain_metrics(n, eta, regime, mode).ifa;
}

std::vector<std::filesystem::path> run_ifa_figure(const ExperimentConfig& cfg) {
  const bool chain = cfg.figure == FigureId::Fig4;
  std::vector<IfaCell> cells;
  for (std::size_t e = 0; e < cfg.eta_grid.size(); ++e) {
    for (int n : cfg.size_grid) cells.push_back({n, cfg.eta_grid[e], e, {}, {}, 0, 0, 0, 0});
  }
  detail::parallel_for(cells.size(), cfg.threads, [&](std::size_t c) {
    auto& cell = cells[c];
    const auto spec = chain ? TopologySpec::chain(cell.n) : TopologySpec::star(cell.n);
    const ModelConfig model{cell.eta};
    const auto coords = [&](std::uint64_t panel) {
      return derive(cfg.seed, {stream_tag::kFigureCell, static_cast<std::uint64_t>(cfg.figure), panel,
                               static_cast<std::uint64_t>(cell.n), eta_bits(cell.eta)});
    };
    cell.before = estimate_stats(build_topology(spec), model, cfg.replications, coords(0), 1);
    const auto trained = trained_graph(spec, cell.eta, cfg.learning, cfg.limit_weights, cfg.seed);
    cell.after = estimate_stats(trained, model, cfg.replications, coords(1), 1);
    if (chain) {
      cell.analytic_before = chain_ifa(cell.n, cell.eta, Regime::Untrained, cfg.ifa_mode);
      cell.analytic_after = chain_ifa(cell.n, cell.eta, Regime::Trained, cfg.ifa_mode);
      cell.exact_before = chain_ifa(cell.n, cell.eta, Regime::Untrained, SumMode::ExactSum);
      cell.exact_after = chain_ifa(cell.n, cell.eta, Regime::Trained, SumMode::ExactSum);
    } else {
      cell.analytic_before = cell.exact_before = star_metrics(cell.n, cell.eta, Regime::Untrained).ifa;
      cell.analytic_after = cell.exact_after = star_metrics(cell.n, cell.eta, Regime::Trained).ifa;
    }
  });

  const std::string header = "N,eta,F_analytic,F_mc,F_mc_stderr";
  CsvFile a(panel_path(cfg, 'a'), header);
  CsvFile b(panel_path(cfg, 'b'), header);
  CsvFile c(panel_path(cfg, 'c'), header + ",delta_F");
  for (const auto& cell : cells) {
    const auto n = std::to_string(cell.n);
    const auto eta = format_number(cell.eta);
    a.row({n, eta, format_number(cell.analytic_before), format_number(cell.before.ifa.mean),
           format_number(cell.before.ifa.std_error)});
    b.row({n, eta, format_number(cell.analytic_after), format_number(cell.after.ifa.mean),
           format_number(cell.after.ifa.std_error)});
    c.row({n, eta, format_number(improvement_or_nan(cell.analytic_after, cell.analytic_before)),
           format_number(improvement_or_nan(cell.after.ifa.mean, cell.before.ifa.mean)),
           format_number(improvement_stderr(cell.after.ifa, cell.before.ifa)),
           format_number(improvement_or_nan(cell.exact_after, cell.exact_before))});
  }
  a.write();
  b.write();
  c.write();
  return {panel_path(cfg, 'a'), panel_path(cfg, 'b'), panel_path(cfg, 'c')};
}

struct StratCell {
  double eta = 0.0;
  StratificationEstimate before;
  StratificationEstimate after;
  IndexedSeries analytic_before;
  IndexedSeries analytic_after;
};

IndexedSeries analytic_differences(const TopologySpec& spec, double eta, Regime regime, MessageKind kind) {
  if (spec.shape == Shape::Chain) {
    auto p = stratification_profile(spec.n, eta, regime);
    return kind == MessageKind::True ? p.d_true : p.d_false;
  }
  auto m = crossover_metrics(spec.n, spec.l, spec.h, eta, regime);
  return kind == MessageKind::True ? m.d_true_a : m.d_false_a;
}

std::vector<std::filesystem::path> run_stratification_figure(const ExperimentConfig& cfg) {
  const bool bridged = cfg.figure == FigureId::Fig8 || cfg.figure == FigureId::Fig9;
  const auto kind = (cfg.figure == FigureId::Fig6 || cfg.figure == FigureId::Fig8) ? MessageKind::True
                                                                                   : MessageKind::False;
  const int n = cfg.size_grid.front();
  const auto spec = bridged ? TopologySpec::bridged(n, cfg.bridge_l, cfg.bridge_h) : TopologySpec::chain(n);

  std::vector<StratCell> cells;
  for (double eta : cfg.eta_grid) cells.push_back({eta, {}, {}, {}, {}});
  detail::parallel_for(cells.size(), cfg.threads, [&](std::size_t c) {
    auto& cell = cells[c];
    const ModelConfig model{cell.eta};
    const auto coords = [&](std::uint64_t panel) {
      return derive(cfg.seed, {stream_tag::kFigureCell, static_cast<std::uint64_t>(cfg.figure), panel,
                               static_cast<std::uint64_t>(n), eta_bits(cell.eta)});
    };
    cell.before = stratification_mc(build_topology(spec), model, kind, cfg.replications, coords(0), 1);
    const auto trained = trained_graph(spec, cell.eta, cfg.learning, cfg.limit_weights, cfg.seed);
    cell.after = stratification_mc(trained, model, kind, cfg.replications, coords(1), 1);
    cell.analytic_before = analytic_differences(spec, cell.eta, Regime::Untrained, kind);
    cell.analytic_after = analytic_differences(spec, cell.eta, Regime::Trained, kind);
  });

  const std::string header = "i,eta,D_analytic,D_mc,D_mc_stderr,message_kind,regime";
  CsvFile a(panel_path(cfg, 'a'), header);
  CsvFile b(panel_path(cfg, 'b'), header);
  CsvFile c(panel_path(cfg, 'c'), header + ",D_after_minus_before");
  const std::string kind_name = to_string(kind);
  for (const auto& cell : cells) {
    const auto eta = format_number(cell.eta);
    for (int i = 2; i < n; ++i) {
      const auto idx = std::to_string(i);
      a.row({idx, eta, format_number(cell.analytic_before.at(i)), format_number(cell.before.difference.at(i)),
             format_number(cell.before.difference_stderr.at(i)), kind_name, "untrained"});
      b.row({idx, eta, format_number(cell.analytic_after.at(i)), format_number(cell.after.difference.at(i)),
             format_number(cell.after.difference_stderr.at(i)), kind_name, "trained"});
      const double analytic_diff = cell.analytic_after.at(i) - cell.analytic_before.at(i);
      c.row({idx, eta, format_number(analytic_diff),
             format_number(cell.after.difference.at(i) - cell.before.difference.at(i)),
             format_number(std::hypot(cell.after.difference_stderr.at(i), cell.before.difference_stderr.at(i))),
             kind_name, "difference", format_number(analytic_diff)});
    }
  }
  a.write();
  b.write();
  c.write();
  return {panel_path(cfg, 'a'), panel_path(cfg, 'b'), panel_path(cfg, 'c')};
}

}  // namespace

std::vector<std::filesystem::path> run_figure(const ExperimentConfig& cfg) {
  cfg.validate();
  prepare_output_dir(cfg.output_dir);
  if (cfg.figure == FigureId::Fig4 || cfg.figure == FigureId::Fig5) return run_ifa_figure(cfg);
  return run_stratification_figure(cfg);
}

// ---------------------------------------------------------------------------
// Oracle check

OracleCheckConfig oracle_check_config_from(const RunConfig& run) {
  OracleCheckConfig cfg;
  cfg.shape = run.topology.shape;
  cfg.sizes = run.size_grid.empty() ? std::vector<int>{run.topology.n} : run.size_grid;
  cfg.l = run.topology.l;
  cfg.h = run.topology.h;
  cfg.eta_grid = run.eta_grid.empty() ? std::vector<double>{run.model.eta} : run.eta_grid;
  cfg.mode = run.analytic_mode.value_or(SumMode::ExactSum);
  cfg.seed = run.seed;
  return cfg;
}

namespace {

struct SourceCounts {
  IndexedSeries n_true;   // by flat node id
  IndexedSeries n_false;  // by flat node id; smart entries unused
  std::optional<double> tta, fta, ifa;
};

SourceCounts analytic_counts(const OracleCheckConfig& cfg, int n, double eta, Regime regime) {
  SourceCounts out;
  switch (cfg.shape) {
    case Shape::Chain: {
      const auto exact = chain_metrics(n, eta, regime, SumMode::ExactSum);
      out.n_true = exact.n_true;
      out.n_false = exact.n_false;
      if (cfg.mode == SumMode::Asymptotic && regime == Regime::Trained && eta >= 1.0) {
        out.tta = out.fta = out.ifa = nan();
      } else {
        const auto agg = chain_metrics(n, eta, regime, cfg.mode);
        out.tta = agg.tta;
        out.fta = agg.fta;
        out.ifa = agg.ifa;
      }
      break;
    }
    case Shape::Star: {
      const auto m = star_metrics(n, eta, regime);
      out.n_true = m.n_true;
      out.n_false = m.n_false;
      out.tta = m.tta;
      out.fta = m.fta;
      out.ifa = m.ifa;
      break;
    }
    case Shape::BridgedChains: {
      const auto m = crossover_metrics(n, cfg.l, cfg.h, eta, regime);
      out.n_true = IndexedSeries::range(1, 2 * n);
      out.n_false = IndexedSeries::range(1, 2 * n);
      for (int i = 1; i <= n; ++i) {
        out.n_true.at(i) = m.n_true_a.at(i);
        out.n_true.at(n + i) = m.n_true_b.at(i);
        if (i >= 2) {
          out.n_false.at(i) = m.n_false_a.at(i);
          out.n_false.at(n + i) = m.n_false_b.at(i);
        }
      }
      break;
    }
  }
  return out;
}

std::string node_label(const OracleCheckConfig& cfg, int n, int id) {
  if (cfg.shape != Shape::BridgedChains) return "v" + std::to_string(id);
  return id <= n ? "v" + std::to_string(id) : "u" + std::to_string(id - n);
}

}  // namespace

OracleCheckReport run_oracle_check(const OracleCheckConfig& cfg) {
  require(!cfg.sizes.empty() && !cfg.eta_grid.empty(), ErrorCode::Config, "oracle check needs sizes and etas");
  OracleCheckReport report;
  for (int n : cfg.sizes) {
    const TopologySpec spec{cfg.shape, n, cfg.shape == Shape::BridgedChains ? cfg.l : 0,
                            cfg.shape == Shape::BridgedChains ? cfg.h : 0};
    try {
      spec.validate();
    } catch (const Error& e) {
      fail(ErrorCode::Config, e.what());
    }
    for (double eta : cfg.eta_grid) {
      for (const auto regime : {Regime::Untrained, Regime::Trained}) {
        auto graph = build_topology(spec);
        if (regime == Regime::Trained) set_limit_weights(graph, spec);
        const ModelConfig model{eta};
        const auto analytic = analytic_counts(cfg, n, eta, regime);
        std::optional<SpreadStats> mc;
        if (cfg.mc_replications > 0) {
          mc = estimate_stats(graph, model, cfg.mc_replications,
                              derive(cfg.seed, {static_cast<std::uint64_t>(n), eta_bits(eta),
                                                static_cast<std::uint64_t>(regime)}));
        }
        auto add = [&](std::string quantity, double a, double o, std::optional<Estimate> m, bool checked) {
          OracleCheckRow row{to_string(cfg.shape), n, eta, regime, std::move(quantity), a, o, std::nullopt,
                             std::nullopt, checked, false};
          if (m) {
            row.mc = m->mean;
            row.mc_stderr = m->std_error;
          }
          const double gap = std::abs(a - o);
          if (checked) {
            row.violated = !(gap < cfg.tolerance);
            report.max_checked_gap = std::max(report.max_checked_gap, std::isnan(gap) ? INFINITY : gap);
            if (row.violated) ++report.violations;
          }
          report.rows.push_back(std::move(row));
        };

        double sum_true = 0.0, sum_false = 0.0;
        std::size_t normals = 0;
        for (int id = 1; id <= spec.node_count(); ++id) {
          const NodeId node{id};
          const auto t = tree_expected_spread(graph, node, MessageKind::True, model).expected_posters;
          sum_true += t;
          add("n_true(" + node_label(cfg, n, id) + ")", analytic.n_true.at(id), t,
              mc ? std::optional<Estimate>(mc->true_spread[node.slot()]) : std::nullopt, true);
          if (graph.kind(node) == NodeKind::Normal) {
            const auto f = tree_expected_spread(graph, node, MessageKind::False, model).expected_posters;
            sum_false += f;
            ++normals;
            add("n_false(" + node_label(cfg, n, id) + ")", analytic.n_false.at(id), f,
                mc ? std::optional<Estimate>(mc->false_spread[node.slot()]) : std::nullopt, true);
          }
        }
        if (analytic.tta) {
          const double nd = spec.node_count();
          const double tta = sum_true / (nd * nd);
          const double fta = sum_false / (nd * static_cast<double>(normals));
          const bool exact = cfg.shape == Shape::Star || cfg.mode == SumMode::ExactSum;
          add("tta", *analytic.tta, tta, mc ? std::optional<Estimate>(mc->tta) : std::nullopt, exact);
          add("fta", *analytic.fta, fta, mc ? std::optional<Estimate>(mc->fta) : std::nullopt, exact);
          add("ifa", *analytic.ifa, (tta - fta) / fta, mc ? std::optional<Estimate>(mc->ifa) : std::nullopt,
              exact);
        }
      }
    }
  }
  return report;
}

std::string OracleCheckReport::to_csv() const {
  std::ostringstream out;
  out << "shape,N,eta,regime,quantity,analytic,oracle,mc,mc_stderr,abs_gap,rel_gap,checked,status\n";
  for (const auto& r : rows) {
    const double gap = std::abs(r.analytic - r.oracle);
    const double rel = r.oracle != 0.0 ? gap / std::abs(r.oracle) : nan();
    out << r.shape << ',' << r.n << ',' << format_number(r.eta) << ',' << to_string(r.regime) << ','
        << r.quantity << ',' << format_number(r.analytic) << ',' << format_number(r.oracle) << ','
        << (r.mc ? format_number(*r.mc) : "") << ',' << (r.mc_stderr ? format_number(*r.mc_stderr) : "")
        << ',' << format_number(gap) << ',' << format_number(rel) << ',' << (r.checked ? 1 : 0) << ','
        << (!r.checked ? "reported" : r.violated ? "VIOLATED" : "ok") << '\n';
  }
  return out.str();
}

}  // namespace trustcascade
