#include "trustcascade.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include <json.hpp>

#include "trustcascade/analytic.hpp"
#include "trustcascade/cascade.hpp"
#include "trustcascade/graph.hpp"
#include "trustcascade/harness.hpp"
#include "trustcascade/learning.hpp"
#include "trustcascade/oracle.hpp"

struct tc_graph {
  trustcascade::TrustGraph graph;
};

namespace {

namespace tc = trustcascade;

thread_local std::string last_error;

tc_status map_code(tc::ErrorCode code) {
  switch (code) {
    case tc::ErrorCode::InvalidTopology: return TC_ERR_INVALID_TOPOLOGY;
    case tc::ErrorCode::Contract: return TC_ERR_CONTRACT;
    case tc::ErrorCode::Unsupported: return TC_ERR_UNSUPPORTED;
    case tc::ErrorCode::Resource: return TC_ERR_RESOURCE;
    case tc::ErrorCode::Singularity: return TC_ERR_SINGULARITY;
    case tc::ErrorCode::Undefined: return TC_ERR_UNDEFINED;
    case tc::ErrorCode::Config: return TC_ERR_CONFIG;
    case tc::ErrorCode::Io: return TC_ERR_IO;
  }
  return TC_ERR_INTERNAL;
}

template <typename Body>
tc_status guarded(Body&& body) {
  try {
    last_error.clear();
    body();
    return TC_OK;
  } catch (const tc::Error& e) {
    last_error = e.what();
    return map_code(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return TC_ERR_RESOURCE;
  } catch (const std::exception& e) {
    last_error = e.what();
    return TC_ERR_INTERNAL;
  }
}

tc_status guarded_args(std::initializer_list<std::pair<const void*, const char*>> args, auto&& body) {
  for (const auto& [p, name] : args) {
    if (p == nullptr) {
      last_error = std::string(name) + " must not be null";
      return TC_ERR_NULL_ARGUMENT;
    }
  }
  return guarded(body);
}

char* duplicate(const std::string& s) {
  auto* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

tc::MessageKind kind_of(tc_message_kind kind) {
  switch (kind) {
    case TC_TRUE_MESSAGE: return tc::MessageKind::True;
    case TC_FALSE_MESSAGE: return tc::MessageKind::False;
  }
  tc::fail(tc::ErrorCode::Contract, "unknown message kind");
}

tc::Regime regime_of(tc_regime regime) {
  switch (regime) {
    case TC_UNTRAINED: return tc::Regime::Untrained;
    case TC_TRAINED: return tc::Regime::Trained;
  }
  tc::fail(tc::ErrorCode::Contract, "unknown regime");
}

tc::SumMode mode_of(tc_sum_mode mode) {
  switch (mode) {
    case TC_EXACT_SUM: return tc::SumMode::ExactSum;
    case TC_ASYMPTOTIC: return tc::SumMode::Asymptotic;
  }
  tc::fail(tc::ErrorCode::Contract, "unknown analytic mode");
}

tc::NodeId node_in(const tc::TrustGraph& g, int id) {
  tc::require(g.contains(tc::NodeId{id}), tc::ErrorCode::Contract, "node " + std::to_string(id) + " not in graph");
  return tc::NodeId{id};
}

tc::LearningConfig learning_of(const tc_learning_config& c) {
  tc::LearningConfig cfg;
  cfg.delta = c.delta;
  cfg.floor = c.floor;
  cfg.max_iterations = c.max_iterations;
  cfg.stability_eps = c.stability_eps;
  cfg.stability_window = c.stability_window;
  cfg.check_stride = c.check_stride;
  cfg.trajectory_stride = c.trajectory_stride;
  return cfg;
}

}  // namespace

extern "C" {

const char* tc_version(void) { return "0.1.0"; }

const char* tc_status_name(tc_status status) {
  switch (status) {
    case TC_OK: return "ok";
    case TC_ERR_INVALID_TOPOLOGY: return "invalid-topology";
    case TC_ERR_CONTRACT: return "contract";
    case TC_ERR_UNSUPPORTED: return "unsupported";
    case TC_ERR_RESOURCE: return "resource";
    case TC_ERR_SINGULARITY: return "singularity";
    case TC_ERR_UNDEFINED: return "undefined";
    case TC_ERR_CONFIG: return "config";
    case TC_ERR_IO: return "io";
    case TC_ERR_NULL_ARGUMENT: return "null-argument";
    case TC_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* tc_last_error(void) { return last_error.c_str(); }

void tc_string_free(char* s) { std::free(s); }

tc_status tc_graph_build(const char* topology_json, tc_graph** out) {
  return guarded_args({{topology_json, "topology_json"}, {out, "out"}}, [&] {
    *out = new tc_graph{tc::build_topology(tc::topology_from_text(topology_json))};
  });
}

tc_status tc_graph_parse(const char* dump, tc_graph** out) {
  return guarded_args({{dump, "dump"}, {out, "out"}},
                      [&] { *out = new tc_graph{tc::parse_graph_dump(dump)}; });
}

void tc_graph_free(tc_graph* graph) { delete graph; }

tc_status tc_graph_node_count(const tc_graph* graph, size_t* out) {
  return guarded_args({{graph, "graph"}, {out, "out"}}, [&] { *out = graph->graph.node_count(); });
}

tc_status tc_graph_edge_count(const tc_graph* graph, size_t* out) {
  return guarded_args({{graph, "graph"}, {out, "out"}}, [&] { *out = graph->graph.edge_count(); });
}

tc_status tc_graph_get_weight(const tc_graph* graph, int src, int dst, double* out) {
  return guarded_args({{graph, "graph"}, {out, "out"}},
                      [&] { *out = graph->graph.weight(node_in(graph->graph, src), node_in(graph->graph, dst)); });
}

tc_status tc_graph_set_weight(tc_graph* graph, int src, int dst, double weight) {
  return guarded_args({{graph, "graph"}}, [&] {
    graph->graph.set_weight(node_in(graph->graph, src), node_in(graph->graph, dst), weight);
  });
}

tc_status tc_graph_set_limit_weights(tc_graph* graph) {
  return guarded_args({{graph, "graph"}}, [&] {
    const auto& spec = graph->graph.topology();
    tc::require(spec.has_value(), tc::ErrorCode::Contract, "graph carries no topology");
    tc::set_limit_weights(graph->graph, *spec);
  });
}

tc_status tc_graph_dump(const tc_graph* graph, char** out) {
  return guarded_args({{graph, "graph"}, {out, "out"}}, [&] { *out = duplicate(tc::dump_graph(graph->graph)); });
}

tc_status tc_run_cascade(const tc_graph* graph, int source, tc_message_kind kind, double eta, uint64_t seed,
                         size_t* posters, char** record) {
  return guarded_args({{graph, "graph"}}, [&] {
    tc::Rng rng(tc::Seed{seed});
    const auto outcome =
        tc::run_cascade(graph->graph, node_in(graph->graph, source), kind_of(kind), tc::ModelConfig{eta}, rng);
    if (posters != nullptr) *posters = outcome.posters.size();
    if (record != nullptr) *record = duplicate(outcome.dump());
  });
}

tc_status tc_estimate_stats(const tc_graph* graph, double eta, size_t replications, uint64_t seed,
                            unsigned threads, tc_stats* out) {
  return guarded_args({{graph, "graph"}, {out, "out"}}, [&] {
    const auto s = tc::estimate_stats(graph->graph, tc::ModelConfig{eta}, replications, tc::Seed{seed}, threads);
    *out = tc_stats{{s.tta.mean, s.tta.std_error},
                    {s.fta.mean, s.fta.std_error},
                    {s.ifa.mean, s.ifa.std_error},
                    s.replications};
  });
}

void tc_learning_defaults(tc_learning_config* cfg) {
  if (cfg == nullptr) return;
  const tc::LearningConfig d;
  *cfg = tc_learning_config{d.delta, d.floor, d.max_iterations, d.stability_eps,
                            d.stability_window, d.check_stride, d.trajectory_stride};
}

tc_status tc_train(tc_graph* graph, double eta, const tc_learning_config* cfg, uint64_t seed, char** report_json) {
  return guarded_args({{graph, "graph"}}, [&] {
    const auto learning = cfg != nullptr ? learning_of(*cfg) : tc::LearningConfig{};
    const auto report = tc::train(graph->graph, tc::ModelConfig{eta}, learning, tc::Seed{seed});
    if (report_json != nullptr) *report_json = duplicate(report.to_text());
  });
}

tc_status tc_tree_expected_spread(const tc_graph* graph, int source, tc_message_kind kind, double eta,
                                  double* out) {
  return guarded_args({{graph, "graph"}, {out, "out"}}, [&] {
    *out = tc::tree_expected_spread(graph->graph, node_in(graph->graph, source), kind_of(kind),
                                    tc::ModelConfig{eta})
               .expected_posters;
  });
}

tc_status tc_enumerate_expected_spread(const tc_graph* graph, int source, tc_message_kind kind, double eta,
                                       size_t budget, double* out) {
  return guarded_args({{graph, "graph"}, {out, "out"}}, [&] {
    *out = tc::enumerate_expected_spread(graph->graph, node_in(graph->graph, source), kind_of(kind),
                                         tc::ModelConfig{eta}, budget)
               .expected_posters;
  });
}

tc_status tc_chain_abilities(int n, double eta, tc_regime regime, tc_sum_mode mode, tc_abilities* out) {
  return guarded_args({{out, "out"}}, [&] {
    const auto m = tc::chain_metrics(n, eta, regime_of(regime), mode_of(mode));
    *out = tc_abilities{m.tta, m.fta, m.ifa};
  });
}

tc_status tc_star_abilities(int n, double eta, tc_regime regime, tc_abilities* out) {
  return guarded_args({{out, "out"}}, [&] {
    const auto m = tc::star_metrics(n, eta, regime_of(regime));
    *out = tc_abilities{m.tta, m.fta, m.ifa};
  });
}

tc_status tc_relative_improvement(double after, double before, double* out) {
  return guarded_args({{out, "out"}}, [&] { *out = tc::relative_improvement(after, before); });
}

tc_status tc_analytic_report(const char* config_json, char** out_json) {
  return guarded_args({{config_json, "config_json"}, {out_json, "out_json"}},
                      [&] { *out_json = duplicate(tc::analytic_report(tc::parse_run_config(config_json))); });
}

tc_status tc_mc_report(const char* config_json, char** out_json) {
  return guarded_args({{config_json, "config_json"}, {out_json, "out_json"}},
                      [&] { *out_json = duplicate(tc::mc_report(tc::parse_run_config(config_json))); });
}

tc_status tc_train_run(const char* config_json, char** report_json, char** graph_dump, char** trajectory_csv) {
  return guarded_args({{config_json, "config_json"}}, [&] {
    const auto run = tc::train_topology(tc::parse_run_config(config_json));
    if (report_json != nullptr) *report_json = duplicate(run.report.to_text());
    if (graph_dump != nullptr) *graph_dump = duplicate(tc::dump_graph(run.graph));
    if (trajectory_csv != nullptr) *trajectory_csv = duplicate(run.report.trajectory_csv());
  });
}

tc_status tc_run_figure(const char* figure_id, const char* config_json, char** paths_json) {
  return guarded_args({{figure_id, "figure_id"}}, [&] {
    const auto figure = tc::parse_figure_id(figure_id);
    const auto run = tc::parse_run_config(config_json != nullptr ? config_json : "{}");
    const auto paths = tc::run_figure(tc::ExperimentConfig::from_run_config(figure, run));
    if (paths_json != nullptr) {
      nlohmann::json list = nlohmann::json::array();
      for (const auto& p : paths) list.push_back(p.string());
      *paths_json = duplicate(list.dump());
    }
  });
}

tc_status tc_oracle_check(const char* config_json, size_t mc_replications, char** csv, size_t* violations) {
  return guarded_args({{config_json, "config_json"}, {violations, "violations"}}, [&] {
    auto cfg = tc::oracle_check_config_from(tc::parse_run_config(config_json));
    cfg.mc_replications = mc_replications;
    const auto report = tc::run_oracle_check(cfg);
    *violations = report.violations;
    if (csv != nullptr) *csv = duplicate(report.to_csv());
  });
}

}  // extern "C"
