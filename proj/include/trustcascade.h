#ifndef TRUSTCASCADE_H
#define TRUSTCASCADE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define TC_API __declspec(dllexport)
#else
#define TC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tc_status {
  TC_OK = 0,
  TC_ERR_INVALID_TOPOLOGY = 1,
  TC_ERR_CONTRACT = 2,
  TC_ERR_UNSUPPORTED = 3,
  TC_ERR_RESOURCE = 4,
  TC_ERR_SINGULARITY = 5,
  TC_ERR_UNDEFINED = 6,
  TC_ERR_CONFIG = 7,
  TC_ERR_IO = 8,
  TC_ERR_NULL_ARGUMENT = 9,
  TC_ERR_INTERNAL = 10
} tc_status;

typedef enum tc_message_kind { TC_TRUE_MESSAGE = 0, TC_FALSE_MESSAGE = 1 } tc_message_kind;
typedef enum tc_regime { TC_UNTRAINED = 0, TC_TRAINED = 1 } tc_regime;
typedef enum tc_sum_mode { TC_EXACT_SUM = 0, TC_ASYMPTOTIC = 1 } tc_sum_mode;

typedef struct tc_graph tc_graph;

typedef struct tc_estimate {
  double mean;
  double std_error;
} tc_estimate;

typedef struct tc_stats {
  tc_estimate tta;
  tc_estimate fta;
  tc_estimate ifa;
  size_t replications;
} tc_stats;

typedef struct tc_abilities {
  double tta;
  double fta;
  double ifa;
} tc_abilities;

typedef struct tc_learning_config {
  double delta;
  double floor;
  uint64_t max_iterations;
  double stability_eps;
  size_t stability_window;
  uint64_t check_stride;
  uint64_t trajectory_stride;
} tc_learning_config;

TC_API const char* tc_version(void);
TC_API const char* tc_status_name(tc_status status);
/* Message of the last failure on the calling thread; empty after success. */
TC_API const char* tc_last_error(void);
/* Releases strings returned through char** out-parameters. */
TC_API void tc_string_free(char* s);

/* Graphs. Node ids are 1-based. */
TC_API tc_status tc_graph_build(const char* topology_json, tc_graph** out);
TC_API tc_status tc_graph_parse(const char* dump, tc_graph** out);
TC_API void tc_graph_free(tc_graph* graph);
TC_API tc_status tc_graph_node_count(const tc_graph* graph, size_t* out);
TC_API tc_status tc_graph_edge_count(const tc_graph* graph, size_t* out);
TC_API tc_status tc_graph_get_weight(const tc_graph* graph, int src, int dst, double* out);
TC_API tc_status tc_graph_set_weight(tc_graph* graph, int src, int dst, double weight);
TC_API tc_status tc_graph_set_limit_weights(tc_graph* graph);
TC_API tc_status tc_graph_dump(const tc_graph* graph, char** out);

/* Simulation and learning. */
TC_API tc_status tc_run_cascade(const tc_graph* graph, int source, tc_message_kind kind, double eta,
                                uint64_t seed, size_t* posters, char** record);
TC_API tc_status tc_estimate_stats(const tc_graph* graph, double eta, size_t replications,
                                   uint64_t seed, unsigned threads, tc_stats* out);
TC_API void tc_learning_defaults(tc_learning_config* cfg);
TC_API tc_status tc_train(tc_graph* graph, double eta, const tc_learning_config* cfg, uint64_t seed,
                          char** report_json);

/* Exact expected spread: path products on trees, full enumeration otherwise. */
TC_API tc_status tc_tree_expected_spread(const tc_graph* graph, int source, tc_message_kind kind,
                                         double eta, double* out);
TC_API tc_status tc_enumerate_expected_spread(const tc_graph* graph, int source, tc_message_kind kind,
                                              double eta, size_t budget, double* out);

/* Closed forms. */
TC_API tc_status tc_chain_abilities(int n, double eta, tc_regime regime, tc_sum_mode mode,
                                    tc_abilities* out);
TC_API tc_status tc_star_abilities(int n, double eta, tc_regime regime, tc_abilities* out);
TC_API tc_status tc_relative_improvement(double after, double before, double* out);

/* Harness commands driven by a JSON run configuration. */
TC_API tc_status tc_analytic_report(const char* config_json, char** out_json);
TC_API tc_status tc_mc_report(const char* config_json, char** out_json);
TC_API tc_status tc_train_run(const char* config_json, char** report_json, char** graph_dump,
                              char** trajectory_csv);
TC_API tc_status tc_run_figure(const char* figure_id, const char* config_json, char** paths_json);
TC_API tc_status tc_oracle_check(const char* config_json, size_t mc_replications, char** csv,
                                 size_t* violations);

#ifdef __cplusplus
}
#endif

#endif
