#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "trustcascade.h"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitCheckFailed = 3;
constexpr int kExitResource = 4;
constexpr int kExitInternal = 1;

int exit_code_for(tc_status status) {
  switch (status) {
    case TC_OK: return kExitOk;
    case TC_ERR_RESOURCE: return kExitResource;
    case TC_ERR_INTERNAL: return kExitInternal;
    default: return kExitConfig;
  }
}

int report_failure(tc_status status) {
  std::cerr << "error (" << tc_status_name(status) << "): " << tc_last_error() << '\n';
  return exit_code_for(status);
}

struct OwnedString {
  char* ptr = nullptr;
  ~OwnedString() { tc_string_free(ptr); }
  std::string str() const { return ptr != nullptr ? ptr : ""; }
};

void flatten(const json& node, const std::string& prefix, json& flat) {
  if (node.is_object()) {
    for (const auto& [key, value] : node.items()) flatten(value, prefix.empty() ? key : prefix + "." + key, flat);
    return;
  }
  flat[prefix] = node;
}

// Command-line values that override keys of the configuration file.
struct Overrides {
  std::string config_path;
  std::optional<std::string> shape;
  std::optional<int> n, l, h;
  std::optional<double> eta;
  std::optional<std::size_t> replications;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> iterations;
  std::optional<std::uint64_t> trajectory_stride;
  bool want_trajectory = false;  // sample every 1000 iterations unless a stride is given
  std::optional<std::string> output_dir;
  std::optional<std::string> mode;
  std::vector<double> eta_grid;
  std::vector<int> size_grid;
  std::optional<unsigned> threads;
  bool trained = false;
  bool limit_weights = false;

  void add_topology(CLI::App* app) {
    app->add_option("--shape", shape, "chain | star | bridged")->check(CLI::IsMember({"chain", "star", "bridged"}));
    app->add_option("-n,--size", n, "nodes per chain or star");
    app->add_option("--bridge-l", l, "bridge position in chain A");
    app->add_option("--bridge-h", h, "bridge position in chain B");
  }

  void add_common(CLI::App* app) {
    app->add_option("-c,--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
    app->add_option("--eta", eta, "natural forwarding rate");
    app->add_option("--seed", seed, "master seed");
    app->add_option("--threads", threads, "worker threads (0 = hardware)");
  }

  std::string to_json() const {
    json flat = json::object();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      std::stringstream buffer;
      buffer << in.rdbuf();
      json doc;
      try {
        doc = json::parse(buffer.str());
      } catch (const json::exception& e) {
        throw CLI::ValidationError("--config", std::string("not valid JSON: ") + e.what());
      }
      if (!doc.is_object()) throw CLI::ValidationError("--config", "must hold a JSON object");
      flatten(doc, "", flat);
    }
    if (shape) flat["topology.shape"] = *shape;
    if (n) flat["topology.n"] = *n;
    if (l) flat["topology.l"] = *l;
    if (h) flat["topology.h"] = *h;
    if (eta) flat["model.eta"] = *eta;
    if (replications) flat["mc.replications"] = *replications;
    if (seed) flat["seed"] = *seed;
    if (iterations) flat["learning.max_iterations"] = *iterations;
    if (trajectory_stride) {
      flat["learning.trajectory_stride"] = *trajectory_stride;
    } else if (want_trajectory && !flat.contains("learning.trajectory_stride")) {
      flat["learning.trajectory_stride"] = 1000;
    }
    if (output_dir) flat["output_dir"] = *output_dir;
    if (mode) flat["analytic_mode"] = *mode;
    if (!eta_grid.empty()) flat["eta_grid"] = eta_grid;
    if (!size_grid.empty()) flat["size_grid"] = size_grid;
    if (threads) flat["threads"] = *threads;
    if (trained) flat["trained"] = true;
    if (limit_weights) flat["limit_weights"] = true;
    return flat.dump();
  }
};

bool write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) {
    std::cerr << "error (io): cannot write " << path << '\n';
    return false;
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trust-weighted message cascades: closed forms, simulation and learning"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(tc_version()));

  Overrides analytic_opts;
  auto* analytic = app.add_subcommand("analytic", "closed-form spread counts and abilities (JSON)");
  analytic_opts.add_common(analytic);
  analytic_opts.add_topology(analytic);
  analytic->add_flag("--trained", analytic_opts.trained, "use the trained weight pattern");
  analytic->add_option("--mode", analytic_opts.mode, "exact | asymptotic")
      ->check(CLI::IsMember({"exact", "asymptotic"}));

  Overrides mc_opts;
  auto* mc = app.add_subcommand("mc", "Monte Carlo abilities (JSON)");
  mc_opts.add_common(mc);
  mc_opts.add_topology(mc);
  mc->add_option("-r,--replications", mc_opts.replications, "cascades per source and message kind");
  mc->add_flag("--trained", mc_opts.trained, "train the graph before measuring");
  mc->add_flag("--limit-weights", mc_opts.limit_weights, "use the limit weight pattern instead of training");
  mc->add_option("--iterations", mc_opts.iterations, "training iterations");

  Overrides train_opts;
  std::string graph_out;
  std::string trajectory_out;
  auto* train = app.add_subcommand("train", "run the learning loop and report the final weights");
  train_opts.add_common(train);
  train_opts.add_topology(train);
  train->add_option("--iterations", train_opts.iterations, "maximum training iterations");
  train->add_option("--graph-out", graph_out, "write the trained graph dump here");
  train->add_option("--trajectory-out", trajectory_out, "write the weight trajectory CSV here");
  train->add_option("--trajectory-stride", train_opts.trajectory_stride, "iterations between trajectory samples");

  Overrides figure_opts;
  std::string figure_id;
  auto* figure = app.add_subcommand("figure", "write the three CSV panels of one figure");
  figure->add_option("id", figure_id, "fig4 .. fig9")->required();
  figure_opts.add_common(figure);
  figure->add_option("-r,--replications", figure_opts.replications, "cascades per source and message kind");
  figure->add_option("-o,--output-dir", figure_opts.output_dir, "directory for the CSV panels");
  figure->add_option("--iterations", figure_opts.iterations, "training iterations per cell");
  figure->add_option("--eta-grid", figure_opts.eta_grid, "forwarding rates")->delimiter(',');
  figure->add_option("--size-grid", figure_opts.size_grid, "network sizes")->delimiter(',');
  figure->add_option("--mode", figure_opts.mode, "IFA panels: exact | asymptotic")
      ->check(CLI::IsMember({"exact", "asymptotic"}));
  figure->add_option("--bridge-l", figure_opts.l, "bridge position in chain A");
  figure->add_option("--bridge-h", figure_opts.h, "bridge position in chain B");
  figure->add_flag("--limit-weights", figure_opts.limit_weights, "use the limit weight pattern instead of training");

  Overrides check_opts;
  std::size_t check_mc = 0;
  std::string check_out;
  auto* check = app.add_subcommand("oracle-check", "compare closed forms with the exact tree oracle");
  check_opts.add_common(check);
  check_opts.add_topology(check);
  check->add_option("--eta-grid", check_opts.eta_grid, "forwarding rates")->delimiter(',');
  check->add_option("--size-grid", check_opts.size_grid, "network sizes")->delimiter(',');
  check->add_option("--mode", check_opts.mode, "exact | asymptotic")->check(CLI::IsMember({"exact", "asymptotic"}));
  check->add_option("--mc", check_mc, "also run this many Monte Carlo replications per cell");
  check->add_option("-o,--out", check_out, "write the table here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*analytic) {
      OwnedString out;
      const auto status = tc_analytic_report(analytic_opts.to_json().c_str(), &out.ptr);
      if (status != TC_OK) return report_failure(status);
      std::cout << out.str() << '\n';
    } else if (*mc) {
      OwnedString out;
      const auto status = tc_mc_report(mc_opts.to_json().c_str(), &out.ptr);
      if (status != TC_OK) return report_failure(status);
      std::cout << out.str() << '\n';
    } else if (*train) {
      OwnedString report, dump, trajectory;
      train_opts.want_trajectory = !trajectory_out.empty();
      const auto status = tc_train_run(train_opts.to_json().c_str(), &report.ptr, &dump.ptr, &trajectory.ptr);
      if (status != TC_OK) return report_failure(status);
      std::cout << report.str() << '\n';
      if (!graph_out.empty() && !write_text(graph_out, dump.str())) return kExitConfig;
      if (!trajectory_out.empty() && !write_text(trajectory_out, trajectory.str())) return kExitConfig;
    } else if (*figure) {
      OwnedString paths;
      const auto status = tc_run_figure(figure_id.c_str(), figure_opts.to_json().c_str(), &paths.ptr);
      if (status != TC_OK) return report_failure(status);
      for (const auto& p : json::parse(paths.str())) std::cout << p.get<std::string>() << '\n';
    } else if (*check) {
      OwnedString csv;
      std::size_t violations = 0;
      const auto status = tc_oracle_check(check_opts.to_json().c_str(), check_mc, &csv.ptr, &violations);
      if (status != TC_OK) return report_failure(status);
      if (check_out.empty()) {
        std::cout << csv.str();
      } else if (!write_text(check_out, csv.str())) {
        return kExitConfig;
      }
      if (violations > 0) {
        std::cerr << "oracle-check: " << violations << " exactness violation(s)\n";
        return kExitCheckFailed;
      }
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error (config): " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitOk;
}
