#include "trustcascade/learning.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace trustcascade {

void LearningConfig::validate() const {
  require(delta > 0.0, ErrorCode::Config, "learning delta must be positive");
  require(floor > 0.0, ErrorCode::Config, "learning floor must be positive");
  require(floor + delta <= 1.0, ErrorCode::Config, "learning floor + delta must not exceed 1");
  require(max_iterations >= 1, ErrorCode::Config, "max_iterations must be >= 1");
  require(stability_window >= 2, ErrorCode::Config, "stability_window must be >= 2");
  require(check_stride >= 1, ErrorCode::Config, "check_stride must be >= 1");
}

double reweight_on_receipt(double w, MessageKind kind, const LearningConfig& cfg) noexcept {
  if (kind == MessageKind::True) return w <= 1.0 - cfg.delta ? std::min(w + cfg.delta, 1.0) : 1.0;
  return w >= cfg.delta + cfg.floor ? std::max(w - cfg.delta, cfg.floor) : cfg.floor;
}

bool has_converged(std::span<const std::vector<double>> snapshots, const LearningConfig& cfg) {
  if (snapshots.size() < cfg.stability_window || snapshots.empty()) return false;
  const auto window = snapshots.subspan(snapshots.size() - cfg.stability_window);
  const auto& base = window.front();
  for (const auto& snap : window) {
    if (snap.size() != base.size()) return false;
    for (std::size_t e = 0; e < base.size(); ++e) {
      if (std::abs(snap[e] - base[e]) >= cfg.stability_eps) return false;
    }
  }
  return true;
}

namespace {

void sample_weights(const TrustGraph& graph, std::uint64_t iteration, std::vector<WeightSample>& out) {
  for (std::size_t e = 0; e < graph.edge_count(); ++e) {
    const EdgeId id{static_cast<std::uint32_t>(e)};
    const auto& edge = graph.edge(id);
    out.push_back({iteration, edge.src, edge.dst, graph.weight(id)});
  }
}

}  // namespace

TrainingReport train(TrustGraph& graph, const ModelConfig& model, const LearningConfig& cfg,
                     Seed seed) {
  model.validate();
  cfg.validate();
  for (const double w : graph.weights()) {
    require(w >= cfg.floor && w <= 1.0, ErrorCode::Contract,
            "initial weights must lie within [floor, 1]");
  }
  const std::size_t n = graph.node_count();
  require(n >= 1, ErrorCode::Contract, "cannot train an empty graph");

  Rng rng(derive(seed, {stream_tag::kTraining}));
  CascadeScratch scratch;
  std::vector<EdgeId> delivered;
  std::vector<std::vector<double>> snapshots;
  TrainingReport report;
  auto weights = graph.weights();

  if (cfg.trajectory_stride) sample_weights(graph, 0, report.trajectory);

  for (std::uint64_t t = 1; t <= cfg.max_iterations; ++t) {
    const auto source = rng.index(n);
    const auto kind = graph.is_smart(source) || rng.bernoulli(0.5) ? MessageKind::True
                                                                    : MessageKind::False;
    delivered.clear();
    cascade(graph, source, kind, model.eta, rng, scratch,
            [&](const TrustGraph::Arc& from, std::uint32_t, bool) { delivered.push_back(from.edge); });
    // Declined receipts count too; updates are applied in delivery order.
    for (const auto e : delivered) weights[e.value] = reweight_on_receipt(weights[e.value], kind, cfg);

    report.iterations_run = t;
    if (cfg.trajectory_stride && t % cfg.trajectory_stride == 0) sample_weights(graph, t, report.trajectory);
    if (t % cfg.check_stride == 0) {
      snapshots.emplace_back(weights.begin(), weights.end());
      if (snapshots.size() > cfg.stability_window) snapshots.erase(snapshots.begin());
      if (has_converged(snapshots, cfg)) {
        report.converged = true;
        break;
      }
    }
  }
  sample_weights(graph, report.iterations_run, report.final_weights);
  return report;
}

std::string TrainingReport::to_text() const {
  nlohmann::ordered_json j;
  j["iterations_run"] = iterations_run;
  j["converged"] = converged;
  auto& ws = j["final_weights"] = nlohmann::json::array();
  for (const auto& s : final_weights) ws.push_back({{"src", s.src.index}, {"dst", s.dst.index}, {"weight", s.weight}});
  j["trajectory_samples"] = trajectory.size();
  return j.dump(2);
}

std::string TrainingReport::trajectory_csv() const {
  std::ostringstream out;
  out << "iteration,src,dst,weight\n";
  char buf[64];
  for (const auto& s : trajectory) {
    std::snprintf(buf, sizeof buf, "%.17g", s.weight);
    out << s.iteration << ',' << s.src.index << ',' << s.dst.index << ',' << buf << '\n';
  }
  return out.str();
}

}  // namespace trustcascade
