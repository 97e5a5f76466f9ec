#include "trustcascade/cascade.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "parallel.hpp"

namespace trustcascade {

const char* to_string(MessageKind kind) noexcept {
  return kind == MessageKind::True ? "true" : "false";
}

void ModelConfig::validate() const {
  require(eta >= 0.0 && eta <= 1.0, ErrorCode::Config,
          "natural forwarding rate must lie in [0, 1], got " + std::to_string(eta));
}

void CascadeScratch::reset(std::size_t nodes) {
  if (state_.size() != nodes) {
    state_.resize(nodes);
    first_candidate_.resize(nodes);
    candidate_count_.resize(nodes);
    slot_of_receiver_.resize(nodes);
    epoch_.assign(nodes, 0);
    current_epoch_ = 0;
  }
  if (current_epoch_ > std::numeric_limits<std::uint32_t>::max() - static_cast<std::uint32_t>(nodes) - 2) {
    std::fill(epoch_.begin(), epoch_.end(), 0);
    current_epoch_ = 0;
  }
  std::fill(state_.begin(), state_.end(), State::Undecided);
  last_rounds_ = 0;
}

std::string CascadeOutcome::dump() const {
  std::ostringstream out;
  out << "# source=" << source.index << ",kind=" << to_string(kind)
      << ",posters=" << posters.size() << ",rounds=" << rounds << '\n';
  for (const auto& d : deliveries) {
    out << d.from.index << ',' << d.to.index << ',' << (d.forwarded ? 1 : 0) << '\n';
  }
  return out.str();
}

namespace {

void check_source(const TrustGraph& graph, NodeId source, MessageKind kind) {
  require(graph.contains(source), ErrorCode::Contract,
          "source node " + std::to_string(source.index) + " does not exist");
  require(!(kind == MessageKind::False && graph.kind(source) == NodeKind::Smart),
          ErrorCode::Contract, "a smart source never emits a false message");
}

std::uint64_t kind_tag(MessageKind kind) {
  return kind == MessageKind::True ? stream_tag::kCascadeTrue : stream_tag::kCascadeFalse;
}

Estimate spread_in_stream(const TrustGraph& graph, std::size_t source, MessageKind kind,
                          double eta, std::size_t replications, Seed stream) {
  Rng rng(stream);
  CascadeScratch scratch;
  // Welford accumulation of |posters|.
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t r = 0; r < replications; ++r) {
    const auto x = static_cast<double>(
        cascade(graph, source, kind, eta, rng, scratch, [](const auto&, auto, bool) {}));
    const double delta = x - mean;
    mean += delta / static_cast<double>(r + 1);
    m2 += delta * (x - mean);
  }
  const double var = replications > 1 ? m2 / static_cast<double>(replications - 1) : 0.0;
  return {mean, std::sqrt(var / static_cast<double>(replications))};
}

}  // namespace

CascadeOutcome run_cascade(const TrustGraph& graph, NodeId source, MessageKind kind,
                           const ModelConfig& cfg, Rng& rng) {
  cfg.validate();
  check_source(graph, source, kind);
  CascadeOutcome out;
  out.source = source;
  out.kind = kind;
  out.posters.push_back(source);
  CascadeScratch scratch;
  cascade(graph, source.slot(), kind, cfg.eta, rng, scratch,
          [&](const TrustGraph::Arc& from, std::uint32_t to, bool forwarded) {
            const NodeId to_id{static_cast<int>(to) + 1};
            out.deliveries.push_back({NodeId{static_cast<int>(from.node) + 1}, to_id, from.edge, forwarded});
            if (forwarded) out.posters.push_back(to_id);
          });
  out.rounds = scratch.last_rounds();
  return out;
}

Estimate estimate_spread(const TrustGraph& graph, NodeId source, MessageKind kind,
                         const ModelConfig& cfg, std::size_t replications, Seed seed) {
  cfg.validate();
  check_source(graph, source, kind);
  require(replications >= 1, ErrorCode::Config, "replications must be >= 1");
  return spread_in_stream(graph, source.slot(), kind, cfg.eta, replications,
                          derive(seed, {kind_tag(kind), static_cast<std::uint64_t>(source.index)}));
}

SpreadStats estimate_stats(const TrustGraph& graph, const ModelConfig& cfg,
                           std::size_t replications, Seed seed, unsigned threads) {
  cfg.validate();
  require(replications >= 1, ErrorCode::Config, "replications must be >= 1");
  const std::size_t n = graph.node_count();
  const std::size_t normals = graph.normal_count();
  require(normals > 0, ErrorCode::Undefined, "FTA is undefined on a graph without normal nodes");

  struct Task {
    std::size_t source;
    MessageKind kind;
  };
  std::vector<Task> tasks;
  for (std::size_t i = 0; i < n; ++i) tasks.push_back({i, MessageKind::True});
  for (std::size_t i = 0; i < n; ++i) {
    if (!graph.is_smart(i)) tasks.push_back({i, MessageKind::False});
  }
  std::vector<Estimate> results(tasks.size());
  detail::parallel_for(tasks.size(), threads, [&](std::size_t t) {
    const auto& task = tasks[t];
    results[t] = spread_in_stream(
        graph, task.source, task.kind, cfg.eta, replications,
        derive(seed, {kind_tag(task.kind), static_cast<std::uint64_t>(task.source + 1)}));
  });

  SpreadStats stats;
  stats.replications = replications;
  stats.true_spread.assign(n, {});
  stats.false_spread.assign(n, {});
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    auto& slot = tasks[t].kind == MessageKind::True ? stats.true_spread : stats.false_spread;
    slot[tasks[t].source] = results[t];
  }

  const double nd = static_cast<double>(n);
  const double true_norm = nd * nd;
  const double false_norm = nd * static_cast<double>(normals);
  double sum_t = 0.0, var_t = 0.0, sum_f = 0.0, var_f = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sum_t += stats.true_spread[i].mean;
    var_t += stats.true_spread[i].std_error * stats.true_spread[i].std_error;
    if (!graph.is_smart(i)) {
      sum_f += stats.false_spread[i].mean;
      var_f += stats.false_spread[i].std_error * stats.false_spread[i].std_error;
    }
  }
  stats.tta = {sum_t / true_norm, std::sqrt(var_t) / true_norm};
  stats.fta = {sum_f / false_norm, std::sqrt(var_f) / false_norm};
  const double ft = stats.tta.mean;
  const double ff = stats.fta.mean;
  // Delta method; the true and false runs are independent.
  const double d_ft = 1.0 / ff;
  const double d_ff = -ft / (ff * ff);
  stats.ifa = {(ft - ff) / ff,
               std::sqrt(d_ft * d_ft * stats.tta.std_error * stats.tta.std_error +
                         d_ff * d_ff * stats.fta.std_error * stats.fta.std_error)};
  return stats;
}

StratificationEstimate stratification_mc(const TrustGraph& graph, const ModelConfig& cfg,
                                         MessageKind kind, std::size_t replications, Seed seed,
                                         unsigned threads) {
  cfg.validate();
  require(replications >= 1, ErrorCode::Config, "replications must be >= 1");
  const auto& topo = graph.topology();
  require(topo.has_value() && topo->shape != Shape::Star, ErrorCode::Unsupported,
          "stratification needs a chain or bridged-chain topology");
  const int n = topo->n;
  require(n >= 3, ErrorCode::Unsupported, "stratification needs at least 3 nodes per chain");

  // Along chain A: true messages from every position, false from normal ones.
  const int first = kind == MessageKind::True ? 1 : 2;
  StratificationEstimate est;
  est.kind = kind;
  est.spread = IndexedSeries::range(first, n);
  est.spread_stderr = IndexedSeries::range(first, n);
  detail::parallel_for(static_cast<std::size_t>(n - first + 1), threads, [&](std::size_t t) {
    const int i = first + static_cast<int>(t);
    const auto e = spread_in_stream(
        graph, chain_a_node(i).slot(), kind, cfg.eta, replications,
        derive(seed, {stream_tag::kStratification, kind_tag(kind), static_cast<std::uint64_t>(i)}));
    est.spread.values[t] = e.mean;
    est.spread_stderr.values[t] = e.std_error;
  });
  est.difference = IndexedSeries::range(first, n - 1);
  est.difference_stderr = IndexedSeries::range(first, n - 1);
  for (int i = first; i < n; ++i) {
    est.difference.at(i) = est.spread.at(i) - est.spread.at(i + 1);
    est.difference_stderr.at(i) = std::hypot(est.spread_stderr.at(i), est.spread_stderr.at(i + 1));
  }
  return est;
}

}  // namespace trustcascade
