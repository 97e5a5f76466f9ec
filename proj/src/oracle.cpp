#include "trustcascade/oracle.hpp"

#include <numeric>
#include <queue>

namespace trustcascade {

namespace {

void check_inputs(const TrustGraph& graph, NodeId source, MessageKind kind, const ModelConfig& cfg) {
  cfg.validate();
  require(graph.contains(source), ErrorCode::Contract,
          "source node " + std::to_string(source.index) + " does not exist");
  require(!(kind == MessageKind::False && graph.kind(source) == NodeKind::Smart),
          ErrorCode::Contract, "a smart source never emits a false message");
}

double hop_probability(const TrustGraph& graph, EdgeId edge, std::size_t receiver, MessageKind kind,
                       double eta) {
  if (graph.is_smart(receiver)) return kind == MessageKind::True ? eta : 0.0;
  return eta * graph.weight(edge);
}

ExpectedSpread finish(NodeId source, MessageKind kind, std::vector<double> prob) {
  ExpectedSpread out;
  out.source = source;
  out.kind = kind;
  out.expected_posters = std::accumulate(prob.begin(), prob.end(), 0.0);
  out.post_probability = std::move(prob);
  return out;
}

}  // namespace

ExpectedSpread tree_expected_spread(const TrustGraph& graph, NodeId source, MessageKind kind,
                                    const ModelConfig& cfg) {
  check_inputs(graph, source, kind, cfg);
  require(graph.is_forest(), ErrorCode::Unsupported,
          "tree oracle needs an acyclic undirected skeleton");
  std::vector<double> prob(graph.node_count(), 0.0);
  std::vector<bool> seen(graph.node_count(), false);
  std::queue<std::size_t> queue;
  prob[source.slot()] = 1.0;
  seen[source.slot()] = true;
  queue.push(source.slot());
  while (!queue.empty()) {
    const auto u = queue.front();
    queue.pop();
    for (const auto& arc : graph.out_arcs(u)) {
      if (seen[arc.node]) continue;
      seen[arc.node] = true;
      prob[arc.node] = prob[u] * hop_probability(graph, arc.edge, arc.node, kind, cfg.eta);
      queue.push(arc.node);
    }
  }
  return finish(source, kind, std::move(prob));
}

namespace {

enum class State : unsigned char { Undecided, Posted, Declined };

class Enumerator {
 public:
  Enumerator(const TrustGraph& graph, MessageKind kind, double eta, std::size_t budget)
      : graph_(graph), kind_(kind), eta_(eta), budget_(budget), prob_(graph.node_count(), 0.0) {}

  std::vector<double> run(std::size_t source) {
    std::vector<State> state(graph_.node_count(), State::Undecided);
    state[source] = State::Posted;
    prob_[source] = 1.0;
    round(state, {source}, 1.0);
    return std::move(prob_);
  }

 private:
  struct Receiver {
    std::size_t node;
    std::vector<TrustGraph::Arc> candidates;
  };

  void round(std::vector<State>& state, const std::vector<std::size_t>& frontier, double p) {
    std::vector<Receiver> receivers;
    std::vector<std::size_t> index(graph_.node_count(), SIZE_MAX);
    for (const auto j : frontier) {
      for (const auto& arc : graph_.out_arcs(j)) {
        if (state[arc.node] != State::Undecided) continue;
        if (index[arc.node] == SIZE_MAX) {
          index[arc.node] = receivers.size();
          receivers.push_back({arc.node, {}});
        }
        receivers[index[arc.node]].candidates.push_back({static_cast<std::uint32_t>(j), arc.edge});
      }
    }
    if (receivers.empty()) return;
    std::vector<std::size_t> next;
    expand(receivers, 0, state, next, p);
  }

  void expand(const std::vector<Receiver>& receivers, std::size_t r, std::vector<State>& state,
              std::vector<std::size_t>& next, double p) {
    require(++visited_ <= budget_, ErrorCode::Resource,
            "event-tree enumeration exceeded its budget of " + std::to_string(budget_) + " branches");
    if (r == receivers.size()) {
      round(state, next, p);
      return;
    }
    const auto& rec = receivers[r];
    const double pick = 1.0 / static_cast<double>(rec.candidates.size());
    for (const auto& from : rec.candidates) {
      const double q = hop_probability(graph_, from.edge, rec.node, kind_, eta_);
      if (q > 0.0) {
        const double branch = p * pick * q;
        prob_[rec.node] += branch;
        state[rec.node] = State::Posted;
        next.push_back(rec.node);
        expand(receivers, r + 1, state, next, branch);
        next.pop_back();
      }
      if (q < 1.0) {
        state[rec.node] = State::Declined;
        expand(receivers, r + 1, state, next, p * pick * (1.0 - q));
      }
      state[rec.node] = State::Undecided;
    }
  }

  const TrustGraph& graph_;
  MessageKind kind_;
  double eta_;
  std::size_t budget_;
  std::size_t visited_ = 0;
  std::vector<double> prob_;
};

}  // namespace

ExpectedSpread enumerate_expected_spread(const TrustGraph& graph, NodeId source, MessageKind kind,
                                         const ModelConfig& cfg, std::size_t budget) {
  check_inputs(graph, source, kind, cfg);
  Enumerator e(graph, kind, cfg.eta, budget);
  return finish(source, kind, e.run(source.slot()));
}

}  // namespace trustcascade
