#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "trustcascade/error.hpp"
#include "trustcascade/graph.hpp"
#include "trustcascade/random.hpp"
#include "trustcascade/series.hpp"

namespace trustcascade {

enum class MessageKind { True, False };

const char* to_string(MessageKind kind) noexcept;

struct ModelConfig {
  double eta = 0.5;  // natural forwarding rate

  void validate() const;
};

struct Delivery {
  NodeId from;
  NodeId to;
  EdgeId edge;
  bool forwarded = false;
};

struct CascadeOutcome {
  NodeId source;
  MessageKind kind = MessageKind::True;
  std::vector<NodeId> posters;  // in posting order, source first
  std::vector<Delivery> deliveries;
  int rounds = 0;  // delivery rounds that took place

  /// "# source=..,kind=..,posters=..,rounds=.." then one "from,to,forwarded" line per delivery.
  std::string dump() const;
};

/// Scratch buffers reused across cascades on graphs of the same size.
class CascadeScratch {
 public:
  void reset(std::size_t nodes);
  int last_rounds() const noexcept { return last_rounds_; }

 private:
  template <typename OnDelivery>
  friend std::size_t cascade(const TrustGraph&, std::size_t, MessageKind, double, Rng&,
                             CascadeScratch&, OnDelivery&&);

  enum class State : std::uint8_t { Undecided, Posted, Declined };

  std::vector<State> state_;
  std::vector<std::uint32_t> frontier_;
  std::vector<std::uint32_t> next_;
  std::vector<std::uint32_t> receivers_;
  // Per receiver: offset into pending_ and number of posting in-neighbours.
  std::vector<std::uint32_t> first_candidate_;
  std::vector<std::uint32_t> candidate_count_;
  std::vector<TrustGraph::Arc> pending_;
  std::vector<std::uint32_t> epoch_;
  std::uint32_t current_epoch_ = 0;
  std::vector<std::uint32_t> slot_of_receiver_;
  int last_rounds_ = 0;
};

/// Round-synchronous cascade from `source` (0-based slot). Every receipt,
/// forwarded or declined, is reported through on_delivery(Arc from, to_slot,
/// forwarded). Returns the number of posters.
template <typename OnDelivery>
std::size_t cascade(const TrustGraph& graph, std::size_t source, MessageKind kind, double eta,
                    Rng& rng, CascadeScratch& s, OnDelivery&& on_delivery) {
  using State = CascadeScratch::State;
  s.reset(graph.node_count());
  s.state_[source] = State::Posted;
  s.frontier_.assign(1, static_cast<std::uint32_t>(source));
  std::size_t posters = 1;
  int rounds = 0;

  while (!s.frontier_.empty()) {
    // Gather, per undecided receiver, the in-neighbours that posted last round.
    s.receivers_.clear();
    s.pending_.clear();
    ++s.current_epoch_;
    for (const auto j : s.frontier_) {
      for (const auto& arc : graph.out_arcs(j)) {
        const auto k = arc.node;
        if (s.state_[k] != State::Undecided) continue;
        if (s.epoch_[k] != s.current_epoch_) {
          s.epoch_[k] = s.current_epoch_;
          s.slot_of_receiver_[k] = static_cast<std::uint32_t>(s.receivers_.size());
          s.receivers_.push_back(k);
          s.candidate_count_[s.receivers_.size() - 1] = 0;
        }
        ++s.candidate_count_[s.slot_of_receiver_[k]];
      }
    }
    if (s.receivers_.empty()) break;
    ++rounds;

    // Lay candidates out contiguously per receiver.
    std::uint32_t offset = 0;
    for (std::size_t r = 0; r < s.receivers_.size(); ++r) {
      s.first_candidate_[r] = offset;
      offset += s.candidate_count_[r];
      s.candidate_count_[r] = 0;
    }
    s.pending_.resize(offset);
    for (const auto j : s.frontier_) {
      for (const auto& arc : graph.out_arcs(j)) {
        const auto k = arc.node;
        if (s.state_[k] != State::Undecided || s.epoch_[k] != s.current_epoch_) continue;
        const auto r = s.slot_of_receiver_[k];
        s.pending_[s.first_candidate_[r] + s.candidate_count_[r]++] = TrustGraph::Arc{j, arc.edge};
      }
    }

    s.next_.clear();
    for (std::size_t r = 0; r < s.receivers_.size(); ++r) {
      const auto k = s.receivers_[r];
      const auto count = s.candidate_count_[r];
      const auto pick = count == 1 ? 0 : rng.index(count);
      const auto& from = s.pending_[s.first_candidate_[r] + pick];
      double p = 0.0;
      if (graph.is_smart(k)) {
        p = kind == MessageKind::True ? eta : 0.0;
      } else {
        p = eta * graph.weight(from.edge);
      }
      const bool forwarded = rng.bernoulli(p);
      on_delivery(from, k, forwarded);
      if (forwarded) {
        s.state_[k] = State::Posted;
        s.next_.push_back(k);
        ++posters;
      } else {
        s.state_[k] = State::Declined;
      }
    }
    std::swap(s.frontier_, s.next_);
  }
  s.last_rounds_ = rounds;
  return posters;
}

/// Full cascade record. A smart source cannot emit a false message.
CascadeOutcome run_cascade(const TrustGraph& graph, NodeId source, MessageKind kind,
                           const ModelConfig& cfg, Rng& rng);

/// Mean of a per-source quantity with its standard error.
struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
};

struct SpreadStats {
  Estimate tta;  // F_T
  Estimate fta;  // F_F
  Estimate ifa;  // F = (F_T - F_F) / F_F
  std::size_t replications = 0;
  std::vector<Estimate> true_spread;   // per source slot, mean |posters|
  std::vector<Estimate> false_spread;  // per source slot; zero-filled for smart nodes
};

/// Monte Carlo TTA/FTA/IFA: `replications` true cascades from every node and
/// false cascades from every normal node. Each (kind, source) pair draws from
/// its own stream derived from `seed`, so results do not depend on threading.
SpreadStats estimate_stats(const TrustGraph& graph, const ModelConfig& cfg,
                           std::size_t replications, Seed seed, unsigned threads = 0);

/// Mean |posters| from one source with its standard error.
Estimate estimate_spread(const TrustGraph& graph, NodeId source, MessageKind kind,
                         const ModelConfig& cfg, std::size_t replications, Seed seed);

struct StratificationEstimate {
  MessageKind kind = MessageKind::True;
  IndexedSeries spread;         // n^(i)
  IndexedSeries spread_stderr;
  IndexedSeries difference;     // D^(i) = n^(i) - n^(i+1), i = 2..N-1
  IndexedSeries difference_stderr;
};

/// Per-position spread and successive differences along the smart-terminated
/// chain (chain A for bridged graphs).
StratificationEstimate stratification_mc(const TrustGraph& graph, const ModelConfig& cfg,
                                         MessageKind kind, std::size_t replications, Seed seed,
                                         unsigned threads = 0);

}  // namespace trustcascade
