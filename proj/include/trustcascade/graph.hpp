#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace trustcascade {

/// 1-based node identifier (v_1 ... v_N). In a bridged graph chain A holds
/// ids 1..N and chain B holds ids N+1..2N.
struct NodeId {
  int index = 0;

  friend auto operator<=>(const NodeId&, const NodeId&) = default;
  std::size_t slot() const noexcept { return static_cast<std::size_t>(index - 1); }
};

struct EdgeId {
  std::uint32_t value = 0;

  friend auto operator<=>(const EdgeId&, const EdgeId&) = default;
};

enum class NodeKind { Smart, Normal };

enum class Shape { Chain, Star, BridgedChains };

const char* to_string(Shape shape) noexcept;

struct TopologySpec {
  Shape shape = Shape::Chain;
  int n = 2;
  int l = 0;  // bridge index in chain A (bridged only)
  int h = 0;  // bridge index in chain B (bridged only)

  static TopologySpec chain(int n) { return {Shape::Chain, n, 0, 0}; }
  static TopologySpec star(int n) { return {Shape::Star, n, 0, 0}; }
  static TopologySpec bridged(int n, int l, int h) { return {Shape::BridgedChains, n, l, h}; }

  /// Throws ErrorCode::InvalidTopology when the parameters are out of range.
  void validate() const;
  int node_count() const noexcept { return shape == Shape::BridgedChains ? 2 * n : n; }

  friend bool operator==(const TopologySpec&, const TopologySpec&) = default;
};

/// Structured text form: {"shape": "chain"|"star"|"bridged", "n": .., "l": .., "h": ..}.
std::string topology_to_text(const TopologySpec& spec);
TopologySpec topology_from_text(std::string_view text);

inline constexpr double kInitialWeight = 0.5;

struct Edge {
  NodeId src;
  NodeId dst;
};

/// Directed weighted graph with smart/normal node kinds. The weight of edge
/// (j,k) is the trust of k in j and lies in [0, 1].
class TrustGraph {
 public:
  struct Arc {
    std::uint32_t node;  // 0-based slot of the other endpoint
    EdgeId edge;
  };

  TrustGraph() = default;
  explicit TrustGraph(std::vector<NodeKind> kinds);

  EdgeId add_edge(NodeId src, NodeId dst, double weight = kInitialWeight);

  std::size_t node_count() const noexcept { return kinds_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  std::size_t normal_count() const noexcept;

  bool contains(NodeId id) const noexcept {
    return id.index >= 1 && static_cast<std::size_t>(id.index) <= kinds_.size();
  }
  NodeKind kind(NodeId id) const;
  bool is_smart(std::size_t slot) const noexcept { return kinds_[slot] == NodeKind::Smart; }

  const Edge& edge(EdgeId id) const { return edges_.at(id.value); }
  std::optional<EdgeId> find_edge(NodeId src, NodeId dst) const;

  double weight(EdgeId id) const { return weights_.at(id.value); }
  double weight(NodeId src, NodeId dst) const;
  void set_weight(EdgeId id, double w);
  void set_weight(NodeId src, NodeId dst, double w);

  std::span<const double> weights() const noexcept { return weights_; }
  std::span<double> weights() noexcept { return weights_; }

  std::span<const Arc> out_arcs(std::size_t slot) const noexcept { return out_[slot]; }
  std::span<const Arc> in_arcs(std::size_t slot) const noexcept { return in_[slot]; }

  const std::optional<TopologySpec>& topology() const noexcept { return topology_; }
  void set_topology(TopologySpec spec) { topology_ = spec; }

  /// True when the underlying undirected simple graph has no cycle.
  bool is_forest() const noexcept { return forest_; }

  friend bool operator==(const TrustGraph& a, const TrustGraph& b);

 private:
  std::vector<NodeKind> kinds_;
  std::vector<Edge> edges_;
  std::vector<double> weights_;
  std::vector<std::vector<Arc>> out_;
  std::vector<std::vector<Arc>> in_;
  std::optional<TopologySpec> topology_;
  // Union-find over the undirected skeleton, maintained by add_edge.
  std::vector<std::size_t> component_;
  bool forest_ = true;

  std::size_t root(std::size_t x);
};

/// Chain v_1 - ... - v_N with v_1 smart; all weights 0.5.
TrustGraph build_chain(int n);
/// Star with smart center v_1 and normal leaves v_2..v_N; all weights 0.5.
TrustGraph build_star(int n);
/// Two chains (v_1..v_N and u_1..u_N, each with a smart terminal) joined by
/// the pair of links v_l <-> u_h.
TrustGraph build_bridged_chains(int n, int l, int h);
TrustGraph build_topology(const TopologySpec& spec);

NodeId chain_a_node(int index) noexcept;
NodeId chain_b_node(int n, int index) noexcept;

/// Overwrites the weights with the fixed point that training drives the
/// topology towards. Idempotent.
void set_limit_weights(TrustGraph& graph, const TopologySpec& spec);

/// "# kinds: S,N,..." header, a "src,dst,weight" column line, one line per edge.
std::string dump_graph(const TrustGraph& graph);
TrustGraph parse_graph_dump(std::string_view text);

}  // namespace trustcascade
