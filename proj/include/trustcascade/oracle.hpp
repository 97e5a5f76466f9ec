#pragma once

#include <cstddef>
#include <vector>

#include "trustcascade/cascade.hpp"
#include "trustcascade/graph.hpp"

namespace trustcascade {

/// Exact expected cascade size from one source, computed without reference to
/// any closed form.
struct ExpectedSpread {
  NodeId source;
  MessageKind kind = MessageKind::True;
  double expected_posters = 0.0;
  std::vector<double> post_probability;  // by 0-based slot; source has 1
};

/// Product of per-hop forwarding probabilities along the unique path from the
/// source. Requires the undirected skeleton to be a forest.
ExpectedSpread tree_expected_spread(const TrustGraph& graph, NodeId source, MessageKind kind,
                                    const ModelConfig& cfg);

inline constexpr std::size_t kDefaultEnumerationBudget = 20'000'000;

/// Exhaustive expansion of every pick and forward/decline outcome of the
/// round-synchronous cascade. Throws ErrorCode::Resource once more than
/// `budget` branches would be visited.
ExpectedSpread enumerate_expected_spread(const TrustGraph& graph, NodeId source, MessageKind kind,
                                         const ModelConfig& cfg,
                                         std::size_t budget = kDefaultEnumerationBudget);

}  // namespace trustcascade
