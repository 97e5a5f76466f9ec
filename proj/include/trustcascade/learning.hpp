#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "trustcascade/cascade.hpp"
#include "trustcascade/graph.hpp"
#include "trustcascade/random.hpp"

namespace trustcascade {

struct LearningConfig {
  double delta = 0.001;   // reward/punishment step
  double floor = 0.001;   // minimum weight
  std::uint64_t max_iterations = 4'000'000;
  double stability_eps = 1e-9;
  std::size_t stability_window = 10;  // snapshots compared by has_converged
  std::uint64_t check_stride = 1000;  // iterations between snapshots
  std::uint64_t trajectory_stride = 0;  // 0 disables the weight trajectory

  void validate() const;
};

/// Applies one receipt of a message of `kind` to a link weight.
double reweight_on_receipt(double w, MessageKind kind, const LearningConfig& cfg) noexcept;

struct WeightSample {
  std::uint64_t iteration = 0;
  NodeId src;
  NodeId dst;
  double weight = 0.0;
};

struct TrainingReport {
  std::uint64_t iterations_run = 0;
  bool converged = false;
  std::vector<WeightSample> final_weights;
  std::vector<WeightSample> trajectory;

  std::string to_text() const;       // JSON summary
  std::string trajectory_csv() const;  // iteration,src,dst,weight
};

/// True iff no weight moved by stability_eps or more across the window.
bool has_converged(std::span<const std::vector<double>> snapshots, const LearningConfig& cfg);

/// Runs the triggering + cascading + re-weighting loop in place on `graph`.
/// A smart source emits a true message; a normal source flips a fair coin.
TrainingReport train(TrustGraph& graph, const ModelConfig& model, const LearningConfig& cfg,
                     Seed seed);

}  // namespace trustcascade
