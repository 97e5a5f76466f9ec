#pragma once

#include "trustcascade/series.hpp"

namespace trustcascade {

/// Closed-form spread counts and filtering abilities for the smart-terminated
/// chain, the smart-centred star and two bridged chains.
///
/// "Untrained" means every weight is 0.5. "Trained" means the weights sit at
/// the limit pattern produced by set_limit_weights(). Throughout, r = eta / 2
/// is the per-hop forwarding probability over an untrained link.

enum class Regime { Untrained, Trained };

/// ExactSum evaluates the finite sums; Asymptotic evaluates the large-N
/// simplified forms of the aggregate abilities.
enum class SumMode { ExactSum, Asymptotic };

const char* to_string(Regime regime) noexcept;
const char* to_string(SumMode mode) noexcept;

/// Sum of r^k for k = from..to; zero when to < from. Falls back to the
/// explicit series when r is within 1e-9 of 1.
double geometric_sum(double r, int from, int to);

struct ChainMetrics {
  SumMode mode = SumMode::ExactSum;
  IndexedSeries n_true;   // i = 1..N
  IndexedSeries n_false;  // i = 2..N
  double tta = 0.0;
  double fta = 0.0;
  double ifa = 0.0;
};

/// Per-source counts are always the exact finite sums. In Asymptotic mode
/// the three abilities come from the simplified large-N forms, which require
/// eta < 1 when trained.
ChainMetrics chain_metrics(int n, double eta, Regime regime, SumMode mode);

/// Expanded closed forms of TTA and FTA for the chain, i.e. the sums over
/// sources carried out term by term. Requires eta < 1 when trained.
struct ChainAbilities {
  double tta = 0.0;
  double fta = 0.0;
};
ChainAbilities chain_abilities_expanded(int n, double eta, Regime regime);

struct StarMetrics {
  IndexedSeries n_true;   // i = 1..N, centre first
  IndexedSeries n_false;  // i = 2..N, all exactly 1
  double tta = 0.0;
  double fta = 0.0;
  double ifa = 0.0;
};

StarMetrics star_metrics(int n, double eta, Regime regime);

struct StratificationProfile {
  IndexedSeries d_true;   // i = 2..N-1
  IndexedSeries d_false;  // i = 2..N-1
  double switching_point = 0.0;  // NaN when degenerate
  bool degenerate = false;       // eta == 0: every difference vanishes
};

StratificationProfile stratification_profile(int n, double eta, Regime regime);

struct CrossoverMetrics {
  IndexedSeries n_true_a;   // i = 1..N
  IndexedSeries n_false_a;  // i = 2..N
  IndexedSeries n_true_b;
  IndexedSeries n_false_b;
  IndexedSeries d_true_a;   // i = 2..N-1
  IndexedSeries d_false_a;  // i = 2..N-1
  double theta_true = 0.0;  // untrained spread behind the far bridge end (true)
  double theta_false = 0.0;
  double beta_true = 0.0;   // trained counterparts
  double beta_false = 0.0;
};

/// Chains A (bridge at v_l) and B (bridge at u_h). B-side counts are the
/// A-side expressions with l and h exchanged. The four constants are always
/// filled; the arrays follow `regime`.
CrossoverMetrics crossover_metrics(int n, int l, int h, double eta, Regime regime);

/// (after - before) / before; before must be positive.
double relative_improvement(double after, double before);

}  // namespace trustcascade
