#include "trustcascade/analytic.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include "trustcascade/error.hpp"

namespace trustcascade {

const char* to_string(Regime regime) noexcept {
  return regime == Regime::Trained ? "trained" : "untrained";
}

const char* to_string(SumMode mode) noexcept {
  return mode == SumMode::Asymptotic ? "asymptotic" : "exact";
}

double geometric_sum(double r, int from, int to) {
  if (to < from) return 0.0;
  if (std::abs(1.0 - r) < 1e-9) {
    double sum = 0.0;
    for (int k = from; k <= to; ++k) sum += std::pow(r, k);
    return sum;
  }
  return std::pow(r, from) * (1.0 - std::pow(r, to - from + 1)) / (1.0 - r);
}

namespace {

void check_eta(double eta) {
  require(eta >= 0.0 && eta <= 1.0, ErrorCode::Contract,
          "natural forwarding rate must lie in [0, 1], got " + std::to_string(eta));
}

double ipow(double base, int exponent) { return std::pow(base, exponent); }

// Per-hop forwarding probability along links pointing away from the smart node.
double outward_rate(double eta, Regime regime) {
  return regime == Regime::Trained ? eta : eta / 2.0;
}

double chain_true_count(int n, int i, double eta, Regime regime) {
  const double r = eta / 2.0;
  const double f = outward_rate(eta, regime);
  if (i == 1) return geometric_sum(f, 0, n - 1);
  // Away from the smart node, back towards v_2, then the smart node itself.
  return geometric_sum(f, 0, n - i) + geometric_sum(r, 1, i - 2) + eta * ipow(r, i - 2);
}

double chain_false_count(int n, int i, double eta, Regime regime) {
  const double r = eta / 2.0;
  return geometric_sum(r, 1, i - 2) + geometric_sum(outward_rate(eta, regime), 0, n - i);
}

}  // namespace

ChainMetrics chain_metrics(int n, double eta, Regime regime, SumMode mode) {
  require(n >= 2, ErrorCode::Contract, "chain needs n >= 2");
  check_eta(eta);
  if (mode == SumMode::Asymptotic && regime == Regime::Trained) {
    require(eta < 1.0, ErrorCode::Singularity,
            "trained asymptotic chain forms divide by (1 - eta); use exact sums at eta = 1");
  }
  ChainMetrics m;
  m.mode = mode;
  m.n_true = IndexedSeries::range(1, n);
  m.n_false = IndexedSeries::range(2, n);
  double sum_true = 0.0;
  double sum_false = 0.0;
  for (int i = 1; i <= n; ++i) {
    m.n_true.at(i) = chain_true_count(n, i, eta, regime);
    sum_true += m.n_true.at(i);
    if (i >= 2) {
      m.n_false.at(i) = chain_false_count(n, i, eta, regime);
      sum_false += m.n_false.at(i);
    }
  }
  const double nd = n;
  if (mode == SumMode::ExactSum) {
    m.tta = sum_true / (nd * nd);
    m.fta = sum_false / (nd * (nd - 1.0));
  } else if (regime == Regime::Untrained) {
    const double q = 1.0 - eta / 2.0;
    m.tta = ((1.0 + eta) / q * nd - eta / (q * q)) / (nd * nd);
    m.fta = ((1.0 + eta) / q * (nd - 1.0) - eta / (q * q)) / (nd * (nd - 1.0));
  } else {
    const double lead = (2.0 + eta - 2.0 * eta * eta) / ((2.0 - eta) * (1.0 - eta));
    const double tail = 2.0 * eta / ((2.0 - eta) * (2.0 - eta)) + eta / ((1.0 - eta) * (1.0 - eta));
    m.tta = lead / nd - tail / (nd * nd);
    m.fta = lead / nd - tail / (nd * (nd - 1.0));
  }
  m.ifa = (m.tta - m.fta) / m.fta;
  return m;
}

ChainAbilities chain_abilities_expanded(int n, double eta, Regime regime) {
  require(n >= 2, ErrorCode::Contract, "chain needs n >= 2");
  check_eta(eta);
  const double nd = n;
  const double r = eta / 2.0;
  const double q = 1.0 - r;
  // Sources 2..N summed over the link runs that point back towards v_2.
  const double back = r * (nd - 1.0) / q - r * (1.0 - ipow(r, n - 1)) / (q * q);
  const double smart = eta * (1.0 - ipow(r, n - 1)) / q;
  ChainAbilities a;
  if (regime == Regime::Untrained) {
    const double outward = (nd - 1.0) / q - r * (1.0 - ipow(r, n - 1)) / (q * q);
    a.tta = ((1.0 - ipow(r, n)) / q + outward + back + smart) / (nd * nd);
    a.fta = (back + outward) / (nd * (nd - 1.0));
  } else {
    require(eta < 1.0, ErrorCode::Singularity, "expanded trained forms divide by (1 - eta)");
    const double p = 1.0 - eta;
    const double outward = (nd - 1.0) / p - eta * (1.0 - ipow(eta, n - 1)) / (p * p);
    a.tta = ((1.0 - ipow(eta, n)) / p + outward + back + smart) / (nd * nd);
    a.fta = (back + outward) / (nd * (nd - 1.0));
  }
  return a;
}

StarMetrics star_metrics(int n, double eta, Regime regime) {
  require(n >= 2, ErrorCode::Contract, "star needs n >= 2");
  check_eta(eta);
  const double nd = n;
  // Trained links from the centre carry weight 1 instead of 0.5.
  const double leaf_rate = regime == Regime::Trained ? eta : eta / 2.0;
  StarMetrics m;
  m.n_true = IndexedSeries::range(1, n);
  m.n_false = IndexedSeries::range(2, n);
  m.n_true.at(1) = 1.0 + leaf_rate * (nd - 1.0);
  for (int i = 2; i <= n; ++i) {
    m.n_true.at(i) = 1.0 + eta + eta * leaf_rate * (nd - 2.0);
    m.n_false.at(i) = 1.0;
  }
  const double poly = nd * nd - 3.0 * nd + 2.0;
  if (regime == Regime::Untrained) {
    m.tta = (nd + 1.5 * eta * (nd - 1.0) + 0.5 * eta * eta * poly) / (nd * nd);
    m.ifa = (1.5 * eta * (nd - 1.0) + 0.5 * eta * eta * poly) / nd;
  } else {
    m.tta = (nd + 2.0 * eta * (nd - 1.0) + eta * eta * poly) / (nd * nd);
    m.ifa = (2.0 * eta * (nd - 1.0) + eta * eta * poly) / nd;
  }
  m.fta = 1.0 / nd;
  return m;
}

StratificationProfile stratification_profile(int n, double eta, Regime regime) {
  require(n >= 3, ErrorCode::Contract, "stratification needs n >= 3");
  check_eta(eta);
  const double r = eta / 2.0;
  const double f = outward_rate(eta, regime);
  StratificationProfile p;
  p.d_true = IndexedSeries::range(2, n - 1);
  p.d_false = IndexedSeries::range(2, n - 1);
  for (int i = 2; i < n; ++i) {
    p.d_true.at(i) = ipow(f, n - i) + (1.0 - eta) * ipow(r, i - 1);
    p.d_false.at(i) = ipow(f, n - i) - ipow(r, i - 1);
  }
  if (eta == 0.0) {
    p.degenerate = true;
    p.switching_point = std::numeric_limits<double>::quiet_NaN();
  } else if (regime == Regime::Untrained) {
    p.switching_point = (n + 1) / 2.0;
  } else if (eta == 1.0) {
    p.switching_point = 1.0;
  } else {
    const double ln_eta = std::log(eta);
    const double ln2 = std::log(2.0);
    p.switching_point = ((n + 1) * ln_eta - ln2) / (2.0 * ln_eta - ln2);
  }
  return p;
}

namespace {

struct BridgeSide {
  int n;
  int near;  // bridge index on the source chain
  int far;   // bridge index on the other chain
  double eta;
};

double theta_true(const BridgeSide& s) {
  const double r = s.eta / 2.0;
  return geometric_sum(r, 0, s.n - s.far) + geometric_sum(r, 1, s.far - 2) + s.eta * ipow(r, s.far - 2);
}

double theta_false(const BridgeSide& s) {
  const double r = s.eta / 2.0;
  return geometric_sum(r, 0, s.n - s.far) + geometric_sum(r, 1, s.far - 2);
}

double beta_true(const BridgeSide& s) {
  return geometric_sum(s.eta, 0, s.n - s.far) + geometric_sum(s.eta, 1, s.far - 1);
}

double beta_false(const BridgeSide& s) {
  return geometric_sum(s.eta, 0, s.n - s.far) + geometric_sum(s.eta, 1, s.far - 2);
}

double bridged_true_count(const BridgeSide& s, int i, Regime regime) {
  const double eta = s.eta;
  const double r = eta / 2.0;
  const int n = s.n;
  const int l = s.near;
  if (regime == Regime::Untrained) {
    const double theta = theta_true(s);
    if (i == 1) return geometric_sum(r, 0, n - 1) + ipow(r, l) * theta;
    return chain_true_count(n, i, eta, Regime::Untrained) + ipow(r, std::abs(i - l) + 1) * theta;
  }
  const double beta = beta_true(s);
  if (i == 1) return geometric_sum(eta, 0, n - 1) + ipow(eta, l) * beta;
  if (i <= l) {
    return geometric_sum(eta, 0, n - i) + geometric_sum(eta, 1, i - 1) + ipow(eta, l - i + 1) * beta;
  }
  return geometric_sum(eta, 0, n - i) + ipow(r, i - l) * geometric_sum(eta, 1, l - 1) +
         geometric_sum(r, 1, i - l) + eta * ipow(r, i - l) * beta;
}

double bridged_false_count(const BridgeSide& s, int i, Regime regime) {
  const double eta = s.eta;
  const double r = eta / 2.0;
  const int n = s.n;
  const int l = s.near;
  if (regime == Regime::Untrained) {
    return chain_false_count(n, i, eta, Regime::Untrained) + ipow(r, std::abs(i - l) + 1) * theta_false(s);
  }
  const double beta = beta_false(s);
  if (i <= l) {
    return geometric_sum(eta, 0, n - i) + geometric_sum(eta, 1, i - 2) + ipow(eta, l - i + 1) * beta;
  }
  return geometric_sum(eta, 0, n - i) + ipow(r, i - l) * geometric_sum(eta, 1, l - 2) +
         geometric_sum(r, 1, i - l) + eta * ipow(r, i - l) * beta;
}

double bridged_true_difference(const BridgeSide& s, int i, Regime regime) {
  const double eta = s.eta;
  const double r = eta / 2.0;
  const int n = s.n;
  const int l = s.near;
  if (regime == Regime::Untrained) {
    return ipow(r, n - i) + (1.0 - eta) * ipow(r, i - 1) +
           (ipow(r, std::abs(i - l) + 1) - ipow(r, std::abs(i + 1 - l) + 1)) * theta_true(s);
  }
  const double beta = beta_true(s);
  if (i <= l - 1) return ipow(eta, n - i) - ipow(eta, i) - ipow(eta, l - i) * (1.0 - eta) * beta;
  return ipow(eta, n - i) + ipow(r, i - l) * (1.0 - r) * geometric_sum(eta, 1, l - 1) -
         ipow(r, i - l + 1) + eta * (1.0 - r) * ipow(r, i - l) * beta;
}

double bridged_false_difference(const BridgeSide& s, int i, Regime regime) {
  const double eta = s.eta;
  const double r = eta / 2.0;
  const int n = s.n;
  const int l = s.near;
  if (regime == Regime::Untrained) {
    return ipow(r, n - i) - ipow(r, i - 1) +
           (ipow(r, std::abs(i - l) + 1) - ipow(r, std::abs(i + 1 - l) + 1)) * theta_false(s);
  }
  const double beta = beta_false(s);
  if (i <= l - 1) return ipow(eta, n - i) - ipow(eta, i - 1) - ipow(eta, l - i) * (1.0 - eta) * beta;
  return ipow(eta, n - i) + ipow(r, i - l) * (1.0 - r) * geometric_sum(eta, 1, l - 2) -
         ipow(r, i - l + 1) + eta * (1.0 - r) * ipow(r, i - l) * beta;
}

}  // namespace

CrossoverMetrics crossover_metrics(int n, int l, int h, double eta, Regime regime) {
  require(n >= 3, ErrorCode::Contract, "bridged chains need n >= 3");
  require(l >= 2 && l <= n && h >= 2 && h <= n, ErrorCode::Contract,
          "bridge indices must satisfy 2 <= l,h <= n");
  check_eta(eta);
  const BridgeSide a{n, l, h, eta};
  const BridgeSide b{n, h, l, eta};
  CrossoverMetrics m;
  m.theta_true = theta_true(a);
  m.theta_false = theta_false(a);
  m.beta_true = beta_true(a);
  m.beta_false = beta_false(a);
  m.n_true_a = IndexedSeries::range(1, n);
  m.n_true_b = IndexedSeries::range(1, n);
  m.n_false_a = IndexedSeries::range(2, n);
  m.n_false_b = IndexedSeries::range(2, n);
  m.d_true_a = IndexedSeries::range(2, n - 1);
  m.d_false_a = IndexedSeries::range(2, n - 1);
  for (int i = 1; i <= n; ++i) {
    m.n_true_a.at(i) = bridged_true_count(a, i, regime);
    m.n_true_b.at(i) = bridged_true_count(b, i, regime);
    if (i >= 2) {
      m.n_false_a.at(i) = bridged_false_count(a, i, regime);
      m.n_false_b.at(i) = bridged_false_count(b, i, regime);
    }
    if (i >= 2 && i < n) {
      m.d_true_a.at(i) = bridged_true_difference(a, i, regime);
      m.d_false_a.at(i) = bridged_false_difference(a, i, regime);
    }
  }
  return m;
}

double relative_improvement(double after, double before) {
  require(before > 0.0, ErrorCode::Undefined,
          "relative improvement needs a positive baseline, got " + std::to_string(before));
  return (after - before) / before;
}

}  // namespace trustcascade
