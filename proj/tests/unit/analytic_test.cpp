#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "trustcascade/analytic.hpp"
#include "trustcascade/error.hpp"

namespace tc = trustcascade;

namespace {

const std::vector<double> kEtaGrid{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};

// Expected posters on a smart-terminated chain, written out hop by hop. The
// trained chain carries weight 1 on every link pointing away from v_1.
double chain_path_products(int n, int source, bool true_message, double eta, bool trained) {
  double total = 1.0;
  double p = 1.0;
  for (int k = source + 1; k <= n; ++k) {
    p *= eta * (trained ? 1.0 : 0.5);
    total += p;
  }
  p = 1.0;
  for (int k = source - 1; k >= 1; --k) {
    p *= k == 1 ? (true_message ? eta : 0.0) : eta * 0.5;
    total += p;
  }
  return total;
}

double star_path_products(int n, int source, bool true_message, double eta, bool trained) {
  const double leaf = eta * (trained ? 1.0 : 0.5);
  if (source == 1) return 1.0 + (n - 1) * leaf;
  const double centre = true_message ? eta : 0.0;
  return 1.0 + centre + centre * leaf * (n - 2);
}

}  // namespace

TEST(ChainMetrics, SmallChainAtFullRate) {
  const auto m = tc::chain_metrics(3, 1.0, tc::Regime::Untrained, tc::SumMode::ExactSum);
  EXPECT_DOUBLE_EQ(m.n_true.at(1), 1.75);
  EXPECT_DOUBLE_EQ(m.n_true.at(2), 2.5);
  EXPECT_DOUBLE_EQ(m.n_true.at(3), 2.0);
  EXPECT_DOUBLE_EQ(m.n_false.at(2), 1.5);
  EXPECT_DOUBLE_EQ(m.n_false.at(3), 1.5);
  EXPECT_NEAR(m.tta, 25.0 / 36.0, 1e-15);
  EXPECT_NEAR(m.fta, 0.5, 1e-15);
  EXPECT_NEAR(m.ifa, 7.0 / 18.0, 1e-15);
}

TEST(ChainMetrics, AsymptoticTenNodes) {
  const auto before = tc::chain_metrics(10, 0.5, tc::Regime::Untrained, tc::SumMode::Asymptotic);
  EXPECT_NEAR(before.ifa, 0.5 / (10 * 9.625), 1e-15);
  EXPECT_NEAR(before.ifa, 0.0051948, 5e-8);
  const auto after = tc::chain_metrics(10, 0.5, tc::Regime::Trained, tc::SumMode::Asymptotic);
  EXPECT_NEAR(after.ifa, 1.375 / 121.25, 1e-15);
  EXPECT_GT(after.ifa, before.ifa);
}

TEST(ChainMetrics, TrainedAsymptoticIsSingularAtFullRate) {
  try {
    tc::chain_metrics(10, 1.0, tc::Regime::Trained, tc::SumMode::Asymptotic);
    FAIL();
  } catch (const tc::Error& e) {
    EXPECT_EQ(e.code(), tc::ErrorCode::Singularity);
  }
  EXPECT_NO_THROW(tc::chain_metrics(10, 1.0, tc::Regime::Trained, tc::SumMode::ExactSum));
  EXPECT_THROW(tc::chain_metrics(1, 0.5, tc::Regime::Untrained, tc::SumMode::ExactSum), tc::Error);
  EXPECT_THROW(tc::chain_metrics(5, 1.2, tc::Regime::Untrained, tc::SumMode::ExactSum), tc::Error);
}

TEST(ChainMetrics, ExactSumsEqualPathProducts) {
  for (int n = 2; n <= 10; ++n) {
    for (double eta : kEtaGrid) {
      for (bool trained : {false, true}) {
        const auto m = tc::chain_metrics(n, eta, trained ? tc::Regime::Trained : tc::Regime::Untrained,
                                         tc::SumMode::ExactSum);
        double sum_true = 0.0, sum_false = 0.0;
        for (int i = 1; i <= n; ++i) {
          const double t = chain_path_products(n, i, true, eta, trained);
          EXPECT_NEAR(m.n_true.at(i), t, 1e-12) << n << ' ' << eta << ' ' << trained << ' ' << i;
          EXPECT_GE(m.n_true.at(i), 1.0);
          sum_true += t;
          if (i >= 2) {
            const double f = chain_path_products(n, i, false, eta, trained);
            EXPECT_NEAR(m.n_false.at(i), f, 1e-12);
            sum_false += f;
          }
        }
        const double tta = sum_true / (n * n);
        const double fta = sum_false / (n * (n - 1.0));
        EXPECT_NEAR(m.tta, tta, 1e-12);
        EXPECT_NEAR(m.fta, fta, 1e-12);
        EXPECT_NEAR(m.ifa, (tta - fta) / fta, 1e-12);
      }
    }
  }
}

TEST(ChainMetrics, ExpandedFormsEqualSums) {
  for (int n = 2; n <= 40; ++n) {
    for (double eta : {0.05, 0.3, 0.5, 0.7, 0.9, 0.99}) {
      for (const auto regime : {tc::Regime::Untrained, tc::Regime::Trained}) {
        const auto sums = tc::chain_metrics(n, eta, regime, tc::SumMode::ExactSum);
        const auto expanded = tc::chain_abilities_expanded(n, eta, regime);
        EXPECT_NEAR(expanded.tta, sums.tta, 1e-12 * std::max(1.0, sums.tta)) << n << ' ' << eta;
        EXPECT_NEAR(expanded.fta, sums.fta, 1e-12 * std::max(1.0, sums.fta)) << n << ' ' << eta;
      }
    }
  }
  EXPECT_NO_THROW(tc::chain_abilities_expanded(6, 1.0, tc::Regime::Untrained));
  EXPECT_THROW(tc::chain_abilities_expanded(6, 1.0, tc::Regime::Trained), tc::Error);
}

TEST(ChainMetrics, AsymptoticMatchesClosedIfaExpressions) {
  for (int n = 2; n <= 60; ++n) {
    for (double eta : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      const double nd = n;
      const double untrained = eta / (nd * ((1 + eta) * (1 - eta / 2) * (nd - 1) - eta));
      const double num = 2 * eta * (1 - eta) * (1 - eta) + eta * (2 - eta) * (2 - eta);
      const double den = (2 + eta - 2 * eta * eta) * (2 - eta) * (1 - eta);
      const double trained = num / (nd * (den * (nd - 1) - num));
      const auto a = tc::chain_metrics(n, eta, tc::Regime::Untrained, tc::SumMode::Asymptotic);
      const auto b = tc::chain_metrics(n, eta, tc::Regime::Trained, tc::SumMode::Asymptotic);
      EXPECT_NEAR(a.ifa, untrained, 1e-10 * std::abs(untrained)) << n << ' ' << eta;
      EXPECT_NEAR(b.ifa, trained, 1e-10 * std::abs(trained)) << n << ' ' << eta;
    }
  }
}

TEST(ChainMetrics, ExactIfaPositiveDecreasingInSizeIncreasingInRate) {
  for (int k = 1; k <= 20; ++k) {
    const double eta = 0.05 * k;
    double previous = INFINITY;
    for (int n = 2; n <= 30; ++n) {
      const double f = tc::chain_metrics(n, eta, tc::Regime::Untrained, tc::SumMode::ExactSum).ifa;
      EXPECT_GT(f, 0.0) << n << ' ' << eta;
      EXPECT_LT(f, previous) << n << ' ' << eta;
      previous = f;
    }
  }
  for (int n = 2; n <= 30; ++n) {
    double previous = 0.0;
    for (int k = 1; k <= 20; ++k) {
      const double eta = 0.05 * k;
      const double f = tc::chain_metrics(n, eta, tc::Regime::Untrained, tc::SumMode::ExactSum).ifa;
      EXPECT_GT(f, previous) << n << ' ' << eta;
      previous = f;
    }
  }
}

TEST(ChainMetrics, TrainingRaisesExactIfaOnSmallChains) {
  for (int n = 2; n <= 10; ++n) {
    for (double eta : kEtaGrid) {
      const double before = tc::chain_metrics(n, eta, tc::Regime::Untrained, tc::SumMode::ExactSum).ifa;
      const double after = tc::chain_metrics(n, eta, tc::Regime::Trained, tc::SumMode::ExactSum).ifa;
      EXPECT_GT(after, before) << n << ' ' << eta;
    }
  }
}

TEST(ChainMetrics, ExactIfaDecaysLikeInverseSize) {
  // N * F tends to eta / (2 + eta); the large-N forms decay one power faster.
  for (double eta : {0.3, 0.5, 0.7, 0.9}) {
    const double limit = eta / (2.0 + eta);
    const int n = 4000;
    const double exact = tc::chain_metrics(n, eta, tc::Regime::Untrained, tc::SumMode::ExactSum).ifa;
    EXPECT_NEAR(n * exact, limit, 0.01 * limit) << eta;
    const double asymptotic = tc::chain_metrics(n, eta, tc::Regime::Untrained, tc::SumMode::Asymptotic).ifa;
    EXPECT_LT(n * asymptotic, 0.01 * limit) << eta;
  }
}

TEST(ChainMetrics, AsymptoticGapAtTwentyNodes) {
  // Measured gap between the large-N forms and the exact sums; far above 5%.
  for (double eta : {0.3, 0.5, 0.7, 0.9}) {
    const double exact = tc::chain_metrics(20, eta, tc::Regime::Untrained, tc::SumMode::ExactSum).ifa;
    const double asymptotic = tc::chain_metrics(20, eta, tc::Regime::Untrained, tc::SumMode::Asymptotic).ifa;
    EXPECT_GT(std::abs(asymptotic - exact) / exact, 0.5) << eta;
  }
}

TEST(StarMetrics, ThreeNodesAtFullRate) {
  const auto before = tc::star_metrics(3, 1.0, tc::Regime::Untrained);
  EXPECT_NEAR(before.ifa, 4.0 / 3.0, 1e-15);
  const auto after = tc::star_metrics(3, 1.0, tc::Regime::Trained);
  EXPECT_NEAR(after.ifa, 2.0, 1e-15);
}

TEST(StarMetrics, ClosedFormsEqualPathProducts) {
  for (int n = 2; n <= 100; ++n) {
    for (double eta : kEtaGrid) {
      for (bool trained : {false, true}) {
        const auto m = tc::star_metrics(n, eta, trained ? tc::Regime::Trained : tc::Regime::Untrained);
        EXPECT_EQ(m.fta, 1.0 / n);
        double sum_true = 0.0;
        for (int i = 1; i <= n; ++i) {
          const double t = star_path_products(n, i, true, eta, trained);
          EXPECT_NEAR(m.n_true.at(i), t, 1e-12);
          sum_true += t;
          if (i >= 2) {
            EXPECT_EQ(m.n_false.at(i), 1.0);
            EXPECT_EQ(star_path_products(n, i, false, eta, trained), 1.0);
          }
        }
        const double tta = sum_true / (n * n);
        EXPECT_NEAR(m.tta, tta, 1e-12);
        EXPECT_NEAR(m.ifa, (tta - 1.0 / n) * n, 1e-12 * std::max(1.0, m.ifa)) << n << ' ' << eta;
      }
    }
  }
}

TEST(StarMetrics, IfaIncreasesWithSizeAndRateAndBeatsChain) {
  for (double eta : {0.1, 0.3, 0.5, 0.7, 0.9, 1.0}) {
    for (int n = 3; n <= 100; ++n) {
      const auto star = tc::star_metrics(n, eta, tc::Regime::Untrained);
      EXPECT_GT(star.ifa, tc::star_metrics(n - 1, eta, tc::Regime::Untrained).ifa);
      EXPECT_GT(star.ifa, tc::chain_metrics(n, eta, tc::Regime::Untrained, tc::SumMode::ExactSum).ifa);
      if (eta > 0.1) EXPECT_GT(star.ifa, tc::star_metrics(n, eta - 0.1, tc::Regime::Untrained).ifa);
    }
  }
}

TEST(Stratification, DifferencesOfCounts) {
  for (int n = 3; n <= 15; ++n) {
    for (double eta : kEtaGrid) {
      for (const auto regime : {tc::Regime::Untrained, tc::Regime::Trained}) {
        const auto p = tc::stratification_profile(n, eta, regime);
        const auto m = tc::chain_metrics(n, eta, regime, tc::SumMode::ExactSum);
        double telescoped = 0.0;
        for (int i = 2; i < n; ++i) {
          EXPECT_NEAR(p.d_true.at(i), m.n_true.at(i) - m.n_true.at(i + 1), 1e-12);
          EXPECT_NEAR(p.d_false.at(i), m.n_false.at(i) - m.n_false.at(i + 1), 1e-12);
          EXPECT_GT(p.d_true.at(i), 0.0) << n << ' ' << eta << ' ' << i;
          telescoped += p.d_true.at(i);
        }
        EXPECT_NEAR(telescoped, m.n_true.at(2) - m.n_true.at(n), 1e-12);
      }
    }
  }
}

TEST(Stratification, UntrainedSwitchesAtMidpoint) {
  for (int n = 3; n <= 21; ++n) {
    for (double eta : {0.3, 0.5, 0.7, 0.9}) {
      const auto p = tc::stratification_profile(n, eta, tc::Regime::Untrained);
      EXPECT_EQ(p.switching_point, (n + 1) / 2.0);
      for (int i = 2; i < n; ++i) {
        if (2 * i < n + 1) EXPECT_LT(p.d_false.at(i), 0.0) << n << ' ' << i;
        if (2 * i > n + 1) EXPECT_GT(p.d_false.at(i), 0.0) << n << ' ' << i;
        if (2 * i == n + 1) EXPECT_EQ(p.d_false.at(i), 0.0) << n << ' ' << i;
      }
    }
  }
}

TEST(Stratification, TrainedSwitchingPoint) {
  const auto p = tc::stratification_profile(10, 0.5, tc::Regime::Trained);
  EXPECT_EQ(p.switching_point, 4.0);
  EXPECT_LT(p.d_false.at(3), 0.0);
  EXPECT_GT(p.d_false.at(5), 0.0);
  EXPECT_EQ(tc::stratification_profile(10, 1.0, tc::Regime::Trained).switching_point, 1.0);
  const auto flat = tc::stratification_profile(10, 0.0, tc::Regime::Trained);
  EXPECT_TRUE(flat.degenerate);
  EXPECT_TRUE(std::isnan(flat.switching_point));
}

TEST(Crossover, ConstantsAndSymmetry) {
  for (int n = 3; n <= 12; ++n) {
    for (int l = 2; l <= n; ++l) {
      for (int h = 2; h <= n; ++h) {
        for (double eta : {0.3, 0.5, 0.7, 0.9, 1.0}) {
          for (const auto regime : {tc::Regime::Untrained, tc::Regime::Trained}) {
            const auto m = tc::crossover_metrics(n, l, h, eta, regime);
            EXPECT_GT(m.theta_true, m.theta_false);
            EXPECT_GT(m.theta_false, 0.0);
            EXPECT_GT(m.beta_true, 1.0);
            const auto swapped = tc::crossover_metrics(n, h, l, eta, regime);
            for (int i = 1; i <= n; ++i) {
              EXPECT_EQ(m.n_true_b.at(i), swapped.n_true_a.at(i));
              if (i >= 2) EXPECT_EQ(m.n_false_b.at(i), swapped.n_false_a.at(i));
            }
            for (int i = 2; i < n; ++i) {
              EXPECT_NEAR(m.d_true_a.at(i), m.n_true_a.at(i) - m.n_true_a.at(i + 1), 1e-12);
              EXPECT_NEAR(m.d_false_a.at(i), m.n_false_a.at(i) - m.n_false_a.at(i + 1), 1e-12);
            }
          }
        }
      }
    }
  }
}

TEST(Crossover, BridgeNodeGainsInfluence) {
  for (int n = 3; n <= 12; ++n) {
    for (int l = 2; l <= n; ++l) {
      for (double eta : {0.1, 0.3, 0.5, 0.7, 0.9, 1.0}) {
        for (const auto regime : {tc::Regime::Untrained, tc::Regime::Trained}) {
          const auto bridged = tc::crossover_metrics(n, l, 8 <= n ? 8 : n, eta, regime);
          const auto chain = tc::chain_metrics(n, eta, regime, tc::SumMode::ExactSum);
          EXPECT_GT(bridged.n_true_a.at(l), chain.n_true.at(l)) << n << ' ' << l << ' ' << eta;
        }
      }
    }
  }
}

TEST(Analytic, GeometricSumAndImprovement) {
  EXPECT_DOUBLE_EQ(tc::geometric_sum(0.5, 0, 3), 1.875);
  EXPECT_EQ(tc::geometric_sum(0.5, 3, 2), 0.0);
  EXPECT_DOUBLE_EQ(tc::geometric_sum(1.0, 1, 4), 4.0);
  EXPECT_NEAR(tc::geometric_sum(1.0 - 1e-12, 0, 9), 10.0, 1e-9);
  EXPECT_DOUBLE_EQ(tc::relative_improvement(3.0, 2.0), 0.5);
  try {
    tc::relative_improvement(1.0, 0.0);
    FAIL();
  } catch (const tc::Error& e) {
    EXPECT_EQ(e.code(), tc::ErrorCode::Undefined);
  }
}
