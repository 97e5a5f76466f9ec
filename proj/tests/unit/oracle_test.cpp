#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "trustcascade/analytic.hpp"
#include "trustcascade/cascade.hpp"
#include "trustcascade/error.hpp"
#include "trustcascade/graph.hpp"
#include "trustcascade/oracle.hpp"

namespace tc = trustcascade;

namespace {

const std::vector<double> kEtaGrid{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
const std::vector<double> kFigureEtas{0.3, 0.5, 0.7, 0.9};

tc::TrustGraph prepared(const tc::TopologySpec& spec, tc::Regime regime) {
  auto g = tc::build_topology(spec);
  if (regime == tc::Regime::Trained) tc::set_limit_weights(g, spec);
  return g;
}

double expected(const tc::TrustGraph& g, int source, tc::MessageKind kind, double eta) {
  return tc::tree_expected_spread(g, tc::NodeId{source}, kind, {eta}).expected_posters;
}

// Two paths from v1 reach v4, so v4 can hear from two posters in the same round.
tc::TrustGraph diamond() {
  tc::TrustGraph g({tc::NodeKind::Normal, tc::NodeKind::Normal, tc::NodeKind::Normal, tc::NodeKind::Normal});
  const std::pair<int, int> links[] = {{1, 2}, {1, 3}, {2, 4}, {3, 4}};
  for (auto [a, b] : links) {
    g.add_edge(tc::NodeId{a}, tc::NodeId{b});
    g.add_edge(tc::NodeId{b}, tc::NodeId{a});
  }
  g.set_weight(tc::NodeId{1}, tc::NodeId{2}, 0.9);
  g.set_weight(tc::NodeId{1}, tc::NodeId{3}, 0.8);
  g.set_weight(tc::NodeId{2}, tc::NodeId{4}, 1.0);
  g.set_weight(tc::NodeId{3}, tc::NodeId{4}, 0.1);
  return g;
}

}  // namespace

TEST(TreeOracle, Examples) {
  EXPECT_DOUBLE_EQ(expected(tc::build_chain(3), 2, tc::MessageKind::True, 1.0), 2.5);
  for (double eta : kEtaGrid) {
    EXPECT_EQ(expected(tc::build_star(7), 4, tc::MessageKind::False, eta), 1.0);
  }
  for (const auto& spec : {tc::TopologySpec::chain(6), tc::TopologySpec::star(6), tc::TopologySpec::bridged(6, 3, 5)}) {
    const auto g = tc::build_topology(spec);
    for (int s = 1; s <= spec.node_count(); ++s) EXPECT_EQ(expected(g, s, tc::MessageKind::True, 0.0), 1.0);
  }
}

TEST(TreeOracle, ProbabilitiesSumAndDecayAlongPaths) {
  std::mt19937 gen(4);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (const auto& spec : {tc::TopologySpec::chain(9), tc::TopologySpec::star(9), tc::TopologySpec::bridged(7, 3, 6)}) {
    auto g = tc::build_topology(spec);
    for (auto& w : g.weights()) w = unit(gen);
    for (int s = 1; s <= spec.node_count(); ++s) {
      const auto e = tc::tree_expected_spread(g, tc::NodeId{s}, tc::MessageKind::True, {0.8});
      EXPECT_EQ(e.post_probability[tc::NodeId{s}.slot()], 1.0);
      EXPECT_NEAR(e.expected_posters, std::accumulate(e.post_probability.begin(), e.post_probability.end(), 0.0),
                  1e-12);
      // Hop distance from the source; along every outward link the probability cannot grow.
      std::vector<int> dist(g.node_count(), -1);
      std::vector<std::size_t> queue{tc::NodeId{s}.slot()};
      dist[queue.front()] = 0;
      for (std::size_t head = 0; head < queue.size(); ++head) {
        for (const auto& arc : g.out_arcs(queue[head])) {
          if (dist[arc.node] < 0) {
            dist[arc.node] = dist[queue[head]] + 1;
            queue.push_back(arc.node);
          }
        }
      }
      for (std::size_t id = 0; id < g.edge_count(); ++id) {
        const auto& edge = g.edge(tc::EdgeId{static_cast<std::uint32_t>(id)});
        if (dist[edge.dst.slot()] != dist[edge.src.slot()] + 1) continue;
        EXPECT_LE(e.post_probability[edge.dst.slot()], e.post_probability[edge.src.slot()]);
      }
    }
  }
}

TEST(TreeOracle, RejectsCycles) {
  try {
    expected(diamond(), 1, tc::MessageKind::True, 0.5);
    FAIL();
  } catch (const tc::Error& e) {
    EXPECT_EQ(e.code(), tc::ErrorCode::Unsupported);
  }
  EXPECT_THROW(expected(tc::build_chain(3), 1, tc::MessageKind::False, 0.5), tc::Error);
}

TEST(Enumerator, AgreesWithTreeOracle) {
  std::mt19937 gen(9);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (const auto& spec : {tc::TopologySpec::chain(6), tc::TopologySpec::star(6), tc::TopologySpec::bridged(4, 2, 3)}) {
    auto g = tc::build_topology(spec);
    for (auto& w : g.weights()) w = unit(gen);
    for (double eta : {0.3, 0.75, 1.0}) {
      for (int s = 1; s <= spec.node_count(); ++s) {
        for (const auto kind : {tc::MessageKind::True, tc::MessageKind::False}) {
          if (kind == tc::MessageKind::False && g.kind(tc::NodeId{s}) == tc::NodeKind::Smart) continue;
          const auto tree = tc::tree_expected_spread(g, tc::NodeId{s}, kind, {eta});
          const auto full = tc::enumerate_expected_spread(g, tc::NodeId{s}, kind, {eta});
          EXPECT_NEAR(full.expected_posters, tree.expected_posters, 1e-12);
          for (std::size_t v = 0; v < g.node_count(); ++v) {
            EXPECT_NEAR(full.post_probability[v], tree.post_probability[v], 1e-12);
          }
        }
      }
    }
  }
}

TEST(Enumerator, BudgetExhaustionIsAResourceError) {
  const auto g = tc::build_star(12);
  try {
    tc::enumerate_expected_spread(g, tc::NodeId{2}, tc::MessageKind::True, {0.5}, 100);
    FAIL();
  } catch (const tc::Error& e) {
    EXPECT_EQ(e.code(), tc::ErrorCode::Resource);
  }
}

TEST(Enumerator, PickRuleMatchesSimulationOnDiamond) {
  const auto g = diamond();
  const auto exact = tc::enumerate_expected_spread(g, tc::NodeId{1}, tc::MessageKind::True, {0.9});
  // Hand evaluation: v4 hears from both branches with probability p2 * p3 and then picks one.
  const double p2 = 0.9 * 0.9, p3 = 0.9 * 0.8;
  const double p4 = p2 * p3 * 0.9 * (1.0 + 0.1) / 2 + p2 * (1 - p3) * 0.9 * 1.0 + (1 - p2) * p3 * 0.9 * 0.1;
  EXPECT_NEAR(exact.post_probability[3], p4, 1e-12);
  EXPECT_NEAR(exact.expected_posters, 1.0 + p2 + p3 + p4, 1e-12);
  const auto mc = tc::estimate_spread(g, tc::NodeId{1}, tc::MessageKind::True, {0.9}, 200'000, tc::Seed{31});
  EXPECT_NEAR(mc.mean, exact.expected_posters, 4 * mc.std_error);
}

TEST(OracleVsAnalytic, ChainExact) {
  for (int n = 2; n <= 10; ++n) {
    for (double eta : kEtaGrid) {
      for (const auto regime : {tc::Regime::Untrained, tc::Regime::Trained}) {
        const auto g = prepared(tc::TopologySpec::chain(n), regime);
        const auto m = tc::chain_metrics(n, eta, regime, tc::SumMode::ExactSum);
        double sum_true = 0.0, sum_false = 0.0;
        for (int i = 1; i <= n; ++i) {
          const double t = expected(g, i, tc::MessageKind::True, eta);
          EXPECT_NEAR(m.n_true.at(i), t, 1e-12);
          sum_true += t;
          if (i >= 2) {
            const double f = expected(g, i, tc::MessageKind::False, eta);
            EXPECT_NEAR(m.n_false.at(i), f, 1e-12);
            sum_false += f;
          }
        }
        const double tta = sum_true / (n * n), fta = sum_false / (n * (n - 1.0));
        EXPECT_NEAR(m.tta, tta, 1e-12);
        EXPECT_NEAR(m.fta, fta, 1e-12);
        EXPECT_NEAR(m.ifa, (tta - fta) / fta, 1e-12);
      }
    }
  }
}

TEST(OracleVsAnalytic, Star) {
  for (int n = 2; n <= 100; ++n) {
    for (double eta : kEtaGrid) {
      for (const auto regime : {tc::Regime::Untrained, tc::Regime::Trained}) {
        const auto g = prepared(tc::TopologySpec::star(n), regime);
        const auto m = tc::star_metrics(n, eta, regime);
        double sum_true = 0.0, sum_false = 0.0;
        for (int i = 1; i <= n; ++i) {
          const double t = expected(g, i, tc::MessageKind::True, eta);
          EXPECT_NEAR(m.n_true.at(i), t, 1e-12);
          sum_true += t;
          if (i >= 2) sum_false += expected(g, i, tc::MessageKind::False, eta);
        }
        const double tta = sum_true / (n * n), fta = sum_false / (n * (n - 1.0));
        EXPECT_NEAR(m.tta, tta, 1e-12);
        EXPECT_NEAR(m.fta, fta, 1e-15);
        EXPECT_NEAR(m.ifa, (tta - fta) / fta, 1e-12 * std::max(1.0, m.ifa));
      }
    }
  }
}

TEST(OracleVsAnalytic, BridgedChains) {
  for (int n = 3; n <= 10; ++n) {
    for (int l = 2; l <= n; ++l) {
      for (int h = 2; h <= n; ++h) {
        for (double eta : {0.2, 0.5, 0.9, 1.0}) {
          for (const auto regime : {tc::Regime::Untrained, tc::Regime::Trained}) {
            const auto g = prepared(tc::TopologySpec::bridged(n, l, h), regime);
            const auto m = tc::crossover_metrics(n, l, h, eta, regime);
            for (int i = 1; i <= n; ++i) {
              const auto a = tc::chain_a_node(i).index;
              const auto b = tc::chain_b_node(n, i).index;
              EXPECT_NEAR(m.n_true_a.at(i), expected(g, a, tc::MessageKind::True, eta), 1e-12)
                  << n << ' ' << l << ' ' << h << ' ' << eta << ' ' << i;
              EXPECT_NEAR(m.n_true_b.at(i), expected(g, b, tc::MessageKind::True, eta), 1e-12);
              if (i >= 2) {
                EXPECT_NEAR(m.n_false_a.at(i), expected(g, a, tc::MessageKind::False, eta), 1e-12);
                EXPECT_NEAR(m.n_false_b.at(i), expected(g, b, tc::MessageKind::False, eta), 1e-12);
              }
            }
          }
        }
      }
    }
  }
}

// Several thousand comparisons share one run, so the band is family-wise.
constexpr double kFamilyBand = 5.0;

TEST(OracleVsMonteCarlo, FigureTopologies) {
  std::vector<tc::TopologySpec> specs;
  for (int n = 2; n <= 10; ++n) specs.push_back(tc::TopologySpec::chain(n));
  for (int n : {10, 50, 100}) specs.push_back(tc::TopologySpec::star(n));
  specs.push_back(tc::TopologySpec::bridged(10, 4, 8));
  std::uint64_t salt = 0;
  for (const auto& spec : specs) {
    for (double eta : kFigureEtas) {
      for (const auto regime : {tc::Regime::Untrained, tc::Regime::Trained}) {
        const auto g = prepared(spec, regime);
        const auto stats = tc::estimate_stats(g, {eta}, 10'000, tc::Seed{20181104 + ++salt});
        for (int s = 1; s <= spec.node_count(); ++s) {
          const auto slot = tc::NodeId{s}.slot();
          const double t = expected(g, s, tc::MessageKind::True, eta);
          EXPECT_NEAR(stats.true_spread[slot].mean, t, kFamilyBand * stats.true_spread[slot].std_error + 1e-12)
              << tc::topology_to_text(spec) << " eta=" << eta << " source=" << s;
          if (g.kind(tc::NodeId{s}) == tc::NodeKind::Normal) {
            const double f = expected(g, s, tc::MessageKind::False, eta);
            EXPECT_NEAR(stats.false_spread[slot].mean, f, kFamilyBand * stats.false_spread[slot].std_error + 1e-12)
                << tc::topology_to_text(spec) << " eta=" << eta << " source=" << s;
          }
        }
      }
    }
  }
}
