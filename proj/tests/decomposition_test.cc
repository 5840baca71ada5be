#include "expdec/decomposition.hpp"

#include <gtest/gtest.h>

#include "expdec/gen.hpp"
#include "expdec/oracles.hpp"
#include "test_util.hpp"

namespace expdec {
namespace {

using testutil::complete_graph;

void check_partition_invariants(const MultiGraph &g, const Partition &part) {
  std::vector<char> seen(g.n(), 0);
  for (const auto &cluster : part.clusters) {
    ASSERT_FALSE(cluster.empty());
    for (Vertex v : cluster) {
      ASSERT_FALSE(seen[v]);
      seen[v] = 1;
    }
  }
  for (Vertex v = 0; v < g.n(); ++v) ASSERT_TRUE(seen[v]);
  EXPECT_EQ(recount_inter_cluster_edges(g, part.clusters), part.inter_cluster_edges);
  for (const auto &info : part.info) EXPECT_GT(info.cert_value, 0.0);
}

TEST(Decomp, SingleVertex) {
  MultiGraph g(1, {});
  auto part = decomp(g, 0.1, Mode::desk, 1);
  ASSERT_EQ(part.clusters.size(), 1u);
  EXPECT_EQ(part.inter_cluster_edges, 0);
  check_partition_invariants(g, part);
}

TEST(Decomp, SingleExpanderIsOneCluster) {
  MultiGraph g = complete_graph(16);
  auto part = decomp(g, 0.025, Mode::desk, 3);
  EXPECT_EQ(part.clusters.size(), 1u);
  EXPECT_EQ(part.inter_cluster_edges, 0);
  check_partition_invariants(g, part);
  // certification is honest: brute value of K_16 exceeds phi
  EXPECT_GE(brute_force_min_conductance(g).value, 0.025);
}

TEST(Decomp, TwoCliquesOneBridge) {
  MultiGraph g = dumbbell(2, 16, 1);
  auto part = decomp(g, 0.05, Mode::desk, 11);
  check_partition_invariants(g, part);
  ASSERT_EQ(part.clusters.size(), 2u);
  EXPECT_EQ(part.inter_cluster_edges, 1);
  EXPECT_EQ(part.clusters[0].size(), 16u);
  EXPECT_EQ(part.clusters[1].size(), 16u);
}

TEST(Decomp, DisconnectedInputSplitsByComponent) {
  // two K_8 with no connection
  MultiGraph k8 = complete_graph(8);
  std::vector<std::pair<Vertex, Vertex>> edges;
  for (auto [u, v] : k8.edges()) {
    edges.emplace_back(u, v);
    edges.emplace_back(u + 8, v + 8);
  }
  MultiGraph g(16, edges);
  auto part = decomp(g, 0.05, Mode::desk, 5);
  check_partition_invariants(g, part);
  EXPECT_EQ(part.clusters.size(), 2u);
  EXPECT_EQ(part.inter_cluster_edges, 0);
}

TEST(Decomp, DeterministicGivenSeed) {
  Rng rng(7);
  MultiGraph g = planted_expanders(2, 20, 3, 2, rng);
  auto a = decomp(g, 0.05, Mode::desk, 42);
  auto b = decomp(g, 0.05, Mode::desk, 42);
  EXPECT_EQ(a.clusters, b.clusters);
  EXPECT_EQ(a.inter_cluster_edges, b.inter_cluster_edges);
}

TEST(Decomp, PlantedStructureRecovered) {
  Rng rng(19);
  MultiGraph g = planted_expanders(2, 24, 3, 2, rng);
  auto part = decomp(g, 0.04, Mode::desk, 23);
  check_partition_invariants(g, part);
  // the bridge edges separate the parts; clusters should not mix sides
  int mixed = 0;
  for (const auto &cluster : part.clusters) {
    bool lo = false, hi = false;
    for (Vertex v : cluster) (v < 24 ? lo : hi) = true;
    if (lo && hi) ++mixed;
  }
  EXPECT_EQ(mixed, 0);
}

} // namespace
} // namespace expdec
