#include <gtest/gtest.h>

#include "saasim/routers.hpp"

using namespace saasim;

namespace {

struct fake_live final : contact_state {
  std::set<node_id> aps;
  std::set<std::pair<node_id, std::uint64_t>> copies;
  std::map<node_id, node_id> area;

  bool is_ap(node_id n) const override { return aps.contains(n); }
  bool has_copy(node_id n, std::uint64_t m) const override { return copies.contains({n, m}); }
  std::optional<node_id> area_of(node_id u) const override {
    auto it = area.find(u);
    if (it == area.end()) return std::nullopt;
    return it->second;
  }
  std::vector<node_id> area_members(node_id ap) const override {
    std::vector<node_id> out;
    for (const auto& [u, a] : area)
      if (a == ap) out.push_back(u);
    return out;
  }
};

message msg(node_id src, node_id dst) { return {1, src, dst, 60'000, 0, 1000}; }

/// Activity vectors chosen so that similarity to node 9 is known.
routing_context similarity_context() {
  routing_context ctx;
  ctx.sc = {{1, 2, 9}, {2, 3}, {3, 4, 9}};
  ctx.activity[9] = {0.5, 0.0, 0.5};
  ctx.activity[1] = {0.8, 0.0, 0.2}; // positive correlation with 9
  ctx.activity[2] = {0.1, 0.9, 0.0}; // negative
  ctx.activity[3] = {0.1, 0.9, 0.0}; // same as 2
  return ctx;
}

} // namespace

TEST(Saas, ReplicatesInsideApCommunity) {
  fake_live live;
  live.aps = {100};
  live.area = {{5, 100}, {6, 100}, {7, 100}};
  live.copies = {{7, 1}};
  routing_context ctx;
  ctx.ap_communities = {100};
  const auto d = saas_router{}.decide(7, 100, msg(7, 9), ctx, live);
  EXPECT_EQ(d.action, router_action::replicate);
  EXPECT_EQ(d.targets, (std::vector<node_id>{5, 6}));

  live.copies.insert({5, 1});
  EXPECT_EQ(saas_router{}.decide(7, 100, msg(7, 9), ctx, live).targets, (std::vector<node_id>{6}));
  live.copies.insert({6, 1});
  EXPECT_EQ(saas_router{}.decide(7, 100, msg(7, 9), ctx, live).action, router_action::hold);
}

TEST(Saas, AreaSuppressesSimilarity) {
  fake_live live;
  live.aps = {100};
  live.area = {{2, 100}};
  auto ctx = similarity_context();
  ctx.ap_communities = {100};
  // Node 1 is more similar to 9 than 2 is, but 2 sits in an AP community.
  EXPECT_EQ(saas_router{}.decide(2, 1, msg(2, 9), ctx, live).action, router_action::hold);
  ctx.ap_communities.clear();
  EXPECT_EQ(saas_router{}.decide(2, 1, msg(2, 9), ctx, live).action, router_action::forward_and_drop);
}

TEST(Saas, SimilarityAttraction) {
  fake_live live;
  const auto ctx = similarity_context();
  ASSERT_GT(ctx.similarity(1, 9), ctx.similarity(2, 9));
  const auto d = saas_router{}.decide(2, 1, msg(2, 9), ctx, live);
  EXPECT_EQ(d.action, router_action::forward_and_drop);
  EXPECT_EQ(d.targets, (std::vector<node_id>{1}));
  EXPECT_EQ(saas_router{}.decide(1, 2, msg(1, 9), ctx, live).action, router_action::hold);
  // Equal similarity keeps the message.
  EXPECT_EQ(saas_router{}.decide(2, 3, msg(2, 9), ctx, live).action, router_action::hold);
  // A node already holding a copy is not a target.
  live.copies = {{1, 1}};
  EXPECT_EQ(saas_router{}.decide(2, 1, msg(2, 9), ctx, live).action, router_action::hold);
}

TEST(Saas, DestinationShortCircuits) {
  fake_live live;
  const auto ctx = similarity_context();
  // Node 2 is the least similar relay but is the destination.
  const auto d = saas_router{}.decide(1, 2, msg(1, 2), ctx, live);
  EXPECT_EQ(d.action, router_action::forward_and_drop);
  EXPECT_EQ(d.targets, (std::vector<node_id>{2}));
}

TEST(Saas, NeverHandsToAp) {
  fake_live live;
  live.aps = {100};
  routing_context ctx;
  ctx.activity[100] = {1.0, 0.0};
  ctx.activity[9] = {1.0, 0.0};
  ctx.activity[1] = {0.0, 1.0};
  EXPECT_EQ(saas_router{}.decide(1, 100, msg(1, 9), ctx, live).action, router_action::hold);
}

TEST(BubbleRap, EnteringDestinationCommunity) {
  fake_live live;
  routing_context ctx;
  ctx.pp = {{2, 9}, {1, 3}};
  ctx.local_centrality = {{{2, 0.0}, {9, 0.0}}, {{1, 0.0}, {3, 0.0}}};
  ctx.global_centrality = {{1, 5.0}, {2, 0.0}};
  // Lower global rank, but inside dst's community.
  EXPECT_EQ(bubble_rap_router{}.decide(1, 2, msg(1, 9), ctx, live).action, router_action::forward_and_drop);
  // Leaving the community never happens.
  EXPECT_EQ(bubble_rap_router{}.decide(2, 1, msg(2, 9), ctx, live).action, router_action::hold);
}

TEST(BubbleRap, EqualCentralitiesHold) {
  fake_live live;
  routing_context ctx;
  ctx.global_centrality = {{1, 2.0}, {3, 2.0}};
  EXPECT_EQ(bubble_rap_router{}.decide(1, 3, msg(1, 9), ctx, live).action, router_action::hold);
  ctx.pp = {{1, 3, 9}};
  ctx.local_centrality = {{{1, 1.0}, {3, 1.0}, {9, 0.0}}};
  EXPECT_EQ(bubble_rap_router{}.decide(1, 3, msg(1, 9), ctx, live).action, router_action::hold);
  ctx.local_centrality = {{{1, 1.0}, {3, 1.5}, {9, 0.0}}};
  EXPECT_EQ(bubble_rap_router{}.decide(1, 3, msg(1, 9), ctx, live).action, router_action::forward_and_drop);
}

TEST(BubbleRap, StarLeafForwardsToCenter) {
  adjacency star;
  for (node_id leaf = 1; leaf <= 5; ++leaf) {
    star[0].insert(leaf);
    star[leaf].insert(0);
  }
  routing_context ctx;
  ctx.global_centrality = betweenness_centrality(star);
  fake_live live;
  EXPECT_EQ(bubble_rap_router{}.decide(3, 0, msg(3, 9), ctx, live).action, router_action::forward_and_drop);
  EXPECT_EQ(bubble_rap_router{}.decide(0, 3, msg(0, 9), ctx, live).action, router_action::hold);
}

TEST(Nguyen, CommonCommunityCounts) {
  fake_live live;
  routing_context ctx;
  ctx.pp = {{1, 2, 9}, {2, 5, 9}, {1, 9}};
  // Hand count: node 1 shares 2 with dst 9, node 2 shares 2, node 5 shares 1, node 7 none.
  EXPECT_EQ(ctx.common_pp(1, 9), 2u);
  EXPECT_EQ(ctx.common_pp(2, 9), 2u);
  EXPECT_EQ(ctx.common_pp(5, 9), 1u);
  EXPECT_EQ(nguyen_router{}.decide(5, 1, msg(5, 9), ctx, live).action, router_action::forward_and_drop);
  EXPECT_EQ(nguyen_router{}.decide(1, 2, msg(1, 9), ctx, live).action, router_action::hold);
  EXPECT_EQ(nguyen_router{}.decide(1, 5, msg(1, 9), ctx, live).action, router_action::hold);
  EXPECT_EQ(nguyen_router{}.decide(7, 8, msg(7, 9), ctx, live).action, router_action::hold);
}

TEST(Nguyen, TwoVersusOne) {
  fake_live live;
  routing_context ctx;
  ctx.pp = {{2, 9}, {2, 6, 9}, {1, 9}};
  EXPECT_EQ(nguyen_router{}.decide(1, 2, msg(1, 9), ctx, live).action, router_action::forward_and_drop);
}

TEST(Epidemic, ReplicatesAndRelaysThroughAp) {
  fake_live live;
  live.aps = {100};
  live.area = {{1, 100}, {2, 100}, {3, 100}};
  live.copies = {{1, 1}, {3, 1}};
  routing_context ctx;
  const auto d = epidemic_router{}.decide(1, 100, msg(1, 9), ctx, live);
  EXPECT_EQ(d.action, router_action::replicate);
  EXPECT_EQ(d.targets, (std::vector<node_id>{2}));
  EXPECT_EQ(epidemic_router{}.decide(1, 4, msg(1, 9), ctx, live).targets, (std::vector<node_id>{4}));
  EXPECT_EQ(epidemic_router{}.decide(1, 3, msg(1, 9), ctx, live).action, router_action::hold);
}

TEST(Direct, OnlyDestination) {
  fake_live live;
  routing_context ctx;
  EXPECT_EQ(direct_router{}.decide(1, 4, msg(1, 9), ctx, live).action, router_action::hold);
  EXPECT_EQ(direct_router{}.decide(1, 9, msg(1, 9), ctx, live).action, router_action::forward_and_drop);
}

TEST(Routers, Factory) {
  for (const auto& n : router_names()) EXPECT_EQ(make_router(n)->name(), n);
  EXPECT_THROW(make_router("prophet"), config_error);
}

TEST(RoutingContext, BuiltFromRegistry) {
  snapshot_graph g;
  g.aps = ap_designation::from_ring({100});
  g.nodes = {1, 2, 3, 4, 100};
  g.social_edges = {{1, 2}, {1, 3}, {2, 3}, {3, 4}};
  g.weights.w = {{{1, 2}, 0.4}, {{1, 3}, 0.2}, {{2, 3}, 0.2}, {{3, 4}, 0.2}};
  g.ap_membership = {{4, 100}};
  g.rebuild_structural_edges();
  const auto reg = initialize_sc(g, 0.6, density_detector{});
  const auto ctx = make_routing_context(reg, g);
  EXPECT_EQ(ctx.sc, reg.sc_member_sets());
  EXPECT_TRUE(ctx.ap_communities.contains(100));
  EXPECT_EQ(ctx.pp, (std::vector<member_set>{{1, 2, 3}}));
  EXPECT_DOUBLE_EQ(ctx.global_rank(3), 2.0);
  EXPECT_DOUBLE_EQ(ctx.local_rank(1, 2), 0.0);
  EXPECT_DOUBLE_EQ(ctx.local_rank(4, 2), -1.0);
  for (const auto& [n, v] : ctx.activity) EXPECT_EQ(v.size(), reg.sc.size());
}
