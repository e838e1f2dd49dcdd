#include <gtest/gtest.h>

#include <deque>

#include "fcbgp/sync.hpp"
#include "support.hpp"

using namespace fcbgp;
using namespace fcbgp::test;

namespace {

BindingVersionView bvv(std::initializer_list<std::pair<std::uint32_t, std::int32_t>> e) {
    BindingVersionView v;
    for (auto [a, ver] : e) v.entries[as(a)] = ver;
    return v;
}

Prefix own_prefix(std::uint32_t asn) { return Prefix::v4(10, static_cast<std::uint8_t>(asn), 0, 0, 16); }

// One region; envelopes are delivered FIFO with no loss.
struct Region {
    World w;
    std::vector<AsNumber> members;
    std::map<AsNumber, std::unique_ptr<SyncNode>> nodes;
    std::deque<std::pair<AsNumber, Envelope>> q;
    std::vector<SyncMessage> sent;

    explicit Region(std::size_t n, std::map<std::uint32_t, SyncBehavior> behaviors = {}) {
        for (std::uint32_t a = 1; a <= n; ++a) {
            w.add(a, true, {own_prefix(a)});
            members.push_back(as(a));
        }
        for (auto m : members) {
            auto it = behaviors.find(m.value);
            nodes[m] = std::make_unique<SyncNode>(m, members, std::vector<AsNumber>{}, w.trust,
                                                  it == behaviors.end() ? SyncBehavior::kHonest : it->second);
        }
    }
    BindingMessage binding(std::uint32_t issuer, std::int32_t ver) {
        return make_offpath_binding(w.signer(issuer), own_prefix(issuer), Prefix::v4(192, 168, 0, 0, 16), ver, 0,
                                    w.trust);
    }
    void push(AsNumber from, std::vector<Envelope> out) {
        for (auto& e : out) q.emplace_back(from, std::move(e));
    }
    void round(std::uint64_t r) {
        for (auto m : members) push(m, nodes[m]->on_round(r));
        while (!q.empty()) {
            auto [from, env] = std::move(q.front());
            q.pop_front();
            sent.push_back(env.msg);
            push(env.to, nodes[env.to]->on_message(env.msg));
        }
    }
};

}  // namespace

TEST(Bvv, EncodingIsCountThenPairs) {
    const auto v = bvv({{1, 3}, {258, 7}});
    const Bytes expected{0, 0, 0, 2, 0, 0, 0, 1, 0, 0, 0, 3, 0, 0, 1, 2, 0, 0, 0, 7};
    EXPECT_EQ(encode_bvv(v), expected);
    EXPECT_EQ(decode_bvv(expected), v);
    EXPECT_EQ(format_bvv(v), "{1:3,258:7}");
    EXPECT_THROW(decode_bvv(Bytes{0, 0, 0, 1, 0}), Error);
}

TEST(Sync, LeaderRotation) {
    const auto m = path({10, 20, 30});
    EXPECT_EQ(leader_for_round(0, m), as(10));
    EXPECT_EQ(leader_for_round(4, m), as(20));
    EXPECT_EQ(leader_for_round(8, m), as(30));
}

TEST(Sync, ReconcileExamples) {
    const auto acts = reconcile(bvv({{1, 2}, {2, 5}, {3, 1}}), bvv({{1, 4}, {2, 5}, {4, 1}}), as(9), as(7));
    ASSERT_EQ(acts.size(), 3u);
    EXPECT_EQ(acts[0], (SyncAction{SyncAction::Kind::kRequestMissing, as(1), 3, 4, as(7)}));
    EXPECT_EQ(acts[1], (SyncAction{SyncAction::Kind::kSendNewer, as(3), 1, 1, as(7)}));
    EXPECT_EQ(acts[2], (SyncAction{SyncAction::Kind::kRequestMissing, as(4), 1, 1, as(7)}));
    EXPECT_TRUE(reconcile(bvv({{1, 2}}), bvv({{1, 2}}), as(9), as(7)).empty());
}

TEST(Sync, MessageCodecRoundTrip) {
    SyncMessage m{SyncKind::kEcho, 0x0102030405060708ull, as(3), as(4), encode_bvv(bvv({{1, 1}}))};
    const auto bytes = encode_sync(m);
    EXPECT_EQ(bytes[0], 2);
    EXPECT_EQ(bytes.size(), 1u + 8 + 4 + 4 + 4 + m.payload.size());
    const auto back = decode_sync(bytes);
    EXPECT_EQ(back.kind, m.kind);
    EXPECT_EQ(back.round, m.round);
    EXPECT_EQ(back.payload, m.payload);
    auto bad = bytes;
    bad[0] = 9;
    EXPECT_THROW(decode_sync(bad), Error);
    const auto r = decode_request(encode_request({as(5), 2, 9}));
    EXPECT_EQ(r.issuer, as(5));
    EXPECT_EQ(r.from, 2);
    EXPECT_EQ(r.to, 9);
}

TEST(Sync, ViewTracksContiguousVersions) {
    Region g(4);
    auto& n = *g.nodes[as(1)];
    EXPECT_TRUE(n.store_binding(g.binding(2, 1)));
    EXPECT_TRUE(n.store_binding(g.binding(2, 3)));
    EXPECT_EQ(n.view().get(as(2)), 1);
    EXPECT_TRUE(n.store_binding(g.binding(2, 2)));
    EXPECT_EQ(n.view().get(as(2)), 3);
    EXPECT_FALSE(n.store_binding(g.binding(2, 2)));
    auto forged = g.binding(2, 4);
    forged.signature[0] ^= 1;
    EXPECT_FALSE(n.store_binding(forged));
}

TEST(Sync, RoundRepairsBothDirections) {
    Region g(4);
    for (std::int32_t v = 1; v <= 3; ++v) g.nodes[as(1)]->store_binding(g.binding(1, v));
    g.nodes[as(3)]->store_binding(g.binding(3, 1));
    g.round(0);  // leader 1
    for (auto m : g.members) {
        EXPECT_EQ(g.nodes[m]->view().get(as(1)), 3) << m.value;
        EXPECT_TRUE(g.nodes[m]->delivered_rounds().contains(0));
    }
    EXPECT_EQ(g.nodes[as(1)]->view().get(as(3)), 1);
    g.round(1);  // newer versions flow to leader 2
    EXPECT_EQ(g.nodes[as(2)]->view(), g.nodes[as(1)]->view());
    g.round(2);  // and from its view to everyone
    for (auto m : g.members) EXPECT_EQ(g.nodes[m]->view(), g.nodes[as(1)]->view());
}

TEST(Sync, ConsistencyPayloadsAreViewsOnly) {
    Region g(4);
    for (std::int32_t v = 1; v <= 5; ++v) g.nodes[as(2)]->store_binding(g.binding(2, v));
    g.round(0);
    g.round(1);
    std::size_t checks = 0;
    for (const auto& m : g.sent) {
        if (!is_consistency_check(m.kind)) continue;
        ++checks;
        const auto v = decode_bvv(m.payload);
        EXPECT_EQ(encode_bvv(v), m.payload);
        EXPECT_EQ(m.payload.size(), 4 + 8 * v.entries.size());
    }
    EXPECT_GT(checks, 0u);
}

TEST(Sync, SilentLeaderRoundIsSkipped) {
    Region g(4, {{1, SyncBehavior::kSilent}});
    g.nodes[as(2)]->store_binding(g.binding(2, 1));
    g.round(0);
    EXPECT_FALSE(g.nodes[as(3)]->delivered_rounds().contains(0));
    g.round(1);
    EXPECT_EQ(g.nodes[as(3)]->view().get(as(2)), 1);
    EXPECT_EQ(g.nodes[as(4)]->view().get(as(2)), 1);
}

TEST(Sync, EquivocatingLeaderCannotSplitHonestNodes) {
    Region g(4, {{1, SyncBehavior::kEquivocate}});
    g.nodes[as(1)]->store_binding(g.binding(1, 1));
    g.round(0);
    std::optional<bool> delivered;
    for (std::uint32_t a = 2; a <= 4; ++a) {
        const bool d = g.nodes[as(a)]->delivered_rounds().contains(0);
        if (delivered) { EXPECT_EQ(*delivered, d); }
        delivered = d;
    }
}

TEST(Sync, LyingViewLeaderLeavesViewsUntouched) {
    Region g(4, {{1, SyncBehavior::kLyingView}});
    g.nodes[as(2)]->store_binding(g.binding(2, 1));
    g.round(0);
    for (std::uint32_t a = 2; a <= 4; ++a) {
        // Requests for phantom versions go unanswered; nothing invented.
        for (const auto& [issuer, ver] : g.nodes[as(a)]->view().entries) {
            EXPECT_LE(ver, issuer == as(2) ? 1 : 0);
        }
    }
    g.round(1);
    g.round(2);
    EXPECT_EQ(g.nodes[as(3)]->view().get(as(2)), 1);
    EXPECT_EQ(g.nodes[as(4)]->view().get(as(2)), 1);
}

TEST(Sync, NodeMustBeInItsRegion) {
    World w;
    w.add(1, true);
    EXPECT_THROW(SyncNode(as(1), path({2, 3}), {}, w.trust), Error);
}
