#include <gtest/gtest.h>

#include <thread>

#include "fcbgp/binding.hpp"
#include "support.hpp"

using namespace fcbgp;
using namespace fcbgp::test;

// Traffic from S=5 (owns src) to O=1 (owns dst) along 5 -> 4 -> 3 -> 2 -> 1.
class Binding : public ::testing::Test {
protected:
    void SetUp() override {
        w.add(1, true, {dst});
        for (std::uint32_t a = 2; a <= 4; ++a) w.add(a, true);
        w.add(5, true, {src});
        w.add(9, true);
        w.add(8, false);
    }
    ForwardingCommitment fc(std::uint32_t p, std::uint32_t c, std::uint32_t n) {
        return sign_fc(w.signer(c), {as(p), as(c), as(n), dst});
    }
    // Source hop first, as the issuer lists them.
    std::vector<ForwardingCommitment> route() { return {fc(3, 4, 5), fc(2, 3, 4), fc(1, 2, 3), fc(0, 1, 2)}; }
    BindingMessage onpath(std::int32_t ver = 1) { return make_onpath_binding(w.signer(5), src, dst, route(), ver, 0, w.trust); }

    World w;
    Prefix src = pfx("10.5.0.0/16");
    Prefix dst = pfx("10.1.0.0/16");
};

TEST_F(Binding, EncodeDecodeRoundTrip) {
    for (const auto& m : {onpath(), make_offpath_binding(w.signer(5), src, dst, 3, 0, w.trust),
                          make_withdrawal(w.signer(5), src, dst, 4, w.trust)}) {
        EXPECT_EQ(decode_binding(encode_binding(m)), m);
    }
    auto bytes = encode_binding(onpath());
    bytes.pop_back();
    EXPECT_THROW(decode_binding(bytes), Error);
}

TEST_F(Binding, IssuerMustOwnSource) {
    try {
        make_onpath_binding(w.signer(4), src, dst, route(), 1, 0, w.trust);
        ADD_FAILURE();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::kOwnership);
    }
}

TEST_F(Binding, OnPathAsesAcceptAndLearnInbound) {
    const auto m = onpath();
    const std::map<std::uint32_t, std::uint32_t> inbound{{4, 5}, {3, 4}, {2, 3}, {1, 2}};
    for (auto [self, expect] : inbound) {
        const auto out = verify_binding(m, as(self), w.trust);
        ASSERT_EQ(out.kind, VerifyOutcome::Kind::kAcceptedOnPath) << self;
        RuleTable t(as(self));
        EXPECT_EQ(t.install_filter(m, out), InstallResult::kInstalled);
        EXPECT_EQ(t.rule(src, dst)->expected_inbound, as(expect));
        EXPECT_TRUE(t.check_packet(src, dst, as(expect)).forward);
        const auto v = t.check_packet(src, dst, as(9));
        EXPECT_FALSE(v.forward);
        EXPECT_EQ(v.reason, "wrong-inbound");
        EXPECT_TRUE(t.check_packet(pfx("10.9.0.0/16"), dst, as(9)).forward);
    }
}

TEST_F(Binding, RejectionReasons) {
    auto m = onpath();
    EXPECT_EQ(verify_binding(m, as(9), w.trust).reason, RejectReason::kNoSelfFc);
    auto tampered = m;
    tampered.dst_prefix = pfx("10.2.0.0/16");
    EXPECT_EQ(verify_binding(tampered, as(3), w.trust).reason, RejectReason::kBadSignature);

    auto fcs = route();
    fcs[1].signature[3] ^= 1;
    EXPECT_THROW(make_onpath_binding(w.signer(5), src, dst, fcs, 2, 0, w.trust), Error);

    // A valid signature by a non-owner.
    w.add(20, true);
    BindingMessage forged = m;
    forged.issuer = as(20);
    forged.signature = w.signer(20).sign(binding_signing_bytes(forged));
    EXPECT_EQ(verify_binding(forged, as(3), w.trust).reason, RejectReason::kNotOwner);
}

TEST_F(Binding, OffPathDiscardsEverywhere) {
    const auto m = make_offpath_binding(w.signer(5), src, dst, 1, 0, w.trust);
    EXPECT_TRUE(m.off_path());
    const auto out = verify_binding(m, as(9), w.trust);
    EXPECT_EQ(out.kind, VerifyOutcome::Kind::kAcceptedOffPath);
    RuleTable t(as(9));
    t.install_filter(m, out);
    EXPECT_EQ(t.check_packet(src, dst, as(3)).reason, "off-path");
}

TEST_F(Binding, VersionOrderingAndConflict) {
    RuleTable t(as(3));
    const auto v1 = onpath(1);
    const auto v2 = onpath(2);
    EXPECT_EQ(t.install_filter(v1, verify_binding(v1, as(3), w.trust)), InstallResult::kInstalled);
    EXPECT_EQ(t.install_filter(v1, verify_binding(v1, as(3), w.trust)), InstallResult::kStale);
    EXPECT_EQ(t.install_filter(v2, verify_binding(v2, as(3), w.trust)), InstallResult::kReplaced);
    EXPECT_EQ(t.install_filter(v1, verify_binding(v1, as(3), w.trust)), InstallResult::kStale);
    const auto off2 = make_offpath_binding(w.signer(5), src, dst, 2, 0, w.trust);
    EXPECT_EQ(t.install_filter(off2, verify_binding(off2, as(3), w.trust)), InstallResult::kConflict);
    EXPECT_EQ(t.rule(src, dst)->mode, FilterRule::Mode::kOnPath);
}

TEST_F(Binding, WithdrawalLeavesTombstone) {
    RuleTable t(as(3));
    const auto v1 = onpath(1);
    t.install_filter(v1, verify_binding(v1, as(3), w.trust));
    const auto wd = make_withdrawal(w.signer(5), src, dst, 2, w.trust);
    EXPECT_EQ(rule_version(wd), (RuleVersion{2, 0}));
    EXPECT_EQ(t.install_filter(wd, verify_binding(wd, as(3), w.trust)), InstallResult::kRemoved);
    EXPECT_TRUE(t.check_packet(src, dst, as(9)).forward);
    // A delayed copy of the withdrawn binding must not come back.
    EXPECT_EQ(t.install_filter(v1, verify_binding(v1, as(3), w.trust)), InstallResult::kStale);
    const auto v3 = onpath(3);
    EXPECT_EQ(t.install_filter(v3, verify_binding(v3, as(3), w.trust)), InstallResult::kReplaced);
    EXPECT_FALSE(t.check_packet(src, dst, as(9)).forward);
}

TEST_F(Binding, LocalRuleRequiresLocalOrigin) {
    RuleTable t(as(5));
    t.install_local(onpath());
    EXPECT_TRUE(t.check_packet(src, dst, as(5)).forward);
    EXPECT_FALSE(t.check_packet(src, dst, as(4)).forward);
}

TEST_F(Binding, SubversionByOnPathAs) {
    const auto original = onpath(4);
    // AS 3 moves to 3 -> 9 -> 1.
    const std::vector<ForwardingCommitment> tail{fc(9, 3, 4), fc(1, 9, 3), fc(0, 1, 9)};
    const auto sub = subversion_update(w.signer(3), original, tail);
    EXPECT_EQ(sub.ver, 4);
    EXPECT_EQ(sub.ver_sub, 1u);
    EXPECT_EQ(sub.issuer, as(3));
    ASSERT_EQ(sub.fc_list.size(), 4u);
    EXPECT_EQ(sub.fc_list[0], original.fc_list[0]);
    EXPECT_TRUE(sub.fc_list[1].same_tuple(as(9), as(3), as(4)));

    RuleTable at9(as(9));
    const auto out = verify_binding(sub, as(9), w.trust);
    ASSERT_TRUE(out.accepted()) << out.to_string();
    EXPECT_EQ(at9.install_filter(sub, out), InstallResult::kInstalled);
    EXPECT_EQ(at9.rule(src, dst)->expected_inbound, as(3));

    RuleTable at4(as(4));
    at4.install_filter(original, verify_binding(original, as(4), w.trust));
    EXPECT_EQ(at4.install_filter(sub, verify_binding(sub, as(4), w.trust)), InstallResult::kReplaced);
    EXPECT_THROW(subversion_update(w.signer(9), original, tail), Error);
}

TEST_F(Binding, StartupBindingSkipsFcVerification) {
    const auto m = make_startup_binding(w.signer(5), src, dst, path({1, 2, 3, 4}), w.trust);
    EXPECT_TRUE(m.startup());
    ASSERT_EQ(m.fc_list.size(), 4u);
    EXPECT_TRUE(m.fc_list[0].same_tuple(as(3), as(4), as(5)));
    EXPECT_TRUE(m.fc_list[3].same_tuple(kNullAs, as(1), as(2)));
    const auto out = verify_binding(m, as(2), w.trust);
    ASSERT_EQ(out.kind, VerifyOutcome::Kind::kAcceptedOnPath);
    RuleTable t(as(2));
    t.install_filter(m, out);
    EXPECT_EQ(t.rule(src, dst)->expected_inbound, as(3));
    const auto v1 = onpath(1);
    EXPECT_EQ(t.install_filter(v1, verify_binding(v1, as(2), w.trust)), InstallResult::kReplaced);
}

TEST_F(Binding, ConcurrentReadersSeeWholeRules) {
    RuleTable t(as(3));
    const auto a = onpath(1);
    t.install_filter(a, verify_binding(a, as(3), w.trust));
    std::vector<BindingMessage> versions;
    for (int v = 2; v < 40; ++v) versions.push_back(v % 2 == 0 ? make_offpath_binding(w.signer(5), src, dst, v, 0, w.trust) : onpath(v));
    std::atomic<bool> bad{false};
    std::atomic<bool> done{false};
    std::thread reader([&] {
        while (!done) {
            const auto r = t.rule(src, dst);
            if (!r) continue;
            const bool off_even = (r->mode == FilterRule::Mode::kOffPath) == (r->version.ver % 2 == 0);
            if (!off_even && r->version.ver != 1) bad = true;
        }
    });
    for (const auto& m : versions) t.install_filter(m, verify_binding(m, as(3), w.trust));
    done = true;
    reader.join();
    EXPECT_FALSE(bad);
    EXPECT_EQ(t.rule(src, dst)->version.ver, 39);
}
