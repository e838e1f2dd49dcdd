#include <gtest/gtest.h>

#include "fcbgp/crypto.hpp"
#include "support.hpp"

using namespace fcbgp;
using fcbgp::test::pfx;

TEST(Prefix, ParsesAndPrintsV4) {
    const auto p = pfx("10.0.0.0/24");
    EXPECT_EQ(p.family(), Prefix::Family::kV4);
    EXPECT_EQ(p.length(), 24);
    EXPECT_EQ(p.to_string(), "10.0.0.0/24");
    EXPECT_EQ(p, Prefix::v4(10, 0, 0, 0, 24));
}

TEST(Prefix, CanonicalisesHostBits) {
    EXPECT_EQ(pfx("10.1.2.3/16").to_string(), "10.1.0.0/16");
    EXPECT_EQ(pfx("10.1.2.3/16"), pfx("10.1.0.0/16"));
}

TEST(Prefix, ParsesV6) {
    const auto p = pfx("2001:db8::/32");
    EXPECT_EQ(p.family(), Prefix::Family::kV6);
    EXPECT_EQ(p.length(), 32);
    EXPECT_EQ(p.address()[0], 0x20);
    EXPECT_EQ(p.address()[1], 0x01);
    EXPECT_EQ(p.address()[2], 0x0d);
    EXPECT_EQ(p.address()[3], 0xb8);
}

TEST(Prefix, RejectsGarbage) {
    for (const char* bad : {"", "10.0.0.0", "10.0.0.0/33", "300.0.0.0/8", "10.0.0/8", "x/8"}) {
        try {
            Prefix::parse(bad);
            ADD_FAILURE() << "accepted " << bad;
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::kParse) << bad;
        }
    }
}

TEST(Hex, RoundTrips) {
    const Bytes b{0x00, 0x7f, 0x80, 0xff};
    EXPECT_EQ(to_hex(b), "007f80ff");
    EXPECT_EQ(from_hex("007F80ff"), b);
    EXPECT_THROW(from_hex("abc"), Error);
    EXPECT_THROW(from_hex("zz"), Error);
}

TEST(Sha256, KnownVectors) {
    const std::string abc = "abc";
    const auto d = sha256(ByteView(reinterpret_cast<const std::uint8_t*>(abc.data()), abc.size()));
    EXPECT_EQ(to_hex(d), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    EXPECT_EQ(to_hex(sha256({})), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(Ed25519, SignVerifyAndTamper) {
    const auto& s = default_scheme();
    const auto kp = derive_keypair(s, AsNumber(65001), 3);
    const Bytes msg{1, 2, 3, 4};
    const auto sig = s.sign(kp.secret_key, msg);
    EXPECT_EQ(sig.size(), 64u);
    EXPECT_TRUE(s.verify(kp.public_key, sig, msg));
    Bytes other = msg;
    other[0] ^= 1;
    EXPECT_FALSE(s.verify(kp.public_key, sig, other));
    auto bad = sig;
    bad[10] ^= 0x40;
    EXPECT_FALSE(s.verify(kp.public_key, bad, msg));
}

TEST(Ed25519, DerivedKeysAreDeterministicPerAsAndSeed) {
    const auto& s = default_scheme();
    EXPECT_EQ(derive_keypair(s, AsNumber(7), 1).public_key, derive_keypair(s, AsNumber(7), 1).public_key);
    EXPECT_NE(derive_keypair(s, AsNumber(7), 1).public_key, derive_keypair(s, AsNumber(8), 1).public_key);
    EXPECT_NE(derive_keypair(s, AsNumber(7), 1).public_key, derive_keypair(s, AsNumber(7), 2).public_key);
}

TEST(Parsing, U32Bounds) {
    EXPECT_EQ(parse_u32("4294967295", "x"), 4294967295u);
    EXPECT_THROW(parse_u32("4294967296", "x"), Error);
    EXPECT_THROW(parse_u32("-1", "x"), Error);
    EXPECT_THROW(parse_u32("12a", "x"), Error);
}
