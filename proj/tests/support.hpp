#pragma once

#include "fcbgp/trust_base.hpp"

namespace fcbgp::test {

inline Prefix pfx(const char* text) { return Prefix::parse(text); }
inline AsNumber as(std::uint32_t v) { return AsNumber(v); }

inline std::vector<AsNumber> path(std::initializer_list<std::uint32_t> v) {
    std::vector<AsNumber> out;
    for (auto x : v) out.emplace_back(x);
    return out;
}

// Trust base plus private keys; deployed ASes get keys derived from `seed`.
struct World {
    TrustBase trust;
    KeyStore keys;
    std::uint64_t seed = 11;

    void add(std::uint32_t asn, bool deployed, std::set<Prefix> prefixes = {}, bool keyed_legacy = false) {
        TrustRecord rec;
        rec.asn = AsNumber(asn);
        rec.deployed = deployed;
        rec.prefixes = std::move(prefixes);
        if (deployed || keyed_legacy) {
            auto kp = derive_keypair(trust.scheme(), rec.asn, seed);
            rec.public_key = kp.public_key;
            keys.put(rec.asn, kp.secret_key);
        }
        trust.add(std::move(rec));
    }
    Signer signer(std::uint32_t asn) const { return *keys.signer(AsNumber(asn)); }
};

}  // namespace fcbgp::test
