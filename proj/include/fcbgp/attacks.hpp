#pragma once

#include "fcbgp/analysis.hpp"
#include "fcbgp/simulator.hpp"

namespace fcbgp {

/// Every simple AS sequence of at most `max_len` ASes that ends at the
/// adversary (and avoids the victim) is announced to `victim` with the
/// best FC list the adversary can assemble: pooled FCs matching the claimed
/// pathlets plus its own FC for the last hop. Returns the sequences the
/// victim classifies as Trusted, origin first, adversary last.
std::vector<std::vector<AsNumber>> splice_attack_search(
    AsNumber adversary, const Signer& adversary_key, const std::set<ForwardingCommitment>& pool,
    const Prefix& prefix, AsNumber victim, std::span<const AsNumber> universe, std::size_t max_len,
    const TrustBase& trust);

struct LineHijack {
    std::size_t n = 6;  // A_1..A_n, A_1 originates, A_n is the victim
    std::size_t k = 2;  // A_1..A_{k-1} and A_n deployed
    std::size_t l = 1;  // attacker distance from A_n
    bool exhaustive = false;  // also try every other attachment point
    std::uint64_t seed = 1;
};

struct HijackOutcome {
    bool hijacked = false;
    std::vector<AsNumber> victim_path;  // A_n's selected path after the attack
    PathClass victim_class = PathClass::kLegacy;
    std::vector<AsNumber> claimed;      // fake path of the winning (or best) attempt
};

/// Line A_1..A_n (ASN i) with the attacker (ASN 200) reaching A_n through
/// l-1 legacy transit ASes (ASNs 101..). After convergence the attacker
/// announces A_1..A_j, attacker with every FC it observed; j = k by
/// default (clamped to n-1), every j in exhaustive mode. Hijacked when
/// A_n's best path runs through the attacker.
HijackOutcome hijack_attempt(const LineHijack& setup);

/// Linear unwanted-traffic instance: A_0..A_n (ASN k+1), flow
/// (P_{A_n}, P_{A_0}), D_k neighbors each, flags t_k.
struct TrafficInstance {
    std::vector<int> degrees;
    std::vector<bool> deployed;
};

struct TrafficUnits {
    long total = 0;
    long discarded = 0;
    long survived = 0;
    std::vector<PacketOutcome> packets;
    std::vector<std::string> kinds;  // per packet: off-path, on-path-spoof, re-entry
};

/// Builds the instance in the simulator (bridges are legacy leaf ASes),
/// has A_n bind the pair to its route, then injects one unit per bridge,
/// one spoofed unit from each A_1..A_n into its downstream neighbor and one
/// re-entering unit at A_0 from A_1.
TrafficUnits inject_unwanted_traffic(const TrafficInstance& inst, std::uint64_t seed = 1);

}  // namespace fcbgp
