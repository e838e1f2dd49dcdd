#include "fcbgp/attacks.hpp"

#include <algorithm>

namespace fcbgp {

std::vector<std::vector<AsNumber>> splice_attack_search(
    AsNumber adversary, const Signer& adversary_key, const std::set<ForwardingCommitment>& pool,
    const Prefix& prefix, AsNumber victim, std::span<const AsNumber> universe, std::size_t max_len,
    const TrustBase& trust) {
    if (adversary_key.asn() != adversary) {
        throw Error(ErrorCode::kSignerMismatch, "adversary key belongs to another AS");
    }
    std::vector<AsNumber> others;
    for (auto a : universe) {
        if (a != adversary && a != victim) others.push_back(a);
    }
    std::sort(others.begin(), others.end());
    others.erase(std::unique(others.begin(), others.end()), others.end());

    // Pool indexed by tuple so each pathlet lookup is a range scan.
    std::map<std::tuple<AsNumber, AsNumber, AsNumber>, std::vector<const ForwardingCommitment*>> by_tuple;
    for (const auto& fc : pool) by_tuple[{fc.previous, fc.current, fc.next}].push_back(&fc);

    VerifyCache verifier(trust);
    std::vector<std::vector<AsNumber>> accepted;
    std::vector<AsNumber> seq;
    std::vector<bool> used(others.size(), false);
    std::map<AsNumber, ForwardingCommitment> own_fcs;

    auto evaluate = [&] {
        std::vector<AsNumber> path = seq;
        path.push_back(adversary);
        std::vector<ForwardingCommitment> fcs;
        for (std::size_t i = 0; i + 1 < path.size(); ++i) {
            const AsNumber prev = i == 0 ? kNullAs : path[i - 1];
            auto it = by_tuple.find({prev, path[i], path[i + 1]});
            if (it == by_tuple.end()) continue;
            for (const auto* fc : it->second) {
                if (verifier.verify(*fc, prefix)) {
                    fcs.push_back(*fc);
                    break;
                }
            }
        }
        const AsNumber prev = path.size() >= 2 ? path[path.size() - 2] : kNullAs;
        auto own = own_fcs.find(prev);
        if (own == own_fcs.end()) {
            own = own_fcs.emplace(prev, sign_fc(adversary_key, {prev, adversary, victim, prefix})).first;
        }
        fcs.push_back(own->second);
        if (classify_path(path, fcs, prefix, victim, verifier) == PathClass::kTrusted) {
            accepted.push_back(std::move(path));
        }
    };

    auto dfs = [&](auto&& self) -> void {
        evaluate();
        if (seq.size() + 1 >= max_len) return;
        for (std::size_t i = 0; i < others.size(); ++i) {
            if (used[i]) continue;
            used[i] = true;
            seq.push_back(others[i]);
            self(self);
            seq.pop_back();
            used[i] = false;
        }
    };
    if (max_len >= 1) dfs(dfs);
    std::sort(accepted.begin(), accepted.end());
    return accepted;
}

namespace {

constexpr std::uint32_t kAttackerAsn = 200;
constexpr std::uint32_t kTransitBase = 100;

HijackOutcome run_line_attack(const LineHijack& s, std::size_t attach) {
    TrustBase trust;
    KeyStore keys;
    const Prefix prefix = Prefix::v4(10, 0, 0, 0, 24);
    auto add = [&](std::uint32_t asn, bool deployed, std::set<Prefix> prefixes = {}) {
        TrustRecord rec;
        rec.asn = AsNumber(asn);
        rec.deployed = deployed;
        rec.prefixes = std::move(prefixes);
        if (deployed) {
            auto kp = derive_keypair(trust.scheme(), rec.asn, s.seed);
            rec.public_key = kp.public_key;
            keys.put(rec.asn, kp.secret_key);
        }
        trust.add(std::move(rec));
    };
    for (std::uint32_t i = 1; i <= s.n; ++i) {
        const bool deployed = i < s.k || i == s.n;
        add(i, deployed, i == 1 ? std::set<Prefix>{prefix} : std::set<Prefix>{});
    }
    for (std::uint32_t j = 1; j < s.l; ++j) add(kTransitBase + j, false);
    add(kAttackerAsn, false);

    SimConfig cfg;
    cfg.seed = s.seed;
    Simulator sim(trust, keys, cfg);
    for (const auto& [asn, _] : trust.records()) sim.add_as(asn);
    for (std::uint32_t i = 1; i < s.n; ++i) sim.add_link(AsNumber(i), AsNumber(i + 1));
    AsNumber prev(static_cast<std::uint32_t>(s.n));
    for (std::uint32_t j = 1; j < s.l; ++j) {
        sim.add_link(prev, AsNumber(kTransitBase + j));
        prev = AsNumber(kTransitBase + j);
    }
    sim.add_link(prev, AsNumber(kAttackerAsn));
    sim.originate(AsNumber(1), prefix, 0);
    sim.run();

    FakePathScript script;
    script.actor = AsNumber(kAttackerAsn);
    script.prefix = prefix;
    for (std::uint32_t i = 1; i <= attach; ++i) script.claimed.emplace_back(i);
    sim.fake_path(script, sim.now() + 1);
    sim.run();

    HijackOutcome out;
    out.claimed = script.claimed;
    out.claimed.push_back(script.actor);
    const RibEntry* best = sim.speaker(AsNumber(static_cast<std::uint32_t>(s.n))).best(prefix);
    if (best != nullptr) {
        out.victim_path = best->as_path;
        out.victim_class = best->classification;
        out.hijacked = std::find(best->as_path.begin(), best->as_path.end(), script.actor) != best->as_path.end();
    }
    return out;
}

}  // namespace

HijackOutcome hijack_attempt(const LineHijack& setup) {
    if (setup.n < 3 || setup.k < 1 || setup.k > setup.n || setup.l < 1) {
        throw Error(ErrorCode::kInvalidArgument, "line hijack needs n >= 3, 1 <= k <= n, l >= 1");
    }
    const std::size_t best_attach = std::min(setup.k, setup.n - 1);
    HijackOutcome out = run_line_attack(setup, best_attach);
    if (out.hijacked || !setup.exhaustive) return out;
    for (std::size_t j = 1; j < setup.n; ++j) {
        if (j == best_attach) continue;
        auto alt = run_line_attack(setup, j);
        if (alt.hijacked) return alt;
    }
    return out;
}

TrafficUnits inject_unwanted_traffic(const TrafficInstance& inst, std::uint64_t seed) {
    filtering_count(inst.degrees, inst.deployed);  // validates the instance
    const std::size_t n = inst.degrees.size() - 1;
    auto as_of = [](std::size_t k) { return AsNumber(static_cast<std::uint32_t>(k + 1)); };
    auto prefix_of = [](std::size_t k) { return Prefix::v4(10, static_cast<std::uint8_t>(k), 0, 0, 16); };
    auto bridges_of = [&](std::size_t k) {
        const int d = inst.degrees[k];
        return static_cast<std::size_t>(k == 0 || k == n ? d - 1 : d - 2);
    };
    auto bridge_as = [](std::size_t k, std::size_t j) {
        return AsNumber(static_cast<std::uint32_t>(1000 + 10 * k + j));
    };

    TrustBase trust;
    KeyStore keys;
    std::optional<Signer> source_key;
    for (std::size_t k = 0; k <= n; ++k) {
        TrustRecord rec;
        rec.asn = as_of(k);
        rec.deployed = inst.deployed[k];
        rec.prefixes = {prefix_of(k)};
        // The source signs its binding whether or not it filters.
        if (rec.deployed || k == n) {
            auto kp = derive_keypair(trust.scheme(), rec.asn, seed);
            rec.public_key = kp.public_key;
            if (rec.deployed) keys.put(rec.asn, kp.secret_key);
            if (k == n) source_key.emplace(rec.asn, kp.secret_key, trust.scheme());
        }
        trust.add(std::move(rec));
        for (std::size_t j = 0; j < bridges_of(k); ++j) trust.add({bridge_as(k, j), {}, {}, false});
    }

    SimConfig cfg;
    cfg.seed = seed;
    cfg.auto_subversion = false;
    Simulator sim(trust, keys, cfg);
    for (const auto& [asn, _] : trust.records()) sim.add_as(asn);
    for (std::size_t k = 0; k < n; ++k) sim.add_link(as_of(k), as_of(k + 1));
    for (std::size_t k = 0; k <= n; ++k) {
        for (std::size_t j = 0; j < bridges_of(k); ++j) sim.add_link(as_of(k), bridge_as(k, j));
    }
    const Prefix src = prefix_of(n);
    const Prefix dst = prefix_of(0);
    sim.originate(as_of(0), dst, 0);
    sim.run();

    const RibEntry* route = sim.speaker(as_of(n)).best(dst);
    if (route == nullptr) throw Error(ErrorCode::kInvalidArgument, "source has no route to the destination");
    std::vector<ForwardingCommitment> fcs(route->fcs.rbegin(), route->fcs.rend());
    sim.publish_binding(make_onpath_binding(*source_key, src, dst, std::move(fcs), 1, 0, trust), sim.now() + 1);
    sim.run();

    TrafficUnits units;
    std::vector<std::uint64_t> ids;
    const long at = sim.now() + 1;
    for (std::size_t k = 0; k <= n; ++k) {
        for (std::size_t j = 0; j < bridges_of(k); ++j) {
            ids.push_back(sim.inject_packet(src, dst, as_of(k), bridge_as(k, j), at));
            units.kinds.push_back("off-path");
        }
    }
    for (std::size_t k = 1; k <= n; ++k) {
        ids.push_back(sim.inject_packet(src, dst, as_of(k - 1), as_of(k), at));
        units.kinds.push_back("on-path-spoof");
    }
    ids.push_back(sim.inject_packet(src, dst, as_of(0), as_of(1), at));
    units.kinds.push_back("re-entry");
    sim.run();

    for (auto id : ids) {
        const auto& p = sim.packet(id);
        units.packets.push_back(p);
        ++units.total;
        if (p.status == "discarded") {
            ++units.discarded;
        } else {
            ++units.survived;
        }
    }
    return units;
}

}  // namespace fcbgp
