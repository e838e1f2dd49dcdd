#include "fcbgp/control_plane.hpp"

#include <algorithm>
#include <sstream>

namespace fcbgp {

const char* to_string(PathClass c) {
    switch (c) {
        case PathClass::kTrusted: return "Trusted";
        case PathClass::kPartiallyTrusted: return "PartiallyTrusted";
        case PathClass::kLegacy: return "Legacy";
        case PathClass::kSuspicious: return "Suspicious";
    }
    return "?";
}

PathClass parse_path_class(std::string_view text) {
    for (auto c : {PathClass::kTrusted, PathClass::kPartiallyTrusted, PathClass::kLegacy,
                   PathClass::kSuspicious}) {
        if (text == to_string(c)) return c;
    }
    throw Error(ErrorCode::kParse, "unknown path class '" + std::string(text) + "'");
}

const char* to_string(Relationship r) {
    switch (r) {
        case Relationship::kNone: return "none";
        case Relationship::kCustomer: return "customer";
        case Relationship::kPeer: return "peer";
        case Relationship::kProvider: return "provider";
    }
    return "?";
}

PathClass classify_path(std::span<const AsNumber> as_path,
                        std::span<const ForwardingCommitment> fcs, const Prefix& prefix,
                        AsNumber self, VerifyCache& verifier) {
    const std::size_t n = as_path.size();
    if (n == 0 || fcs.size() > n) return PathClass::kSuspicious;
    const TrustBase& trust = verifier.trust();
    if (auto owner = trust.lookup_owner(prefix); owner && *owner != as_path.front()) {
        return PathClass::kSuspicious;
    }

    auto pathlet_at = [&](std::size_t i) {
        return std::array<AsNumber, 3>{i == 0 ? kNullAs : as_path[i - 1], as_path[i],
                                       i + 1 < n ? as_path[i + 1] : self};
    };

    std::vector<bool> covered(n, false);
    for (const auto& fc : fcs) {
        bool matched = false;
        for (std::size_t i = 0; i < n; ++i) {
            const auto t = pathlet_at(i);
            if (fc.same_tuple(t[0], t[1], t[2])) {
                if (!verifier.verify(fc, prefix)) return PathClass::kSuspicious;
                covered[i] = true;
                matched = true;
            }
        }
        if (!matched) return PathClass::kSuspicious;
    }

    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (covered[i]) {
            ++count;
        } else if (trust.is_deployed(as_path[i])) {
            return PathClass::kSuspicious;
        }
    }
    if (count == 0) return PathClass::kLegacy;
    if (count == n) return PathClass::kTrusted;
    for (std::size_t i = 0; i < count; ++i) {
        if (!covered[i]) return PathClass::kSuspicious;
    }
    return PathClass::kPartiallyTrusted;
}

PathClass classify_path(std::span<const AsNumber> as_path,
                        std::span<const ForwardingCommitment> fcs, const Prefix& prefix,
                        AsNumber self, const TrustBase& trust) {
    VerifyCache cache(trust);
    return classify_path(as_path, fcs, prefix, self, cache);
}

const RibEntry& select_route(std::span<const RibEntry> candidates, bool use_class) {
    if (candidates.empty()) throw Error(ErrorCode::kInvalidArgument, "no candidate routes");
    auto better = [use_class](const RibEntry& a, const RibEntry& b) {
        if (use_class && a.classification != b.classification) {
            return a.classification > b.classification;
        }
        if (a.as_path.size() != b.as_path.size()) return a.as_path.size() < b.as_path.size();
        return a.received_from < b.received_from;
    };
    const RibEntry* best = &candidates.front();
    for (const auto& c : candidates.subspan(1)) {
        if (better(c, *best)) best = &c;
    }
    return *best;
}

BgpUpdate export_route(const RibEntry& entry, AsNumber neighbor, const Signer& self,
                       FcCache& cache) {
    const AsNumber prev = entry.as_path.empty() ? kNullAs : entry.as_path.back();
    BgpUpdate out;
    out.kind = UpdateKind::kAnnouncement;
    out.prefix = entry.prefix;
    out.as_path = entry.as_path;
    out.as_path.push_back(self.asn());
    out.attributes = entry.attributes;
    auto fcs = entry.fcs;
    fcs.push_back(cache.get_or_sign(self, Pathlet{prev, self.asn(), neighbor, entry.prefix}));
    set_fc_list(out, fcs);
    return out;
}

std::string DecisionRecord::to_line() const {
    std::ostringstream os;
    os << "t=" << time << " as=" << as.value << " prefix=" << prefix.to_string()
       << " class=" << to_string(classification) << " action=" << action
       << " peer=" << peer.value;
    if (!detail.empty()) os << " detail=" << detail;
    return os.str();
}

Speaker::Speaker(AsNumber self, const TrustBase& trust, std::optional<Signer> signer,
                 SpeakerConfig config)
    : self_(self), trust_(&trust), signer_(std::move(signer)), config_(config), verifier_(trust) {
    if (signer_ && signer_->asn() != self_) {
        throw Error(ErrorCode::kSignerMismatch, "speaker signer does not match its AS");
    }
}

void Speaker::add_neighbor(AsNumber neighbor, Relationship rel) { neighbors_[neighbor] = rel; }

void Speaker::record(long now, const Prefix& p, PathClass c, std::string action, AsNumber peer,
                     std::string detail) {
    log_.push_back({now, self_, p, c, std::move(action), peer, std::move(detail)});
}

std::vector<DecisionRecord> Speaker::drain_log() {
    std::vector<DecisionRecord> out;
    out.swap(log_);
    return out;
}

std::vector<Outbound> Speaker::originate(const Prefix& prefix, long now) {
    RibEntry local;
    local.prefix = prefix;
    local.received_from = self_;
    local.classification = PathClass::kTrusted;
    local.installed_at = now;
    local_routes_[prefix] = local;
    record(now, prefix, local.classification, "originate", self_);
    return reselect(prefix, now);
}

ProcessResult Speaker::process_update(AsNumber from, const BgpUpdate& update, long now) {
    if (update.kind == UpdateKind::kWithdrawal) {
        return {std::nullopt, process_withdraw(update.prefix, from, now)};
    }
    if (std::find(update.as_path.begin(), update.as_path.end(), self_) != update.as_path.end()) {
        record(now, update.prefix, PathClass::kSuspicious, "drop", from, "loop");
        return {};
    }
    if (update.as_path.empty() || update.as_path.back() != from) {
        record(now, update.prefix, PathClass::kSuspicious, "drop", from, "first-hop-mismatch");
        return {};
    }
    std::vector<ForwardingCommitment> fcs;
    try {
        fcs = fc_list(update);
    } catch (const Error& e) {
        record(now, update.prefix, PathClass::kSuspicious, "drop", from, "malformed");
        return {};
    }

    RibEntry entry;
    entry.prefix = update.prefix;
    entry.as_path = update.as_path;
    entry.fcs = std::move(fcs);
    entry.attributes = update.attributes;
    entry.received_from = from;
    entry.installed_at = now;
    entry.classification = deployed()
                               ? classify_path(entry.as_path, entry.fcs, entry.prefix, self_, verifier_)
                               : PathClass::kLegacy;
    record(now, entry.prefix, entry.classification, "store", from);
    adj_rib_in_[entry.prefix][from] = entry;
    ProcessResult result{entry, reselect(entry.prefix, now)};
    return result;
}

std::vector<Outbound> Speaker::process_withdraw(const Prefix& prefix, AsNumber from, long now) {
    auto it = adj_rib_in_.find(prefix);
    if (it == adj_rib_in_.end() || !it->second.contains(from)) return {};
    const PathClass cls = it->second.at(from).classification;
    it->second.erase(from);
    if (it->second.empty()) adj_rib_in_.erase(it);
    record(now, prefix, cls, "withdrawn", from);
    return reselect(prefix, now);
}

std::vector<Outbound> Speaker::peer_up(AsNumber neighbor, Relationship rel, long now) {
    add_neighbor(neighbor, rel);
    std::vector<Outbound> out;
    for (const auto& [prefix, best] : loc_rib_) {
        if (!export_allowed(best, neighbor)) continue;
        auto upd = build_export(best, neighbor);
        if (!upd) continue;
        adj_rib_out_[prefix][neighbor] = *upd;
        record(now, prefix, best.classification, "export", neighbor, "peer-up");
        out.push_back({neighbor, std::move(*upd)});
    }
    return out;
}

const RibEntry* Speaker::best(const Prefix& prefix) const {
    auto it = loc_rib_.find(prefix);
    return it == loc_rib_.end() ? nullptr : &it->second;
}

std::vector<RibEntry> Speaker::candidates(const Prefix& prefix) const {
    std::vector<RibEntry> out;
    if (auto it = adj_rib_in_.find(prefix); it != adj_rib_in_.end()) {
        for (const auto& [_, e] : it->second) out.push_back(e);
    }
    return out;
}

std::vector<Prefix> Speaker::known_prefixes() const {
    std::set<Prefix> all;
    for (const auto& [p, _] : loc_rib_) all.insert(p);
    for (const auto& [p, _] : adj_rib_in_) all.insert(p);
    return {all.begin(), all.end()};
}

const BgpUpdate* Speaker::last_sent(const Prefix& prefix, AsNumber neighbor) const {
    auto it = adj_rib_out_.find(prefix);
    if (it == adj_rib_out_.end()) return nullptr;
    auto jt = it->second.find(neighbor);
    return jt == it->second.end() ? nullptr : &jt->second;
}

bool Speaker::export_allowed(const RibEntry& best, AsNumber neighbor) const {
    if (neighbor == best.received_from) return false;
    if (std::find(best.as_path.begin(), best.as_path.end(), neighbor) != best.as_path.end()) {
        return false;
    }
    if (best.classification == PathClass::kSuspicious && !config_.export_suspicious && deployed()) {
        return false;
    }
    if (config_.gao_rexford && !best.is_local()) {
        const auto learned = neighbors_.count(best.received_from)
                                 ? neighbors_.at(best.received_from)
                                 : Relationship::kNone;
        const auto target = neighbors_.count(neighbor) ? neighbors_.at(neighbor) : Relationship::kNone;
        const bool from_customer = learned == Relationship::kCustomer || learned == Relationship::kNone;
        if (!from_customer && target != Relationship::kCustomer && target != Relationship::kNone) {
            return false;
        }
    }
    return true;
}

std::optional<BgpUpdate> Speaker::build_export(const RibEntry& best, AsNumber neighbor) {
    if (signer_) return export_route(best, neighbor, *signer_, fc_cache_);
    BgpUpdate base;
    base.kind = UpdateKind::kAnnouncement;
    base.prefix = best.prefix;
    base.as_path = best.as_path;
    base.attributes = best.attributes;
    return legacy_passthrough(base, self_);
}

std::vector<Outbound> Speaker::reselect(const Prefix& prefix, long now) {
    std::optional<RibEntry> new_best;
    if (auto lit = local_routes_.find(prefix); lit != local_routes_.end()) {
        new_best = lit->second;
    } else if (auto it = adj_rib_in_.find(prefix); it != adj_rib_in_.end() && !it->second.empty()) {
        std::vector<RibEntry> cands;
        for (const auto& [_, e] : it->second) cands.push_back(e);
        new_best = select_route(cands, deployed());
    }

    auto old = loc_rib_.find(prefix);
    const bool had_best = old != loc_rib_.end();
    if (new_best && had_best && old->second.received_from == new_best->received_from &&
        old->second.as_path == new_best->as_path && old->second.fcs == new_best->fcs &&
        old->second.attributes == new_best->attributes) {
        return {};
    }

    std::vector<Outbound> out;
    auto& sent = adj_rib_out_[prefix];
    if (!new_best) {
        loc_rib_.erase(prefix);
        record(now, prefix, PathClass::kLegacy, "lost-route", self_);
        for (const auto& [nbr, _] : sent) {
            BgpUpdate w;
            w.kind = UpdateKind::kWithdrawal;
            w.prefix = prefix;
            out.push_back({nbr, std::move(w)});
            record(now, prefix, PathClass::kLegacy, "withdraw", nbr);
        }
        adj_rib_out_.erase(prefix);
        return out;
    }

    loc_rib_[prefix] = *new_best;
    record(now, prefix, new_best->classification, "select", new_best->received_from,
           "len=" + std::to_string(new_best->as_path.size()));
    for (const auto& [nbr, _] : neighbors_) {
        const bool allowed = export_allowed(*new_best, nbr);
        auto prev = sent.find(nbr);
        if (!allowed) {
            if (prev != sent.end()) {
                BgpUpdate w;
                w.kind = UpdateKind::kWithdrawal;
                w.prefix = prefix;
                out.push_back({nbr, std::move(w)});
                sent.erase(prev);
                record(now, prefix, new_best->classification, "withdraw", nbr);
            }
            continue;
        }
        auto upd = build_export(*new_best, nbr);
        if (!upd || (prev != sent.end() && prev->second == *upd)) continue;
        sent[nbr] = *upd;
        record(now, prefix, new_best->classification, "export", nbr);
        out.push_back({nbr, std::move(*upd)});
    }
    if (sent.empty()) adj_rib_out_.erase(prefix);
    return out;
}

}  // namespace fcbgp
