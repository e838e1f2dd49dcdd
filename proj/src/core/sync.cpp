#include "fcbgp/sync.hpp"

#include <algorithm>
#include <sstream>

#include "fcbgp/bytes.hpp"

namespace fcbgp {

Bytes encode_bvv(const BindingVersionView& view) {
    ByteWriter w;
    w.u32(static_cast<std::uint32_t>(view.entries.size()));
    for (const auto& [asn, ver] : view.entries) {
        w.u32(asn.value);
        w.u32(static_cast<std::uint32_t>(ver));
    }
    return w.take();
}

BindingVersionView decode_bvv(ByteView octets) {
    ByteReader r(octets);
    BindingVersionView v;
    const auto count = r.u32("view entry count");
    if (count > octets.size() / 8) r.fail("view entry count exceeds payload");
    for (std::uint32_t i = 0; i < count; ++i) {
        const AsNumber asn(r.u32("view AS"));
        const auto ver = static_cast<std::int32_t>(r.u32("view version"));
        if (!v.entries.emplace(asn, ver).second) r.fail("duplicate view entry for AS " + to_string(asn));
    }
    if (!r.done()) r.fail("trailing octets after view");
    return v;
}

std::string format_bvv(const BindingVersionView& view) {
    std::string out = "{";
    for (const auto& [asn, ver] : view.entries) {
        if (out.size() > 1) out += ",";
        out += std::to_string(asn.value) + ":" + std::to_string(ver);
    }
    return out + "}";
}

AsNumber leader_for_round(std::uint64_t round, std::span<const AsNumber> members) {
    if (members.empty()) throw Error(ErrorCode::kInvalidArgument, "empty member list");
    return members[round % members.size()];
}

const char* to_string(SyncKind k) {
    switch (k) {
        case SyncKind::kSend: return "SEND";
        case SyncKind::kEcho: return "ECHO";
        case SyncKind::kReady: return "READY";
        case SyncKind::kRequest: return "REQUEST";
        case SyncKind::kSupply: return "SUPPLY";
        case SyncKind::kForward: return "FORWARD";
    }
    return "?";
}

Bytes encode_sync(const SyncMessage& msg) {
    ByteWriter w;
    w.u8(static_cast<std::uint8_t>(msg.kind));
    w.u64(msg.round);
    w.u32(msg.leader.value);
    w.u32(msg.sender.value);
    w.u32(static_cast<std::uint32_t>(msg.payload.size()));
    w.bytes(msg.payload);
    return w.take();
}

SyncMessage decode_sync(ByteView octets) {
    ByteReader r(octets);
    SyncMessage m;
    const auto tag = r.u8("sync tag");
    if (tag < 1 || tag > 6) r.fail("unknown sync tag " + std::to_string(tag));
    m.kind = static_cast<SyncKind>(tag);
    m.round = r.u64("sync round");
    m.leader = AsNumber(r.u32("sync leader"));
    m.sender = AsNumber(r.u32("sync sender"));
    const auto len = r.u32("sync payload length");
    const ByteView p = r.bytes(len, "sync payload");
    m.payload.assign(p.begin(), p.end());
    if (!r.done()) r.fail("trailing octets after sync record");
    return m;
}

Bytes encode_request(const VersionRange& range) {
    ByteWriter w;
    w.u32(range.issuer.value);
    w.u32(static_cast<std::uint32_t>(range.from));
    w.u32(static_cast<std::uint32_t>(range.to));
    return w.take();
}

VersionRange decode_request(ByteView octets) {
    ByteReader r(octets);
    VersionRange v;
    v.issuer = AsNumber(r.u32("request issuer"));
    v.from = static_cast<std::int32_t>(r.u32("request from"));
    v.to = static_cast<std::int32_t>(r.u32("request to"));
    if (!r.done()) r.fail("trailing octets after request");
    return v;
}

Bytes encode_supply(const std::vector<BindingMessage>& msgs) {
    ByteWriter w;
    w.u32(static_cast<std::uint32_t>(msgs.size()));
    for (const auto& m : msgs) {
        const Bytes body = encode_binding(m);
        w.u32(static_cast<std::uint32_t>(body.size()));
        w.bytes(body);
    }
    return w.take();
}

std::vector<BindingMessage> decode_supply(ByteView octets) {
    ByteReader r(octets);
    std::vector<BindingMessage> out;
    const auto count = r.u32("supply count");
    for (std::uint32_t i = 0; i < count; ++i) {
        const auto len = r.u32("supply body length");
        out.push_back(decode_binding(r.bytes(len, "supply body")));
    }
    if (!r.done()) r.fail("trailing octets after supply");
    return out;
}

std::vector<SyncAction> reconcile(const BindingVersionView& local, const BindingVersionView& delivered,
                                  AsNumber /*self*/, AsNumber leader) {
    std::vector<SyncAction> out;
    std::set<AsNumber> issuers;
    for (const auto& [asn, _] : local.entries) issuers.insert(asn);
    for (const auto& [asn, _] : delivered.entries) issuers.insert(asn);
    for (auto asn : issuers) {
        const auto mine = local.get(asn);
        const auto theirs = delivered.get(asn);
        if (theirs > mine) {
            out.push_back({SyncAction::Kind::kRequestMissing, asn, mine + 1, theirs, leader});
        } else if (theirs < mine) {
            out.push_back({SyncAction::Kind::kSendNewer, asn, theirs + 1, mine, leader});
        }
    }
    return out;
}

const char* to_string(SyncBehavior b) {
    switch (b) {
        case SyncBehavior::kHonest: return "honest";
        case SyncBehavior::kSilent: return "silent";
        case SyncBehavior::kEquivocate: return "equivocate";
        case SyncBehavior::kLyingView: return "lying-view";
        case SyncBehavior::kWithholding: return "withholding";
    }
    return "?";
}

SyncBehavior parse_sync_behavior(std::string_view text) {
    for (auto b : {SyncBehavior::kHonest, SyncBehavior::kSilent, SyncBehavior::kEquivocate,
                   SyncBehavior::kLyingView, SyncBehavior::kWithholding}) {
        if (text == to_string(b)) return b;
    }
    throw Error(ErrorCode::kParse, "unknown sync behavior '" + std::string(text) + "'");
}

SyncNode::SyncNode(AsNumber self, std::vector<AsNumber> region, std::vector<AsNumber> others,
                   const TrustBase& trust, SyncBehavior behavior)
    : self_(self), region_(std::move(region)), others_(std::move(others)), trust_(&trust),
      behavior_(behavior) {
    if (std::find(region_.begin(), region_.end(), self_) == region_.end()) {
        throw Error(ErrorCode::kInvalidArgument, "AS " + to_string(self_) + " missing from its region");
    }
}

bool SyncNode::store_binding(const BindingMessage& msg) {
    const std::int64_t seq = msg.sequence();
    if (seq < 1 || !trust_->owns(msg.issuer, msg.src_prefix)) return false;
    if (!trust_->verify_or_false(msg.issuer, msg.signature, binding_signing_bytes(msg))) return false;
    if (!store_.emplace(std::make_pair(msg.issuer, seq), msg).second) return false;
    pending_.erase({msg.issuer, static_cast<std::int32_t>(seq)});
    std::int32_t v = view_.get(msg.issuer);
    while (store_.contains({msg.issuer, v + 1})) ++v;
    if (v > 0) view_.entries[msg.issuer] = v;
    return true;
}

SyncMessage SyncNode::message(SyncKind kind, std::uint64_t round, AsNumber leader, Bytes payload) const {
    return {kind, round, leader, self_, std::move(payload)};
}

std::vector<Envelope> SyncNode::to_region(const SyncMessage& msg) const {
    std::vector<Envelope> out;
    for (auto m : region_) out.push_back({m, msg});
    return out;
}

RbcInstance& SyncNode::instance(std::uint64_t round, AsNumber leader) {
    auto key = std::make_pair(round, leader);
    auto it = instances_.find(key);
    if (it == instances_.end()) {
        it = instances_.emplace(key, RbcInstance(self_, round, leader, region_.size())).first;
    }
    return it->second;
}

std::vector<Envelope> SyncNode::on_round(std::uint64_t round) {
    std::vector<Envelope> out;
    if (behavior_ == SyncBehavior::kSilent) return out;

    // Previous round's leader pushes its post-check view to the other regions.
    if (round > 0 && leader_for(round - 1) == self_ && delivered_rounds_.contains(round - 1)) {
        const auto fwd = message(SyncKind::kForward, round - 1, self_, encode_bvv(view_));
        for (auto o : others_) out.push_back({o, fwd});
    }

    // Repair fallback: versions the leader did not supply are asked of the
    // whole region once, then dropped until a later view mentions them.
    std::map<AsNumber, std::pair<std::int32_t, std::int32_t>> ranges;
    for (auto it = pending_.begin(); it != pending_.end();) {
        if (it->second >= 1) {
            it = pending_.erase(it);
            continue;
        }
        it->second = 1;
        auto [issuer, ver] = it->first;
        auto [r, inserted] = ranges.try_emplace(issuer, ver, ver);
        if (!inserted) {
            r->second.first = std::min(r->second.first, ver);
            r->second.second = std::max(r->second.second, ver);
        }
        ++it;
    }
    for (const auto& [issuer, range] : ranges) {
        const auto req = message(SyncKind::kRequest, round, self_,
                                 encode_request({issuer, range.first, range.second}));
        for (auto m : region_) {
            if (m != self_) out.push_back({m, req});
        }
        log_.push_back("sync=fallback-request issuer=" + std::to_string(issuer.value) + " from=" +
                       std::to_string(range.first) + " to=" + std::to_string(range.second));
    }

    if (leader_for(round) != self_) return out;
    auto& inst = instance(round, self_);
    if (behavior_ == SyncBehavior::kEquivocate) {
        BindingVersionView alt = view_;
        alt.entries[self_] = view_.get(self_) + 1;
        const Bytes a = encode_bvv(view_);
        const Bytes b = encode_bvv(alt);
        for (std::size_t i = 0; i < region_.size(); ++i) {
            out.push_back({region_[i], message(SyncKind::kSend, round, self_, i % 2 == 0 ? a : b)});
        }
        return out;
    }
    BindingVersionView advertised = view_;
    if (behavior_ == SyncBehavior::kLyingView) {
        for (auto& [_, ver] : advertised.entries) ver += 3;
    }
    for (const auto& m : inst.start(encode_bvv(advertised))) {
        auto env = to_region({SyncKind::kSend, m.round, m.leader, m.sender, m.payload});
        out.insert(out.end(), env.begin(), env.end());
    }
    return out;
}

std::vector<Envelope> SyncNode::apply_view(const BindingVersionView& delivered, AsNumber peer,
                                           std::uint64_t round) {
    std::vector<Envelope> out;
    for (const auto& a : reconcile(view_, delivered, self_, peer)) {
        if (a.kind == SyncAction::Kind::kRequestMissing) {
            for (auto v = a.from; v <= a.to; ++v) pending_.try_emplace({a.issuer, v}, 0);
            out.push_back({peer, message(SyncKind::kRequest, round, peer,
                                         encode_request({a.issuer, a.from, a.to}))});
        } else {
            std::vector<BindingMessage> newer;
            for (auto v = a.from; v <= a.to; ++v) newer.push_back(store_.at({a.issuer, v}));
            out.push_back({peer, message(SyncKind::kSupply, round, peer, encode_supply(newer))});
        }
    }
    return out;
}

std::vector<Envelope> SyncNode::on_message(const SyncMessage& msg) {
    std::vector<Envelope> out;
    if (behavior_ == SyncBehavior::kSilent) return out;
    switch (msg.kind) {
        case SyncKind::kSend:
        case SyncKind::kEcho:
        case SyncKind::kReady: {
            if (leader_for(msg.round) != msg.leader) return out;
            if (std::find(region_.begin(), region_.end(), msg.sender) == region_.end()) return out;
            auto& inst = instance(msg.round, msg.leader);
            const bool had = inst.delivered().has_value();
            RbcMessage rm{static_cast<RbcKind>(msg.kind), msg.round, msg.leader, msg.sender, msg.payload};
            for (const auto& m : inst.on_message(rm)) {
                auto env = to_region({static_cast<SyncKind>(m.kind), m.round, m.leader, m.sender, m.payload});
                out.insert(out.end(), env.begin(), env.end());
            }
            if (!had && inst.delivered()) {
                delivered_rounds_.insert(msg.round);
                const auto delivered = decode_bvv(*inst.delivered());
                log_.push_back("sync=deliver round=" + std::to_string(msg.round) + " leader=" +
                               std::to_string(msg.leader.value) + " view=" + format_bvv(delivered));
                if (msg.leader != self_) {
                    auto more = apply_view(delivered, msg.leader, msg.round);
                    out.insert(out.end(), more.begin(), more.end());
                }
            }
            break;
        }
        case SyncKind::kForward: {
            if (std::find(others_.begin(), others_.end(), msg.sender) == others_.end()) return out;
            const auto view = decode_bvv(msg.payload);
            log_.push_back("sync=forward-received from=" + std::to_string(msg.sender.value) +
                           " view=" + format_bvv(view));
            out = apply_view(view, msg.sender, msg.round);
            break;
        }
        case SyncKind::kRequest: {
            if (behavior_ == SyncBehavior::kWithholding) return out;
            const auto range = decode_request(msg.payload);
            std::vector<BindingMessage> have;
            for (auto v = range.from; v <= range.to && v - range.from < 10000; ++v) {
                auto it = store_.find({range.issuer, v});
                if (it != store_.end()) have.push_back(it->second);
            }
            if (!have.empty()) {
                out.push_back({msg.sender, message(SyncKind::kSupply, msg.round, msg.leader,
                                                   encode_supply(have))});
            }
            break;
        }
        case SyncKind::kSupply: {
            std::size_t added = 0;
            for (const auto& b : decode_supply(msg.payload)) added += store_binding(b) ? 1 : 0;
            if (added > 0) {
                log_.push_back("sync=supplied from=" + std::to_string(msg.sender.value) +
                               " added=" + std::to_string(added));
            }
            break;
        }
    }
    return out;
}

std::vector<std::string> SyncNode::drain_log() {
    std::vector<std::string> out;
    out.swap(log_);
    return out;
}

}  // namespace fcbgp
