#include "fcbgp/binding.hpp"

#include <algorithm>
#include <mutex>
#include <sstream>

#include "fcbgp/bytes.hpp"

namespace fcbgp {
namespace {

void write_body(ByteWriter& w, const BindingMessage& m) {
    write_prefix(w, m.src_prefix);
    write_prefix(w, m.dst_prefix);
    if (m.fc_list.size() > 0xffff) throw Error(ErrorCode::kOverflow, "binding FC list too long");
    w.u16(static_cast<std::uint16_t>(m.fc_list.size()));
    for (const auto& fc : m.fc_list) write_fc_record(w, fc);
    w.u32(static_cast<std::uint32_t>(m.ver));
    w.u32(m.ver_sub);
    w.u32(m.issuer.value);
}

void sign_message(BindingMessage& m, const Signer& signer) {
    m.issuer = signer.asn();
    m.signature = signer.sign(binding_signing_bytes(m));
}

void require_owner(const Signer& issuer, const Prefix& src, const TrustBase& trust) {
    if (!trust.owns(issuer.asn(), src)) {
        throw Error(ErrorCode::kOwnership,
                    "AS " + to_string(issuer.asn()) + " does not own source prefix " + src.to_string());
    }
}

}  // namespace

Bytes binding_signing_bytes(const BindingMessage& msg) {
    ByteWriter w;
    write_body(w, msg);
    return w.take();
}

Bytes encode_binding(const BindingMessage& msg) {
    ByteWriter w;
    write_body(w, msg);
    if (msg.signature.size() > 0xffff) throw Error(ErrorCode::kOverflow, "binding signature too long");
    w.u16(static_cast<std::uint16_t>(msg.signature.size()));
    w.bytes(msg.signature);
    return w.take();
}

BindingMessage decode_binding(ByteView octets) {
    ByteReader r(octets);
    BindingMessage m;
    m.src_prefix = read_prefix(r);
    m.dst_prefix = read_prefix(r);
    const auto count = r.u16("binding FC count");
    for (std::uint16_t i = 0; i < count; ++i) m.fc_list.push_back(read_fc_record(r));
    m.ver = static_cast<std::int32_t>(r.u32("binding version"));
    m.ver_sub = r.u32("binding sub-version");
    m.issuer = AsNumber(r.u32("binding issuer"));
    const auto sig_len = r.u16("binding signature length");
    const ByteView sig = r.bytes(sig_len, "binding signature");
    m.signature.assign(sig.begin(), sig.end());
    if (!r.done()) r.fail("trailing octets after binding");
    return m;
}

Digest binding_digest(const BindingMessage& msg) { return sha256(encode_binding(msg)); }

BindingMessage make_onpath_binding(const Signer& issuer, const Prefix& src, const Prefix& dst,
                                   std::vector<ForwardingCommitment> fcs, std::int32_t ver,
                                   std::uint32_t ver_sub, const TrustBase& trust) {
    require_owner(issuer, src, trust);
    if (ver >= 1) {
        for (const auto& fc : fcs) {
            if (!verify_fc(fc, dst, trust)) {
                throw Error(ErrorCode::kInvalidArgument, "FC " + format_fc(fc).substr(0, 32) +
                                                             "... does not verify for " + dst.to_string());
            }
        }
    }
    BindingMessage m;
    m.src_prefix = src;
    m.dst_prefix = dst;
    m.fc_list = std::move(fcs);
    m.ver = ver;
    m.ver_sub = ver_sub;
    sign_message(m, issuer);
    return m;
}

BindingMessage make_offpath_binding(const Signer& issuer, const Prefix& src, const Prefix& dst,
                                    std::int32_t ver, std::uint32_t ver_sub, const TrustBase& trust) {
    require_owner(issuer, src, trust);
    BindingMessage m;
    m.src_prefix = src;
    m.dst_prefix = dst;
    m.ver = ver;
    m.ver_sub = ver_sub;
    sign_message(m, issuer);
    return m;
}

BindingMessage make_withdrawal(const Signer& issuer, const Prefix& src, const Prefix& dst,
                               std::uint32_t sequence, const TrustBase& trust) {
    return make_offpath_binding(issuer, src, dst, kWithdrawalVersion, sequence, trust);
}

BindingMessage make_startup_binding(const Signer& issuer, const Prefix& src, const Prefix& dst,
                                    std::span<const AsNumber> as_path, const TrustBase& trust) {
    require_owner(issuer, src, trust);
    BindingMessage m;
    m.src_prefix = src;
    m.dst_prefix = dst;
    m.ver = kStartupVersion;
    const std::size_t n = as_path.size();
    for (std::size_t k = n; k-- > 0;) {
        const AsNumber prev = k == 0 ? kNullAs : as_path[k - 1];
        const AsNumber next = k + 1 < n ? as_path[k + 1] : issuer.asn();
        m.fc_list.push_back({prev, as_path[k], next, {}});
    }
    sign_message(m, issuer);
    return m;
}

BindingMessage subversion_update(const Signer& issuer, const BindingMessage& original,
                                 std::vector<ForwardingCommitment> new_tail) {
    auto it = std::find_if(original.fc_list.begin(), original.fc_list.end(),
                           [&](const ForwardingCommitment& fc) { return fc.current == issuer.asn(); });
    if (it == original.fc_list.end()) {
        throw Error(ErrorCode::kInvalidArgument,
                    "AS " + to_string(issuer.asn()) + " is not on the bound path");
    }
    if (new_tail.empty() || new_tail.front().current != issuer.asn()) {
        throw Error(ErrorCode::kInvalidArgument, "new tail must start with the issuer's own FC");
    }
    BindingMessage m;
    m.src_prefix = original.src_prefix;
    m.dst_prefix = original.dst_prefix;
    m.fc_list.assign(original.fc_list.begin(), it);
    m.fc_list.insert(m.fc_list.end(), new_tail.begin(), new_tail.end());
    m.ver = original.ver;
    m.ver_sub = original.ver_sub + 1;
    sign_message(m, issuer);
    return m;
}

const char* to_string(RejectReason r) {
    switch (r) {
        case RejectReason::kBadSignature: return "bad-signature";
        case RejectReason::kNotOwner: return "not-owner";
        case RejectReason::kNoSelfFc: return "no-self-fc";
        case RejectReason::kBadFc: return "bad-fc";
    }
    return "?";
}

std::string VerifyOutcome::to_string() const {
    switch (kind) {
        case Kind::kAcceptedOnPath: return "accepted-on-path";
        case Kind::kAcceptedOffPath: return "accepted-off-path";
        case Kind::kRejected: return std::string("rejected(") + fcbgp::to_string(reason) + ")";
    }
    return "?";
}

VerifyOutcome verify_binding(const BindingMessage& msg, AsNumber self, const TrustBase& trust) {
    using K = VerifyOutcome::Kind;
    if (!trust.verify_or_false(msg.issuer, msg.signature, binding_signing_bytes(msg))) {
        return {K::kRejected, RejectReason::kBadSignature};
    }
    const bool owner = trust.owns(msg.issuer, msg.src_prefix);
    const bool on_path_issuer =
        msg.ver >= 1 && msg.ver_sub > 0 &&
        std::any_of(msg.fc_list.begin(), msg.fc_list.end(),
                    [&](const ForwardingCommitment& fc) { return fc.current == msg.issuer; });
    if (!owner && !on_path_issuer) return {K::kRejected, RejectReason::kNotOwner};
    if (msg.off_path()) return {K::kAcceptedOffPath, RejectReason::kBadSignature};

    const bool has_self = std::any_of(msg.fc_list.begin(), msg.fc_list.end(),
                                      [&](const ForwardingCommitment& fc) { return fc.current == self; });
    if (!has_self) return {K::kRejected, RejectReason::kNoSelfFc};
    if (!msg.startup()) {
        for (const auto& fc : msg.fc_list) {
            if (!verify_fc(fc, msg.dst_prefix, trust)) return {K::kRejected, RejectReason::kBadFc};
        }
    }
    return {K::kAcceptedOnPath, RejectReason::kBadSignature};
}

RuleVersion rule_version(const BindingMessage& msg) {
    if (msg.withdrawal()) return {static_cast<std::int64_t>(msg.ver_sub), 0};
    return {msg.ver, msg.ver_sub};
}

std::string FilterRule::to_line() const {
    std::ostringstream os;
    os << "src=" << src_prefix.to_string() << " dst=" << dst_prefix.to_string() << " mode=";
    if (withdrawn) {
        os << "withdrawn";
    } else if (mode == Mode::kOnPath) {
        os << "on-path inbound=" << expected_inbound.value;
    } else {
        os << "off-path";
    }
    os << " ver=" << version.ver << " sub=" << version.sub << " issuer=" << issuer.value;
    return os.str();
}

const char* to_string(InstallResult r) {
    switch (r) {
        case InstallResult::kInstalled: return "installed";
        case InstallResult::kReplaced: return "replaced";
        case InstallResult::kRemoved: return "removed";
        case InstallResult::kStale: return "stale";
        case InstallResult::kConflict: return "conflict";
        case InstallResult::kIgnored: return "ignored";
    }
    return "?";
}

InstallResult RuleTable::install_filter(const BindingMessage& msg, const VerifyOutcome& outcome) {
    if (!outcome.accepted()) return InstallResult::kIgnored;
    FilterRule rule;
    rule.src_prefix = msg.src_prefix;
    rule.dst_prefix = msg.dst_prefix;
    rule.version = rule_version(msg);
    rule.issuer = msg.issuer;
    rule.message_digest = binding_digest(msg);
    if (msg.withdrawal()) {
        rule.withdrawn = true;
    } else if (outcome.kind == VerifyOutcome::Kind::kAcceptedOffPath) {
        rule.mode = FilterRule::Mode::kOffPath;
    } else {
        const auto it = std::find_if(msg.fc_list.begin(), msg.fc_list.end(),
                                     [&](const ForwardingCommitment& fc) { return fc.current == self_; });
        if (it == msg.fc_list.end()) return InstallResult::kIgnored;
        rule.mode = FilterRule::Mode::kOnPath;
        rule.expected_inbound = it->next;
    }
    return apply(std::move(rule));
}

InstallResult RuleTable::install_local(const BindingMessage& msg) {
    FilterRule rule;
    rule.src_prefix = msg.src_prefix;
    rule.dst_prefix = msg.dst_prefix;
    rule.version = rule_version(msg);
    rule.issuer = msg.issuer;
    rule.message_digest = binding_digest(msg);
    rule.withdrawn = msg.withdrawal();
    rule.mode = FilterRule::Mode::kOnPath;
    rule.expected_inbound = self_;
    return apply(std::move(rule));
}

InstallResult RuleTable::apply(FilterRule rule) {
    std::unique_lock lock(mutex_);
    const auto key = std::make_pair(rule.src_prefix, rule.dst_prefix);
    auto it = rules_.find(key);
    if (it == rules_.end()) {
        if (rule.withdrawn) {
            rules_.emplace(key, std::move(rule));
            return InstallResult::kRemoved;
        }
        rules_.emplace(key, std::move(rule));
        return InstallResult::kInstalled;
    }
    FilterRule& cur = it->second;
    if (rule.version < cur.version) return InstallResult::kStale;
    if (rule.version == cur.version) {
        if (rule.message_digest == cur.message_digest) return InstallResult::kStale;
        // Two different bindings at the same version: multipath is not
        // supported, keep the first.
        return InstallResult::kConflict;
    }
    const bool removing = rule.withdrawn;
    cur = std::move(rule);
    return removing ? InstallResult::kRemoved : InstallResult::kReplaced;
}

PacketVerdict RuleTable::check_packet(const Prefix& src, const Prefix& dst, AsNumber inbound) const {
    std::shared_lock lock(mutex_);
    auto it = rules_.find({src, dst});
    if (it == rules_.end() || it->second.withdrawn) return {true, {}};
    const FilterRule& r = it->second;
    if (r.mode == FilterRule::Mode::kOffPath) return {false, "off-path"};
    if (inbound != r.expected_inbound) return {false, "wrong-inbound"};
    return {true, {}};
}

std::optional<FilterRule> RuleTable::rule(const Prefix& src, const Prefix& dst) const {
    std::shared_lock lock(mutex_);
    auto it = rules_.find({src, dst});
    if (it == rules_.end()) return std::nullopt;
    return it->second;
}

std::size_t RuleTable::size() const {
    std::shared_lock lock(mutex_);
    return rules_.size();
}

std::string RuleTable::dump() const {
    std::shared_lock lock(mutex_);
    std::string out;
    for (const auto& [_, r] : rules_) {
        out += "as=" + std::to_string(self_.value) + " " + r.to_line() + "\n";
    }
    return out;
}

}  // namespace fcbgp
