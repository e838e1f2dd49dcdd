#pragma once

#include <map>
#include <shared_mutex>

#include "fcbgp/wire.hpp"

namespace fcbgp {

inline constexpr std::int32_t kWithdrawalVersion = -1;
inline constexpr std::int32_t kStartupVersion = 0;

/// Signed traffic-to-path binding. An empty fc_list is the off-path form.
/// fc_list runs from the hop nearest the traffic source toward the
/// destination origin. For a withdrawal (ver == -1) ver_sub carries the
/// issuer's sequence number for the withdrawal itself.
struct BindingMessage {
    Prefix src_prefix;
    Prefix dst_prefix;
    std::vector<ForwardingCommitment> fc_list;
    std::int32_t ver = 1;
    std::uint32_t ver_sub = 0;
    AsNumber issuer;
    Bytes signature;

    bool off_path() const { return fc_list.empty(); }
    bool withdrawal() const { return ver == kWithdrawalVersion; }
    bool startup() const { return ver == kStartupVersion; }
    /// Per-issuer sequence number tracked by the version view.
    std::int64_t sequence() const { return withdrawal() ? ver_sub : ver; }

    friend bool operator==(const BindingMessage&, const BindingMessage&) = default;
};

Bytes binding_signing_bytes(const BindingMessage& msg);
Bytes encode_binding(const BindingMessage& msg);
BindingMessage decode_binding(ByteView octets);
Digest binding_digest(const BindingMessage& msg);

/// Source-issued on-path binding (ver_sub = 0 unless given). Throws
/// kOwnership when the issuer does not own src, kInvalidArgument when a
/// carried FC fails to verify for dst (ver >= 1 only).
BindingMessage make_onpath_binding(const Signer& issuer, const Prefix& src, const Prefix& dst,
                                   std::vector<ForwardingCommitment> fcs, std::int32_t ver,
                                   std::uint32_t ver_sub, const TrustBase& trust);
BindingMessage make_offpath_binding(const Signer& issuer, const Prefix& src, const Prefix& dst,
                                    std::int32_t ver, std::uint32_t ver_sub, const TrustBase& trust);
BindingMessage make_withdrawal(const Signer& issuer, const Prefix& src, const Prefix& dst,
                               std::uint32_t sequence, const TrustBase& trust);
/// Startup binding (ver = 0) for an established route; the FC list holds the
/// reversed AS path as unsigned pathlets. `as_path` is origin first and the
/// issuer is the AS that holds the route.
BindingMessage make_startup_binding(const Signer& issuer, const Prefix& src, const Prefix& dst,
                                    std::span<const AsNumber> as_path, const TrustBase& trust);

/// Partial path change learned by an on-path AS: hops between the source
/// and the issuer are kept, the issuer's hop onward is replaced by
/// `new_tail` (issuer's new FC first). Same ver, ver_sub + 1.
BindingMessage subversion_update(const Signer& issuer, const BindingMessage& original,
                                 std::vector<ForwardingCommitment> new_tail);

enum class RejectReason : std::uint8_t { kBadSignature, kNotOwner, kNoSelfFc, kBadFc };
const char* to_string(RejectReason r);

struct VerifyOutcome {
    enum class Kind : std::uint8_t { kAcceptedOnPath, kAcceptedOffPath, kRejected };
    Kind kind = Kind::kRejected;
    RejectReason reason = RejectReason::kBadSignature;

    bool accepted() const { return kind != Kind::kRejected; }
    std::string to_string() const;
};

/// (i) signature under the issuer's key, (ii) issuer owns src (or, for
/// ver_sub > 0, issuer is an on-path AS), (iii) for the on-path form, an FC
/// whose current AS is `self` is present and, unless the message is a
/// startup binding, every carried FC verifies for dst.
VerifyOutcome verify_binding(const BindingMessage& msg, AsNumber self, const TrustBase& trust);

struct RuleVersion {
    std::int64_t ver = 0;
    std::uint32_t sub = 0;
    friend auto operator<=>(const RuleVersion&, const RuleVersion&) = default;
};

/// Ordering key of a message for rule replacement. A withdrawal ranks at
/// its own sequence number.
RuleVersion rule_version(const BindingMessage& msg);

struct FilterRule {
    enum class Mode : std::uint8_t { kOnPath, kOffPath };
    Prefix src_prefix;
    Prefix dst_prefix;
    Mode mode = Mode::kOnPath;
    AsNumber expected_inbound;  // on-path only; equal to the owning AS for local origin
    RuleVersion version;
    AsNumber issuer;
    bool withdrawn = false;     // tombstone: no filtering, but blocks stale messages
    Digest message_digest{};

    std::string to_line() const;
};

enum class InstallResult : std::uint8_t { kInstalled, kReplaced, kRemoved, kStale, kConflict, kIgnored };
const char* to_string(InstallResult r);

struct PacketVerdict {
    bool forward = true;
    std::string reason;  // "wrong-inbound" or "off-path" for discards
};

/// Per-AS (src, dst) rule table. One writer, many readers; a replacement is
/// a single locked assignment so readers never see a partial rule.
class RuleTable {
public:
    explicit RuleTable(AsNumber self) : self_(self) {}

    /// Installs the rule derived from an accepted message.
    InstallResult install_filter(const BindingMessage& msg, const VerifyOutcome& outcome);
    /// Issuer-side rule: traffic for the pair must originate locally.
    InstallResult install_local(const BindingMessage& msg);

    PacketVerdict check_packet(const Prefix& src, const Prefix& dst, AsNumber inbound) const;

    std::optional<FilterRule> rule(const Prefix& src, const Prefix& dst) const;
    std::size_t size() const;
    std::string dump() const;

private:
    InstallResult apply(FilterRule rule);

    AsNumber self_;
    mutable std::shared_mutex mutex_;
    std::map<std::pair<Prefix, Prefix>, FilterRule> rules_;
};

}  // namespace fcbgp
