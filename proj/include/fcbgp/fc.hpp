#pragma once

#include <map>
#include <tuple>

#include "fcbgp/crypto.hpp"
#include "fcbgp/trust_base.hpp"

namespace fcbgp {

/// <previous, current, next> on an AS path for one prefix. previous may be
/// Null for the origin pathlet.
struct Pathlet {
    AsNumber previous;
    AsNumber current;
    AsNumber next;
    Prefix prefix;

    /// Throws kInvalidArgument when an invariant is violated.
    void validate() const;
    friend auto operator<=>(const Pathlet&, const Pathlet&) = default;
};

/// Signed per-pathlet routing intent. The prefix is not carried; it comes
/// from the enclosing update's NLRI.
struct ForwardingCommitment {
    AsNumber previous;
    AsNumber current;
    AsNumber next;
    Bytes signature;

    Pathlet pathlet(const Prefix& prefix) const { return {previous, current, next, prefix}; }
    bool same_tuple(AsNumber prev, AsNumber cur, AsNumber nxt) const {
        return previous == prev && current == cur && next == nxt;
    }
    friend bool operator==(const ForwardingCommitment&, const ForwardingCommitment&) = default;
    friend auto operator<=>(const ForwardingCommitment&, const ForwardingCommitment&) = default;
};

/// previous‖current‖next as 4-octet big-endian, prefix address octets,
/// then the 1-octet mask length.
Bytes canonical_encoding(const Pathlet& pathlet);
Digest canonical_digest(const Pathlet& pathlet);

/// Throws kSignerMismatch unless signer.asn() == pathlet.current.
ForwardingCommitment sign_fc(const Signer& signer, const Pathlet& pathlet);

/// Unknown or keyless signers verify as false.
bool verify_fc(const ForwardingCommitment& fc, const Prefix& prefix, const TrustBase& trust);

/// `prev:cur:next:sig-hex`
std::string format_fc(const ForwardingCommitment& fc);
ForwardingCommitment parse_fc(std::string_view text);

/// Reuses a previously signed FC for an identical (prev, self, next, prefix).
class FcCache {
public:
    const ForwardingCommitment& get_or_sign(const Signer& signer, const Pathlet& pathlet);
    std::size_t size() const { return cache_.size(); }
    std::size_t signatures_made() const { return signed_; }

private:
    std::map<Pathlet, ForwardingCommitment> cache_;
    std::size_t signed_ = 0;
};

/// Memoises verify_fc results for a fixed trust base.
class VerifyCache {
public:
    explicit VerifyCache(const TrustBase& trust) : trust_(&trust) {}
    bool verify(const ForwardingCommitment& fc, const Prefix& prefix);
    const TrustBase& trust() const { return *trust_; }
    std::size_t verifications() const { return verifications_; }

private:
    const TrustBase* trust_;
    std::map<std::pair<ForwardingCommitment, Prefix>, bool> memo_;
    std::size_t verifications_ = 0;
};

}  // namespace fcbgp
