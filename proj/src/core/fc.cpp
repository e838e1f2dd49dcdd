#include "fcbgp/fc.hpp"

#include "fcbgp/bytes.hpp"

namespace fcbgp {

void Pathlet::validate() const {
    if (current.is_null() || next.is_null()) {
        throw Error(ErrorCode::kInvalidArgument, "pathlet current/next AS must be non-zero");
    }
    if (current == next || previous == current) {
        throw Error(ErrorCode::kInvalidArgument, "pathlet repeats an AS in adjacent slots");
    }
}

Bytes canonical_encoding(const Pathlet& pathlet) {
    ByteWriter w;
    w.u32(pathlet.previous.value);
    w.u32(pathlet.current.value);
    w.u32(pathlet.next.value);
    w.bytes(pathlet.prefix.address());
    w.u8(pathlet.prefix.length());
    return w.take();
}

Digest canonical_digest(const Pathlet& pathlet) { return sha256(canonical_encoding(pathlet)); }

ForwardingCommitment sign_fc(const Signer& signer, const Pathlet& pathlet) {
    pathlet.validate();
    if (signer.asn() != pathlet.current) {
        throw Error(ErrorCode::kSignerMismatch, "AS " + to_string(signer.asn()) +
                                                    " cannot sign a pathlet whose current AS is " +
                                                    to_string(pathlet.current));
    }
    const Digest d = canonical_digest(pathlet);
    return {pathlet.previous, pathlet.current, pathlet.next, signer.sign(d)};
}

bool verify_fc(const ForwardingCommitment& fc, const Prefix& prefix, const TrustBase& trust) {
    const Pathlet p = fc.pathlet(prefix);
    try {
        p.validate();
    } catch (const Error&) {
        return false;
    }
    const Digest d = canonical_digest(p);
    return trust.verify_or_false(fc.current, fc.signature, d);
}

std::string format_fc(const ForwardingCommitment& fc) {
    return to_string(fc.previous) + ":" + to_string(fc.current) + ":" + to_string(fc.next) + ":" +
           to_hex(fc.signature);
}

ForwardingCommitment parse_fc(std::string_view text) {
    const auto parts = split(trim(text), ':');
    if (parts.size() != 4) throw Error(ErrorCode::kParse, "FC text must be prev:cur:next:sig-hex");
    return {AsNumber(parse_u32(parts[0], "previous AS")), AsNumber(parse_u32(parts[1], "current AS")),
            AsNumber(parse_u32(parts[2], "next AS")), from_hex(parts[3])};
}

const ForwardingCommitment& FcCache::get_or_sign(const Signer& signer, const Pathlet& pathlet) {
    auto it = cache_.find(pathlet);
    if (it != cache_.end()) return it->second;
    ++signed_;
    return cache_.emplace(pathlet, sign_fc(signer, pathlet)).first->second;
}

bool VerifyCache::verify(const ForwardingCommitment& fc, const Prefix& prefix) {
    auto key = std::make_pair(fc, prefix);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    ++verifications_;
    const bool ok = verify_fc(fc, prefix, *trust_);
    memo_.emplace(std::move(key), ok);
    return ok;
}

}  // namespace fcbgp
