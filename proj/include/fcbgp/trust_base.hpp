#pragma once

#include <map>
#include <optional>
#include <set>
#include <unordered_map>

#include "fcbgp/crypto.hpp"
#include "fcbgp/types.hpp"

namespace fcbgp {

struct TrustRecord {
    AsNumber asn;
    std::set<Prefix> prefixes;
    Bytes public_key;  // empty for legacy ASes without a registered key
    bool deployed = false;
};

/// In-process stand-in for RPKI: prefix ownership, public keys and
/// deployment status. Immutable once built; concurrent reads are safe.
class TrustBase {
public:
    explicit TrustBase(const SignatureScheme& scheme = default_scheme()) : scheme_(&scheme) {}

    /// Throws kConflict if a prefix is already owned by another AS, and
    /// kInvalidArgument for a deployed record without a key or for AS 0.
    void add(TrustRecord record);

    std::optional<AsNumber> lookup_owner(const Prefix& prefix) const;
    bool owns(AsNumber asn, const Prefix& prefix) const;
    bool is_deployed(AsNumber asn) const;
    bool is_registered(AsNumber asn) const { return records_.contains(asn); }

    /// Throws kUnknownAs for an unregistered AS.
    bool verify_key(AsNumber asn, ByteView signature, ByteView message) const;

    /// Same as verify_key but an unknown AS simply fails verification.
    bool verify_or_false(AsNumber asn, ByteView signature, ByteView message) const;

    const TrustRecord* find(AsNumber asn) const;
    const std::map<AsNumber, TrustRecord>& records() const { return records_; }
    const SignatureScheme& scheme() const { return *scheme_; }

private:
    const SignatureScheme* scheme_;
    std::map<AsNumber, TrustRecord> records_;
    std::unordered_map<Prefix, AsNumber> owners_;
};

/// Private keys for simulated ASes. Never shared with the trust base.
class KeyStore {
public:
    void put(AsNumber asn, Bytes secret_key) { keys_[asn] = std::move(secret_key); }
    std::optional<Signer> signer(AsNumber asn, const SignatureScheme& scheme = default_scheme()) const;
    bool contains(AsNumber asn) const { return keys_.contains(asn); }

private:
    std::map<AsNumber, Bytes> keys_;
};

struct LoadedTrust {
    TrustBase trust;
    KeyStore keys;
};

/// Line format: `asn|prefix[,prefix...]|deployed(0/1)|pubkey-hex`, where the
/// key field may be `auto` (derived from `seed`, private key kept in the
/// returned KeyStore) or `-`/empty for a legacy AS. `#` starts a comment.
LoadedTrust load_trust(std::string_view text, std::uint64_t seed = 0);
LoadedTrust load_trust_file(const std::string& path, std::uint64_t seed = 0);

}  // namespace fcbgp
