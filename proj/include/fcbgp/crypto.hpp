#pragma once

#include <array>
#include <memory>

#include "fcbgp/types.hpp"

namespace fcbgp {

using Digest = std::array<std::uint8_t, 32>;

/// SHA-256. Fixed for the repository; every stored digest depends on it.
Digest sha256(ByteView data);

struct KeyPair {
    Bytes public_key;
    Bytes secret_key;
};

/// Abstract sign/verify. Signatures and keys are opaque bytes to the rest
/// of the library.
class SignatureScheme {
public:
    virtual ~SignatureScheme() = default;
    virtual const char* name() const = 0;
    virtual KeyPair keypair_from_seed(ByteView seed) const = 0;
    virtual Bytes sign(ByteView secret_key, ByteView message) const = 0;
    virtual bool verify(ByteView public_key, ByteView signature, ByteView message) const = 0;
};

/// Ed25519 via libsodium; deterministic signatures.
class Ed25519Scheme final : public SignatureScheme {
public:
    const char* name() const override { return "ed25519"; }
    KeyPair keypair_from_seed(ByteView seed) const override;
    Bytes sign(ByteView secret_key, ByteView message) const override;
    bool verify(ByteView public_key, ByteView signature, ByteView message) const override;
};

const SignatureScheme& default_scheme();

/// Deterministic key for `asn` derived from a run seed; used for `auto` keys.
KeyPair derive_keypair(const SignatureScheme& scheme, AsNumber asn, std::uint64_t seed);

/// Private signing capability of one AS.
class Signer {
public:
    Signer(AsNumber asn, Bytes secret_key, const SignatureScheme& scheme = default_scheme())
        : asn_(asn), secret_(std::move(secret_key)), scheme_(&scheme) {}

    AsNumber asn() const { return asn_; }
    Bytes sign(ByteView message) const { return scheme_->sign(secret_, message); }

private:
    AsNumber asn_;
    Bytes secret_;
    const SignatureScheme* scheme_;
};

}  // namespace fcbgp
