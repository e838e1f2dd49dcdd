#include "fcbgp/crypto.hpp"

#include <sodium.h>

#include <cstring>

namespace fcbgp {
namespace {

void ensure_sodium() {
    static const bool ok = [] { return sodium_init() >= 0; }();
    if (!ok) throw Error(ErrorCode::kInvalidArgument, "libsodium initialisation failed");
}

}  // namespace

Digest sha256(ByteView data) {
    ensure_sodium();
    Digest out{};
    crypto_hash_sha256(out.data(), data.data(), data.size());
    return out;
}

KeyPair Ed25519Scheme::keypair_from_seed(ByteView seed) const {
    ensure_sodium();
    const Digest s = sha256(seed);
    KeyPair kp;
    kp.public_key.resize(crypto_sign_PUBLICKEYBYTES);
    kp.secret_key.resize(crypto_sign_SECRETKEYBYTES);
    crypto_sign_seed_keypair(kp.public_key.data(), kp.secret_key.data(), s.data());
    return kp;
}

Bytes Ed25519Scheme::sign(ByteView secret_key, ByteView message) const {
    ensure_sodium();
    if (secret_key.size() != crypto_sign_SECRETKEYBYTES) {
        throw Error(ErrorCode::kInvalidArgument, "ed25519 secret key has wrong size");
    }
    Bytes sig(crypto_sign_BYTES);
    crypto_sign_detached(sig.data(), nullptr, message.data(), message.size(), secret_key.data());
    return sig;
}

bool Ed25519Scheme::verify(ByteView public_key, ByteView signature, ByteView message) const {
    ensure_sodium();
    if (public_key.size() != crypto_sign_PUBLICKEYBYTES || signature.size() != crypto_sign_BYTES) {
        return false;
    }
    return crypto_sign_verify_detached(signature.data(), message.data(), message.size(),
                                       public_key.data()) == 0;
}

const SignatureScheme& default_scheme() {
    static const Ed25519Scheme scheme;
    return scheme;
}

KeyPair derive_keypair(const SignatureScheme& scheme, AsNumber asn, std::uint64_t seed) {
    Bytes material = {'f', 'c', 'b', 'g', 'p', '-', 'k', 'e', 'y'};
    for (int i = 3; i >= 0; --i) material.push_back(static_cast<std::uint8_t>(asn.value >> (8 * i)));
    for (int i = 7; i >= 0; --i) material.push_back(static_cast<std::uint8_t>(seed >> (8 * i)));
    return scheme.keypair_from_seed(material);
}

}  // namespace fcbgp
