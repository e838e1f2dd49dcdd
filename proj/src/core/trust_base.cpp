#include "fcbgp/trust_base.hpp"

#include <fstream>
#include <sstream>

namespace fcbgp {

void TrustBase::add(TrustRecord record) {
    if (record.asn.is_null()) {
        throw Error(ErrorCode::kInvalidArgument, "AS 0 cannot be registered");
    }
    if (record.deployed && record.public_key.empty()) {
        throw Error(ErrorCode::kInvalidArgument,
                    "deployed AS " + to_string(record.asn) + " has no public key");
    }
    for (const auto& p : record.prefixes) {
        auto it = owners_.find(p);
        if (it != owners_.end() && it->second != record.asn) {
            throw Error(ErrorCode::kConflict, "prefix " + p.to_string() + " already owned by AS " +
                                                  to_string(it->second));
        }
    }
    auto existing = records_.find(record.asn);
    if (existing != records_.end()) {
        for (const auto& p : existing->second.prefixes) owners_.erase(p);
    }
    for (const auto& p : record.prefixes) owners_[p] = record.asn;
    records_[record.asn] = std::move(record);
}

std::optional<AsNumber> TrustBase::lookup_owner(const Prefix& prefix) const {
    auto it = owners_.find(prefix);
    if (it == owners_.end()) return std::nullopt;
    return it->second;
}

bool TrustBase::owns(AsNumber asn, const Prefix& prefix) const {
    auto owner = lookup_owner(prefix);
    return owner && *owner == asn;
}

bool TrustBase::is_deployed(AsNumber asn) const {
    const auto* r = find(asn);
    return r != nullptr && r->deployed;
}

const TrustRecord* TrustBase::find(AsNumber asn) const {
    auto it = records_.find(asn);
    return it == records_.end() ? nullptr : &it->second;
}

bool TrustBase::verify_key(AsNumber asn, ByteView signature, ByteView message) const {
    const auto* r = find(asn);
    if (r == nullptr) throw Error(ErrorCode::kUnknownAs, "AS " + to_string(asn) + " not registered");
    if (r->public_key.empty()) return false;
    return scheme_->verify(r->public_key, signature, message);
}

bool TrustBase::verify_or_false(AsNumber asn, ByteView signature, ByteView message) const {
    const auto* r = find(asn);
    if (r == nullptr || r->public_key.empty()) return false;
    return scheme_->verify(r->public_key, signature, message);
}

std::optional<Signer> KeyStore::signer(AsNumber asn, const SignatureScheme& scheme) const {
    auto it = keys_.find(asn);
    if (it == keys_.end()) return std::nullopt;
    return Signer(asn, it->second, scheme);
}

LoadedTrust load_trust(std::string_view text, std::uint64_t seed) {
    LoadedTrust out;
    long line_no = 0;
    for (auto line : split(text, '\n')) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        try {
            const auto fields = split(line, '|');
            if (fields.size() != 4) {
                throw Error(ErrorCode::kParse, "expected 4 '|'-separated fields");
            }
            TrustRecord rec;
            rec.asn = AsNumber(parse_u32(fields[0], "asn"));
            for (auto p : split(fields[1], ',')) {
                if (!trim(p).empty()) rec.prefixes.insert(Prefix::parse(p));
            }
            const auto dep = trim(fields[2]);
            if (dep != "0" && dep != "1") throw Error(ErrorCode::kParse, "deployed must be 0 or 1");
            rec.deployed = dep == "1";
            const auto key = trim(fields[3]);
            if (key == "auto") {
                auto kp = derive_keypair(out.trust.scheme(), rec.asn, seed);
                rec.public_key = kp.public_key;
                out.keys.put(rec.asn, kp.secret_key);
            } else if (!key.empty() && key != "-") {
                rec.public_key = from_hex(key);
            }
            out.trust.add(std::move(rec));
        } catch (const Error& e) {
            throw Error(e.code(), "trust file line " + std::to_string(line_no) + ": " + e.what(), -1,
                        line_no);
        }
    }
    return out;
}

LoadedTrust load_trust_file(const std::string& path, std::uint64_t seed) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::kIo, "cannot open trust file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return load_trust(ss.str(), seed);
}

}  // namespace fcbgp
