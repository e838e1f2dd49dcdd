#pragma once

#include "fcbgp/bytes.hpp"
#include "fcbgp/fc.hpp"

namespace fcbgp {

namespace attr_flag {
inline constexpr std::uint8_t kOptional = 0x80;
inline constexpr std::uint8_t kTransitive = 0x40;
inline constexpr std::uint8_t kPartial = 0x20;
inline constexpr std::uint8_t kExtendedLength = 0x10;
inline constexpr std::uint8_t kUnusedMask = 0x0f;
}  // namespace attr_flag

/// Path attribute code used for the FC list. Not IANA-assigned.
inline constexpr std::uint8_t kFcAttributeType = 41;

struct PathAttribute {
    std::uint8_t flags = 0;
    std::uint8_t type_code = 0;
    Bytes value;

    bool extended_length() const { return (flags & attr_flag::kExtendedLength) != 0; }
    friend bool operator==(const PathAttribute&, const PathAttribute&) = default;
};

enum class UpdateKind : std::uint8_t { kAnnouncement = 0, kWithdrawal = 1 };

struct BgpUpdate {
    UpdateKind kind = UpdateKind::kAnnouncement;
    Prefix prefix;
    std::vector<AsNumber> as_path;  // origin first
    std::vector<PathAttribute> attributes;

    friend bool operator==(const BgpUpdate&, const BgpUpdate&) = default;
};

/// FC records carried by the FC attribute; empty when there is none.
std::vector<ForwardingCommitment> fc_list(const BgpUpdate& update);
const PathAttribute* find_fc_attribute(const BgpUpdate& update);

/// Replaces (or removes, for an empty list) the FC attribute, keeping its
/// position among the other attributes. Flags follow the FC attribute rules:
/// O=T=P=1 and E=1 exactly when more than one FC is carried.
void set_fc_list(BgpUpdate& update, const std::vector<ForwardingCommitment>& fcs);

/// FC record framing: prev(4) ‖ cur(4) ‖ next(4) ‖ sig-len(2) ‖ sig.
void write_fc_record(ByteWriter& w, const ForwardingCommitment& fc);
ForwardingCommitment read_fc_record(ByteReader& r);
Bytes encode_fc_records(const std::vector<ForwardingCommitment>& fcs);

void write_prefix(ByteWriter& w, const Prefix& p);
Prefix read_prefix(ByteReader& r);

/// Throws kOverflow when an attribute value does not fit its length field.
Bytes encode_update(const BgpUpdate& update);
/// Throws kMalformedMessage with the offset of the offending field.
BgpUpdate decode_update(ByteView octets);

/// Legacy hop: append self to the AS path, attribute octets untouched.
BgpUpdate legacy_passthrough(const BgpUpdate& update, AsNumber self);

// Fixture container: "FCBG" magic, 1-octet version, then records of
// tag(1) ‖ length(4) ‖ body.
inline constexpr std::array<std::uint8_t, 4> kFixtureMagic = {'F', 'C', 'B', 'G'};
inline constexpr std::uint8_t kFixtureVersion = 1;

enum class RecordTag : std::uint8_t { kUpdate = 1, kBinding = 2, kSync = 3 };

struct FixtureRecord {
    RecordTag tag;
    Bytes body;
    std::size_t body_offset = 0;  // absolute offset of body inside the file
};

Bytes encode_fixture(const std::vector<FixtureRecord>& records);
std::vector<FixtureRecord> decode_fixture(ByteView file);

}  // namespace fcbgp
