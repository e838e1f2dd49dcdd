#include "fcbgp/wire.hpp"

#include <algorithm>

#include "fcbgp/bytes.hpp"

namespace fcbgp {
namespace {

constexpr std::uint8_t kFcBaseFlags =
    attr_flag::kOptional | attr_flag::kTransitive | attr_flag::kPartial;

std::vector<ForwardingCommitment> parse_fc_value(ByteView value, std::size_t base_offset) {
    ByteReader r(value, base_offset);
    std::vector<ForwardingCommitment> out;
    while (!r.done()) out.push_back(read_fc_record(r));
    return out;
}

}  // namespace

void write_fc_record(ByteWriter& w, const ForwardingCommitment& fc) {
    if (fc.signature.size() > 0xffff) throw Error(ErrorCode::kOverflow, "FC signature too long");
    w.u32(fc.previous.value);
    w.u32(fc.current.value);
    w.u32(fc.next.value);
    w.u16(static_cast<std::uint16_t>(fc.signature.size()));
    w.bytes(fc.signature);
}

ForwardingCommitment read_fc_record(ByteReader& r) {
    ForwardingCommitment fc;
    fc.previous = AsNumber(r.u32("FC previous AS"));
    fc.current = AsNumber(r.u32("FC current AS"));
    fc.next = AsNumber(r.u32("FC next AS"));
    const std::uint16_t len = r.u16("FC signature length");
    const ByteView sig = r.bytes(len, "FC signature");
    fc.signature.assign(sig.begin(), sig.end());
    return fc;
}

Bytes encode_fc_records(const std::vector<ForwardingCommitment>& fcs) {
    ByteWriter w;
    for (const auto& fc : fcs) write_fc_record(w, fc);
    return w.take();
}

void write_prefix(ByteWriter& w, const Prefix& p) {
    w.u8(static_cast<std::uint8_t>(p.family()));
    w.u8(p.length());
    w.bytes(p.address());
}

Prefix read_prefix(ByteReader& r) {
    const auto fam = r.u8("prefix family");
    if (fam != 4 && fam != 6) r.fail("unknown prefix family " + std::to_string(fam));
    const auto len = r.u8("prefix length");
    const std::size_t size = fam == 4 ? 4 : 16;
    if (len > size * 8) r.fail("prefix length " + std::to_string(len) + " out of range");
    const ByteView addr = r.bytes(size, "prefix address");
    Prefix p(fam == 4 ? Prefix::Family::kV4 : Prefix::Family::kV6, addr, len);
    if (!std::equal(addr.begin(), addr.end(), p.address().begin())) {
        r.fail("prefix has host bits set");
    }
    return p;
}

const PathAttribute* find_fc_attribute(const BgpUpdate& update) {
    for (const auto& a : update.attributes) {
        if (a.type_code == kFcAttributeType) return &a;
    }
    return nullptr;
}

std::vector<ForwardingCommitment> fc_list(const BgpUpdate& update) {
    const auto* attr = find_fc_attribute(update);
    if (attr == nullptr) return {};
    return parse_fc_value(attr->value, 0);
}

void set_fc_list(BgpUpdate& update, const std::vector<ForwardingCommitment>& fcs) {
    auto it = std::find_if(update.attributes.begin(), update.attributes.end(),
                           [](const PathAttribute& a) { return a.type_code == kFcAttributeType; });
    if (fcs.empty()) {
        if (it != update.attributes.end()) update.attributes.erase(it);
        return;
    }
    PathAttribute attr;
    attr.type_code = kFcAttributeType;
    attr.flags = kFcBaseFlags | (fcs.size() > 1 ? attr_flag::kExtendedLength : 0);
    attr.value = encode_fc_records(fcs);
    if (it != update.attributes.end()) {
        *it = std::move(attr);
    } else {
        update.attributes.push_back(std::move(attr));
    }
}

Bytes encode_update(const BgpUpdate& update) {
    ByteWriter w;
    w.u8(static_cast<std::uint8_t>(update.kind));
    write_prefix(w, update.prefix);
    if (update.as_path.size() > 0xffff) throw Error(ErrorCode::kOverflow, "AS path too long");
    w.u16(static_cast<std::uint16_t>(update.as_path.size()));
    for (auto asn : update.as_path) w.u32(asn.value);

    ByteWriter attrs;
    for (const auto& a : update.attributes) {
        attrs.u8(a.flags);
        attrs.u8(a.type_code);
        if (a.extended_length()) {
            if (a.value.size() > 0xffff) {
                throw Error(ErrorCode::kOverflow, "attribute " + std::to_string(a.type_code) +
                                                      " exceeds 2-octet length");
            }
            attrs.u16(static_cast<std::uint16_t>(a.value.size()));
        } else {
            if (a.value.size() > 0xff) {
                throw Error(ErrorCode::kOverflow, "attribute " + std::to_string(a.type_code) +
                                                      " exceeds 1-octet length");
            }
            attrs.u8(static_cast<std::uint8_t>(a.value.size()));
        }
        attrs.bytes(a.value);
    }
    if (attrs.size() > 0xffff) throw Error(ErrorCode::kOverflow, "path attributes exceed 65535 octets");
    w.u16(static_cast<std::uint16_t>(attrs.size()));
    w.bytes(attrs.buffer());
    return w.take();
}

BgpUpdate decode_update(ByteView octets) {
    ByteReader r(octets);
    BgpUpdate u;
    const auto kind = r.u8("update kind");
    if (kind > 1) r.fail("unknown update kind " + std::to_string(kind));
    u.kind = static_cast<UpdateKind>(kind);
    u.prefix = read_prefix(r);
    const auto path_len = r.u16("AS path length");
    u.as_path.reserve(path_len);
    for (std::uint16_t i = 0; i < path_len; ++i) u.as_path.emplace_back(r.u32("AS path entry"));

    const std::size_t attrs_start = r.offset();
    const auto attrs_len = r.u16("attribute section length");
    ByteReader ar(r.bytes(attrs_len, "attribute section"), attrs_start + 2);
    bool seen_fc = false;
    while (!ar.done()) {
        PathAttribute a;
        const std::size_t attr_offset = ar.offset();
        a.flags = ar.u8("attribute flags");
        a.type_code = ar.u8("attribute type code");
        const std::size_t len = a.extended_length() ? ar.u16("attribute length") : ar.u8("attribute length");
        const std::size_t value_offset = ar.offset();
        const ByteView v = ar.bytes(len, "attribute value");
        a.value.assign(v.begin(), v.end());
        if (a.type_code == kFcAttributeType) {
            if (seen_fc) {
                throw Error(ErrorCode::kMalformedMessage,
                            "duplicate FC attribute at offset " + std::to_string(attr_offset),
                            static_cast<long>(attr_offset));
            }
            seen_fc = true;
            if ((a.flags & ~attr_flag::kExtendedLength) != kFcBaseFlags) {
                throw Error(ErrorCode::kMalformedMessage,
                            "FC attribute flags must be O=T=P=1 with unused bits zero at offset " +
                                std::to_string(attr_offset),
                            static_cast<long>(attr_offset));
            }
            const auto fcs = parse_fc_value(a.value, value_offset);
            if (fcs.empty() || a.extended_length() != (fcs.size() > 1)) {
                throw Error(ErrorCode::kMalformedMessage,
                            "FC attribute E bit contradicts record count " +
                                std::to_string(fcs.size()) + " at offset " + std::to_string(attr_offset),
                            static_cast<long>(attr_offset));
            }
        }
        u.attributes.push_back(std::move(a));
    }
    if (!r.done()) r.fail("trailing octets after update");
    if (u.kind == UpdateKind::kAnnouncement && u.as_path.empty()) {
        throw Error(ErrorCode::kMalformedMessage, "announcement with empty AS path at offset 0", 0);
    }
    return u;
}

BgpUpdate legacy_passthrough(const BgpUpdate& update, AsNumber self) {
    BgpUpdate out = update;
    if (out.kind == UpdateKind::kAnnouncement) out.as_path.push_back(self);
    return out;
}

Bytes encode_fixture(const std::vector<FixtureRecord>& records) {
    ByteWriter w;
    w.bytes(kFixtureMagic);
    w.u8(kFixtureVersion);
    for (const auto& rec : records) {
        w.u8(static_cast<std::uint8_t>(rec.tag));
        w.u32(static_cast<std::uint32_t>(rec.body.size()));
        w.bytes(rec.body);
    }
    return w.take();
}

std::vector<FixtureRecord> decode_fixture(ByteView file) {
    ByteReader r(file);
    const ByteView magic = r.bytes(4, "fixture magic");
    if (!std::equal(magic.begin(), magic.end(), kFixtureMagic.begin())) {
        throw Error(ErrorCode::kMalformedMessage, "bad fixture magic at offset 0", 0);
    }
    const auto version = r.u8("fixture version");
    if (version != kFixtureVersion) {
        throw Error(ErrorCode::kMalformedMessage,
                    "unsupported fixture version " + std::to_string(version) + " at offset 4", 4);
    }
    std::vector<FixtureRecord> out;
    while (!r.done()) {
        const std::size_t tag_offset = r.offset();
        const auto tag = r.u8("record tag");
        if (tag < 1 || tag > 3) {
            throw Error(ErrorCode::kMalformedMessage,
                        "unknown record tag " + std::to_string(tag) + " at offset " +
                            std::to_string(tag_offset),
                        static_cast<long>(tag_offset));
        }
        const auto len = r.u32("record length");
        FixtureRecord rec{static_cast<RecordTag>(tag), {}, r.offset()};
        const ByteView body = r.bytes(len, "record body");
        rec.body.assign(body.begin(), body.end());
        out.push_back(std::move(rec));
    }
    return out;
}

}  // namespace fcbgp
