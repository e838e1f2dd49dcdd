#include "fcbgp/inspect.hpp"

#include <cstdio>
#include <sstream>

namespace fcbgp {
namespace {

std::string flag_bits(std::uint8_t flags) {
    std::ostringstream os;
    os << "O=" << ((flags & attr_flag::kOptional) ? 1 : 0) << " T=" << ((flags & attr_flag::kTransitive) ? 1 : 0)
       << " P=" << ((flags & attr_flag::kPartial) ? 1 : 0) << " E=" << ((flags & attr_flag::kExtendedLength) ? 1 : 0);
    return os.str();
}

std::string fc_line(const ForwardingCommitment& fc) {
    return "prev=" + std::to_string(fc.previous.value) + " cur=" + std::to_string(fc.current.value) +
           " next=" + std::to_string(fc.next.value) + " sig=" + to_hex(fc.signature);
}

std::string path_text(const std::vector<AsNumber>& path) {
    std::string out;
    for (auto a : path) {
        if (!out.empty()) out += " ";
        out += std::to_string(a.value);
    }
    return out.empty() ? "(empty)" : out;
}

}  // namespace

std::string hex_dump(ByteView bytes, std::size_t base_offset) {
    std::string out;
    char buf[16];
    for (std::size_t i = 0; i < bytes.size(); i += 16) {
        std::snprintf(buf, sizeof buf, "  %08zx ", base_offset + i);
        out += buf;
        for (std::size_t j = i; j < i + 16 && j < bytes.size(); ++j) {
            std::snprintf(buf, sizeof buf, " %02x", bytes[j]);
            out += buf;
        }
        out += '\n';
    }
    return out;
}

std::string describe_update(const BgpUpdate& u) {
    std::ostringstream os;
    os << "  kind: " << (u.kind == UpdateKind::kAnnouncement ? "announcement" : "withdrawal") << "\n";
    os << "  prefix: " << u.prefix.to_string() << "\n";
    os << "  as-path: " << path_text(u.as_path) << "\n";
    for (const auto& a : u.attributes) {
        char flags[8];
        std::snprintf(flags, sizeof flags, "0x%02x", a.flags);
        os << "  attribute type-code=" << static_cast<int>(a.type_code) << " flags=" << flags << " ("
           << flag_bits(a.flags) << ") length=" << a.value.size() << "\n";
        if (a.type_code == kFcAttributeType) {
            const auto fcs = fc_list(u);
            os << "    fc-count: " << fcs.size() << "\n";
            for (const auto& fc : fcs) os << "    fc " << fc_line(fc) << "\n";
        }
    }
    return os.str();
}

std::string describe_binding(const BindingMessage& m) {
    std::ostringstream os;
    os << "  src: " << m.src_prefix.to_string() << "\n";
    os << "  dst: " << m.dst_prefix.to_string() << "\n";
    if (m.off_path()) {
        os << "  fc-list: empty (off-path)\n";
    } else {
        os << "  fc-list: " << m.fc_list.size() << " entries\n";
        for (const auto& fc : m.fc_list) os << "    fc " << fc_line(fc) << "\n";
    }
    os << "  ver: " << m.ver;
    if (m.withdrawal()) os << " (withdrawal)";
    if (m.startup()) os << " (startup)";
    os << "\n  ver-sub: " << m.ver_sub << "\n";
    os << "  issuer: " << m.issuer.value << "\n";
    os << "  signature: " << to_hex(m.signature) << "\n";
    return os.str();
}

std::string describe_sync(const SyncMessage& m) {
    std::ostringstream os;
    os << "  kind: " << to_string(m.kind) << "\n";
    os << "  round: " << m.round << "\n";
    os << "  leader: " << m.leader.value << "\n";
    os << "  sender: " << m.sender.value << "\n";
    if (is_consistency_check(m.kind)) {
        os << "  view: " << format_bvv(decode_bvv(m.payload)) << "\n";
    } else if (m.kind == SyncKind::kRequest) {
        const auto r = decode_request(m.payload);
        os << "  request: issuer=" << r.issuer.value << " versions=" << r.from << ".." << r.to << "\n";
    } else {
        const auto msgs = decode_supply(m.payload);
        os << "  supply: " << msgs.size() << " binding messages\n";
    }
    return os.str();
}

std::string inspect_fixture(ByteView file) {
    const auto records = decode_fixture(file);
    std::ostringstream os;
    os << "fixture version " << static_cast<int>(kFixtureVersion) << ", " << records.size() << " records\n";
    std::size_t index = 0;
    for (const auto& rec : records) {
        const char* tag = rec.tag == RecordTag::kUpdate ? "update" : rec.tag == RecordTag::kBinding ? "binding" : "sync";
        os << "record " << index++ << " tag=" << tag << " offset=" << rec.body_offset << " length=" << rec.body.size()
           << "\n";
        try {
            switch (rec.tag) {
                case RecordTag::kUpdate: os << describe_update(decode_update(rec.body)); break;
                case RecordTag::kBinding: os << describe_binding(decode_binding(rec.body)); break;
                case RecordTag::kSync: os << describe_sync(decode_sync(rec.body)); break;
            }
        } catch (const Error& e) {
            if (e.code() != ErrorCode::kMalformedMessage || e.offset() < 0) throw;
            const long abs = static_cast<long>(rec.body_offset) + e.offset();
            std::string what = e.what();
            if (auto pos = what.rfind(" at offset "); pos != std::string::npos) what = what.substr(0, pos);
            throw Error(ErrorCode::kMalformedMessage, what + " at offset " + std::to_string(abs), abs);
        }
        os << hex_dump(rec.body, rec.body_offset);
    }
    return os.str();
}

}  // namespace fcbgp
