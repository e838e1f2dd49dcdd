#include "fcbgp/types.hpp"

#include <arpa/inet.h>

#include <charconv>
#include <cstring>

namespace fcbgp {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::kInvalidArgument: return "invalid-argument";
        case ErrorCode::kParse: return "parse-error";
        case ErrorCode::kUnknownAs: return "unknown-as";
        case ErrorCode::kSignerMismatch: return "signer-mismatch";
        case ErrorCode::kOwnership: return "ownership";
        case ErrorCode::kMalformedMessage: return "malformed-message";
        case ErrorCode::kOverflow: return "overflow";
        case ErrorCode::kDegenerate: return "degenerate";
        case ErrorCode::kBudgetExhausted: return "budget-exhausted";
        case ErrorCode::kConflict: return "conflict";
        case ErrorCode::kIo: return "io";
    }
    return "unknown";
}

std::string to_string(AsNumber asn) { return std::to_string(asn.value); }

Prefix::Prefix(Family family, ByteView address, std::uint8_t length)
    : family_(family), length_(length) {
    const std::size_t size = address_size();
    if (address.size() != size) {
        throw Error(ErrorCode::kInvalidArgument, "prefix address has wrong size");
    }
    if (length > size * 8) {
        throw Error(ErrorCode::kInvalidArgument,
                    "prefix length " + std::to_string(length) + " out of range");
    }
    std::memcpy(address_.data(), address.data(), size);
    for (std::size_t bit = length; bit < size * 8; ++bit) {
        address_[bit / 8] &= static_cast<std::uint8_t>(~(0x80u >> (bit % 8)));
    }
}

Prefix Prefix::v4(std::uint8_t a, std::uint8_t b, std::uint8_t c, std::uint8_t d,
                  std::uint8_t length) {
    const std::uint8_t addr[4] = {a, b, c, d};
    return Prefix(Family::kV4, ByteView(addr, 4), length);
}

Prefix Prefix::parse(std::string_view text) {
    text = trim(text);
    const auto slash = text.find('/');
    if (slash == std::string_view::npos) {
        throw Error(ErrorCode::kParse, "prefix missing '/': " + std::string(text));
    }
    const std::string addr(text.substr(0, slash));
    const std::uint32_t length = parse_u32(text.substr(slash + 1), "prefix length");
    std::array<std::uint8_t, 16> buf{};
    if (addr.find(':') != std::string::npos) {
        if (inet_pton(AF_INET6, addr.c_str(), buf.data()) != 1 || length > 128) {
            throw Error(ErrorCode::kParse, "bad IPv6 prefix: " + std::string(text));
        }
        return Prefix(Family::kV6, ByteView(buf.data(), 16), static_cast<std::uint8_t>(length));
    }
    if (inet_pton(AF_INET, addr.c_str(), buf.data()) != 1 || length > 32) {
        throw Error(ErrorCode::kParse, "bad IPv4 prefix: " + std::string(text));
    }
    return Prefix(Family::kV4, ByteView(buf.data(), 4), static_cast<std::uint8_t>(length));
}

std::string Prefix::to_string() const {
    char buf[INET6_ADDRSTRLEN] = {};
    inet_ntop(family_ == Family::kV4 ? AF_INET : AF_INET6, address_.data(), buf, sizeof(buf));
    return std::string(buf) + "/" + std::to_string(length_);
}

std::string to_hex(ByteView bytes) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (auto b : bytes) {
        out.push_back(kDigits[b >> 4]);
        out.push_back(kDigits[b & 0x0f]);
    }
    return out;
}

Bytes from_hex(std::string_view hex) {
    auto nibble = [&](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        throw Error(ErrorCode::kParse, "bad hex digit");
    };
    if (hex.size() % 2 != 0) throw Error(ErrorCode::kParse, "odd-length hex string");
    Bytes out(hex.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = static_cast<std::uint8_t>(nibble(hex[2 * i]) << 4 | nibble(hex[2 * i + 1]));
    }
    return out;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(sep, start);
        if (pos == std::string_view::npos) {
            parts.push_back(text.substr(start));
            return parts;
        }
        parts.push_back(text.substr(start, pos - start));
        start = pos + 1;
    }
}

std::string_view trim(std::string_view text) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = text.find_last_not_of(" \t\r\n");
    return text.substr(first, last - first + 1);
}

std::uint32_t parse_u32(std::string_view text, const char* what) {
    text = trim(text);
    std::uint32_t value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
        throw Error(ErrorCode::kParse, std::string("bad ") + what + ": '" + std::string(text) + "'");
    }
    return value;
}

std::int64_t parse_i64(std::string_view text, const char* what) {
    text = trim(text);
    std::int64_t value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
        throw Error(ErrorCode::kParse, std::string("bad ") + what + ": '" + std::string(text) + "'");
    }
    return value;
}

}  // namespace fcbgp

std::size_t std::hash<fcbgp::Prefix>::operator()(const fcbgp::Prefix& p) const noexcept {
    std::size_t h = static_cast<std::size_t>(p.length()) * 131 + static_cast<std::size_t>(p.family());
    for (auto b : p.address()) h = h * 1099511628211ull ^ b;
    return h;
}
