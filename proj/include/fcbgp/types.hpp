#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fcbgp {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

enum class ErrorCode {
    kInvalidArgument,
    kParse,
    kUnknownAs,
    kSignerMismatch,
    kOwnership,
    kMalformedMessage,
    kOverflow,
    kDegenerate,
    kBudgetExhausted,
    kConflict,
    kIo,
};

const char* to_string(ErrorCode code);

/// Library-wide exception. `offset()` is set for malformed wire input and
/// `line()` for text parsers; both are -1 when not applicable.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what, long offset = -1, long line = -1)
        : std::runtime_error(what), code_(code), offset_(offset), line_(line) {}

    ErrorCode code() const noexcept { return code_; }
    long offset() const noexcept { return offset_; }
    long line() const noexcept { return line_; }

private:
    ErrorCode code_;
    long offset_;
    long line_;
};

/// 32-bit AS number. Zero is reserved for the "Null" previous AS of an
/// origin pathlet and never names a real AS.
struct AsNumber {
    std::uint32_t value = 0;

    constexpr AsNumber() = default;
    constexpr explicit AsNumber(std::uint32_t v) : value(v) {}

    constexpr bool is_null() const { return value == 0; }
    friend constexpr auto operator<=>(AsNumber, AsNumber) = default;
};

inline constexpr AsNumber kNullAs{};

std::string to_string(AsNumber asn);

/// IPv4 or IPv6 prefix, always held in canonical form (host bits zero).
class Prefix {
public:
    enum class Family : std::uint8_t { kV4 = 4, kV6 = 6 };

    Prefix() = default;
    Prefix(Family family, ByteView address, std::uint8_t length);

    static Prefix v4(std::uint8_t a, std::uint8_t b, std::uint8_t c, std::uint8_t d,
                     std::uint8_t length);
    /// Parses "10.0.0.0/24" or "2001:db8::/32". Throws kParse.
    static Prefix parse(std::string_view text);

    Family family() const { return family_; }
    std::uint8_t length() const { return length_; }
    std::size_t address_size() const { return family_ == Family::kV4 ? 4 : 16; }
    ByteView address() const { return ByteView(address_.data(), address_size()); }

    std::string to_string() const;

    friend auto operator<=>(const Prefix&, const Prefix&) = default;

private:
    Family family_ = Family::kV4;
    std::uint8_t length_ = 0;
    std::array<std::uint8_t, 16> address_{};
};

std::string to_hex(ByteView bytes);
Bytes from_hex(std::string_view hex);

std::vector<std::string_view> split(std::string_view text, char sep);
std::string_view trim(std::string_view text);
std::uint32_t parse_u32(std::string_view text, const char* what);
std::int64_t parse_i64(std::string_view text, const char* what);

}  // namespace fcbgp

template <>
struct std::hash<fcbgp::AsNumber> {
    std::size_t operator()(fcbgp::AsNumber a) const noexcept {
        return std::hash<std::uint32_t>{}(a.value);
    }
};

template <>
struct std::hash<fcbgp::Prefix> {
    std::size_t operator()(const fcbgp::Prefix& p) const noexcept;
};
