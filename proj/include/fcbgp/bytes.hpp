#pragma once

#include "fcbgp/types.hpp"

namespace fcbgp {

/// Big-endian append-only writer.
class ByteWriter {
public:
    void u8(std::uint8_t v) { out_.push_back(v); }
    void u16(std::uint16_t v) {
        out_.push_back(static_cast<std::uint8_t>(v >> 8));
        out_.push_back(static_cast<std::uint8_t>(v));
    }
    void u32(std::uint32_t v) {
        for (int i = 3; i >= 0; --i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void u64(std::uint64_t v) {
        for (int i = 7; i >= 0; --i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void bytes(ByteView b) { out_.insert(out_.end(), b.begin(), b.end()); }

    std::size_t size() const { return out_.size(); }
    Bytes& buffer() { return out_; }
    Bytes take() { return std::move(out_); }

private:
    Bytes out_;
};

/// Bounds-checked big-endian reader. Every failure raises
/// kMalformedMessage carrying the absolute offset of the bad field.
class ByteReader {
public:
    explicit ByteReader(ByteView data, std::size_t base_offset = 0)
        : data_(data), base_(base_offset) {}

    std::uint8_t u8(const char* field) {
        need(1, field);
        return data_[pos_++];
    }
    std::uint16_t u16(const char* field) {
        need(2, field);
        std::uint16_t v = static_cast<std::uint16_t>(data_[pos_] << 8 | data_[pos_ + 1]);
        pos_ += 2;
        return v;
    }
    std::uint32_t u32(const char* field) {
        need(4, field);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v = v << 8 | data_[pos_ + i];
        pos_ += 4;
        return v;
    }
    std::uint64_t u64(const char* field) {
        need(8, field);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v = v << 8 | data_[pos_ + i];
        pos_ += 8;
        return v;
    }
    ByteView bytes(std::size_t n, const char* field) {
        need(n, field);
        ByteView v = data_.subspan(pos_, n);
        pos_ += n;
        return v;
    }

    std::size_t offset() const { return base_ + pos_; }
    std::size_t remaining() const { return data_.size() - pos_; }
    bool done() const { return pos_ == data_.size(); }

    [[noreturn]] void fail(const std::string& why) const {
        throw Error(ErrorCode::kMalformedMessage,
                    why + " at offset " + std::to_string(offset()), static_cast<long>(offset()));
    }

private:
    void need(std::size_t n, const char* field) const {
        if (data_.size() - pos_ < n) fail(std::string("truncated ") + field);
    }

    ByteView data_;
    std::size_t base_;
    std::size_t pos_ = 0;
};

}  // namespace fcbgp
