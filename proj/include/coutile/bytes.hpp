#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace coutile {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

std::string to_hex(ByteView data);
Bytes bytes_of(std::string_view text);

/// Thrown by ByteReader when a buffer ends before a field does.
class DecodeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Big-endian field writer used by every wire format in the library.
class ByteWriter {
public:
    ByteWriter& u8(std::uint8_t v);
    ByteWriter& u16(std::uint16_t v);
    ByteWriter& u32(std::uint32_t v);
    ByteWriter& u64(std::uint64_t v);
    // Offset-binary encoding so that byte order matches numeric order.
    ByteWriter& i64(std::int64_t v);
    ByteWriter& raw(ByteView data);
    // u16 length prefix followed by the bytes.
    ByteWriter& str(std::string_view s);

    const Bytes& bytes() const& { return out_; }
    Bytes bytes() && { return std::move(out_); }

private:
    Bytes out_;
};

class ByteReader {
public:
    explicit ByteReader(ByteView data) : data_(data) {}

    std::uint8_t u8();
    std::uint16_t u16();
    std::uint32_t u32();
    std::uint64_t u64();
    std::int64_t i64();
    ByteView raw(std::size_t n);
    std::string str();

    bool done() const { return pos_ == data_.size(); }
    std::size_t remaining() const { return data_.size() - pos_; }

private:
    void need(std::size_t n) const;

    ByteView data_;
    std::size_t pos_ = 0;
};

} // namespace coutile
