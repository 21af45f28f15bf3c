#include "coutile/bytes.hpp"

namespace coutile {

std::string to_hex(ByteView data)
{
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(data.size() * 2);
    for (auto b : data) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0x0f]);
    }
    return out;
}

Bytes bytes_of(std::string_view text)
{
    return Bytes(text.begin(), text.end());
}

ByteWriter& ByteWriter::u8(std::uint8_t v)
{
    out_.push_back(v);
    return *this;
}

ByteWriter& ByteWriter::u16(std::uint16_t v)
{
    out_.push_back(static_cast<std::uint8_t>(v >> 8));
    out_.push_back(static_cast<std::uint8_t>(v));
    return *this;
}

ByteWriter& ByteWriter::u32(std::uint32_t v)
{
    for (int shift = 24; shift >= 0; shift -= 8)
        out_.push_back(static_cast<std::uint8_t>(v >> shift));
    return *this;
}

ByteWriter& ByteWriter::u64(std::uint64_t v)
{
    for (int shift = 56; shift >= 0; shift -= 8)
        out_.push_back(static_cast<std::uint8_t>(v >> shift));
    return *this;
}

ByteWriter& ByteWriter::i64(std::int64_t v)
{
    return u64(static_cast<std::uint64_t>(v) ^ (std::uint64_t{1} << 63));
}

ByteWriter& ByteWriter::raw(ByteView data)
{
    out_.insert(out_.end(), data.begin(), data.end());
    return *this;
}

ByteWriter& ByteWriter::str(std::string_view s)
{
    if (s.size() > 0xffff)
        throw std::length_error("string field longer than 65535 bytes");
    u16(static_cast<std::uint16_t>(s.size()));
    out_.insert(out_.end(), s.begin(), s.end());
    return *this;
}

void ByteReader::need(std::size_t n) const
{
    if (data_.size() - pos_ < n)
        throw DecodeError("truncated buffer");
}

std::uint8_t ByteReader::u8()
{
    need(1);
    return data_[pos_++];
}

std::uint16_t ByteReader::u16()
{
    need(2);
    std::uint16_t v = static_cast<std::uint16_t>((data_[pos_] << 8) | data_[pos_ + 1]);
    pos_ += 2;
    return v;
}

std::uint32_t ByteReader::u32()
{
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
        v = (v << 8) | data_[pos_++];
    return v;
}

std::uint64_t ByteReader::u64()
{
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
        v = (v << 8) | data_[pos_++];
    return v;
}

std::int64_t ByteReader::i64()
{
    return static_cast<std::int64_t>(u64() ^ (std::uint64_t{1} << 63));
}

ByteView ByteReader::raw(std::size_t n)
{
    need(n);
    auto view = data_.subspan(pos_, n);
    pos_ += n;
    return view;
}

std::string ByteReader::str()
{
    auto n = u16();
    auto view = raw(n);
    return std::string(view.begin(), view.end());
}

} // namespace coutile
