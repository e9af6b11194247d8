#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace threepc {

/// A hash output viewed as a sequence of hexadecimal symbols. Nibble 0 is the
/// most significant character of the conventional hex rendering.
class Digest
{
public:
    static constexpr std::size_t kMaxNibbles = 64;

    Digest() = default;

    /// Throws std::invalid_argument if a value exceeds 15 or the length is out of range.
    static Digest from_nibbles(std::span<const std::uint8_t> nibbles);
    static Digest from_bytes(std::span<const std::uint8_t> bytes);
    /// Case-insensitive. Throws std::invalid_argument on bad characters or length.
    static Digest from_hex(std::string_view hex);
    /// As from_hex, additionally requiring `expected_nibbles` symbols.
    static Digest from_hex(std::string_view hex, std::size_t expected_nibbles);

    std::size_t size() const { return size_; }
    std::uint8_t operator[](std::size_t i) const { return nibbles_[i]; }
    std::span<const std::uint8_t> nibbles() const { return {nibbles_.data(), size_}; }

    /// Lowercase hex, one character per nibble.
    std::string hex() const;

    friend bool operator==(const Digest& a, const Digest& b)
    {
        return a.size_ == b.size_ && a.nibbles_ == b.nibbles_;
    }

private:
    std::array<std::uint8_t, kMaxNibbles> nibbles_{};
    std::size_t size_ = 0;
};

/// Lowercase hex of raw bytes.
std::string to_hex(std::span<const std::uint8_t> bytes);

/// Value of a hex character, or -1.
int hex_value(char c);

} // namespace threepc
