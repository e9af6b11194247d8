#pragma once

// Deliberately naive reference implementations. They share no code with the
// library so that agreement between the two means something.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace oracle {

/// Bit-at-a-time reflected CRC-32, no lookup table.
inline std::uint32_t crc32(std::string_view data)
{
    std::uint32_t crc = 0xFFFFFFFFu;
    for (unsigned char byte : data)
    {
        crc ^= byte;
        for (int bit = 0; bit < 8; ++bit)
            crc = (crc & 1u) ? (crc >> 1) ^ 0xEDB88320u : crc >> 1;
    }
    return crc ^ 0xFFFFFFFFu;
}

inline std::string crc32_hex(std::string_view data)
{
    static const char digits[] = "0123456789abcdef";
    const std::uint32_t c = crc32(data);
    std::string out;
    for (int shift = 28; shift >= 0; shift -= 4)
        out.push_back(digits[(c >> shift) & 0xF]);
    return out;
}

inline int nibble(char c)
{
    if (c >= '0' && c <= '9')
        return c - '0';
    if (c >= 'a' && c <= 'f')
        return c - 'a' + 10;
    if (c >= 'A' && c <= 'F')
        return c - 'A' + 10;
    return -1;
}

/// Membership straight from the textual forms: vector "lohi..." and digest hex.
inline bool satisfies(std::string_view vector_hex, std::string_view digest_hex)
{
    if (vector_hex.size() != 2 * digest_hex.size())
        return false;
    for (std::size_t i = 0; i < digest_hex.size(); ++i)
    {
        const int x = nibble(digest_hex[i]);
        if (x < nibble(vector_hex[2 * i]) || x > nibble(vector_hex[2 * i + 1]))
            return false;
    }
    return true;
}

/// Counts digests of length l satisfying the vector by visiting all 16^l.
inline std::uint64_t brute_force_cardinality(std::string_view vector_hex)
{
    const std::size_t l = vector_hex.size() / 2;
    std::uint64_t total = 1;
    for (std::size_t i = 0; i < l; ++i)
        total *= 16;
    std::uint64_t count = 0;
    std::string digest(l, '0');
    static const char digits[] = "0123456789abcdef";
    for (std::uint64_t x = 0; x < total; ++x)
    {
        std::uint64_t v = x;
        for (std::size_t i = l; i-- > 0; v /= 16)
            digest[i] = digits[v % 16];
        count += satisfies(vector_hex, digest) ? 1 : 0;
    }
    return count;
}

/// Removes every factor 2..13 by trial division; true iff 1 remains.
template <typename Int>
bool smooth13(Int value)
{
    if (value == 0)
        return true;
    for (int p : {2, 3, 5, 7, 11, 13})
        while (value % p == 0)
            value /= p;
    return value == 1;
}

/// Cartesian product of character sets, leftmost slowest.
inline std::vector<std::string> product(const std::vector<std::string>& positions)
{
    std::vector<std::string> out{""};
    for (const auto& chars : positions)
    {
        std::vector<std::string> next;
        for (const auto& prefix : out)
            for (char c : chars)
                next.push_back(prefix + c);
        out = std::move(next);
    }
    return out;
}

} // namespace oracle
