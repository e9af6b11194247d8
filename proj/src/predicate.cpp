#include "threepc/predicate.hpp"

#include <algorithm>

namespace threepc {

int hex_value(char c)
{
    if (c >= '0' && c <= '9')
        return c - '0';
    if (c >= 'a' && c <= 'f')
        return c - 'a' + 10;
    if (c >= 'A' && c <= 'F')
        return c - 'A' + 10;
    return -1;
}

std::string to_hex(std::span<const std::uint8_t> bytes)
{
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (auto b : bytes)
    {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0x0F]);
    }
    return out;
}

Digest Digest::from_nibbles(std::span<const std::uint8_t> nibbles)
{
    if (nibbles.empty() || nibbles.size() > kMaxNibbles)
        throw std::invalid_argument("digest length out of range: " + std::to_string(nibbles.size()));
    Digest d;
    for (std::size_t i = 0; i < nibbles.size(); ++i)
    {
        if (nibbles[i] > 15)
            throw std::invalid_argument("nibble value out of range");
        d.nibbles_[i] = nibbles[i];
    }
    d.size_ = nibbles.size();
    return d;
}

Digest Digest::from_bytes(std::span<const std::uint8_t> bytes)
{
    if (bytes.empty() || bytes.size() * 2 > kMaxNibbles)
        throw std::invalid_argument("digest length out of range: " + std::to_string(bytes.size()) + " bytes");
    Digest d;
    for (std::size_t k = 0; k < bytes.size(); ++k)
    {
        d.nibbles_[2 * k] = bytes[k] >> 4;
        d.nibbles_[2 * k + 1] = bytes[k] & 0x0F;
    }
    d.size_ = bytes.size() * 2;
    return d;
}

Digest Digest::from_hex(std::string_view hex)
{
    if (hex.empty() || hex.size() > kMaxNibbles)
        throw std::invalid_argument("digest hex length out of range: " + std::to_string(hex.size()));
    Digest d;
    for (std::size_t i = 0; i < hex.size(); ++i)
    {
        const int v = hex_value(hex[i]);
        if (v < 0)
            throw std::invalid_argument("invalid hex character in digest: '" + std::string(hex) + "'");
        d.nibbles_[i] = static_cast<std::uint8_t>(v);
    }
    d.size_ = hex.size();
    return d;
}

Digest Digest::from_hex(std::string_view hex, std::size_t expected_nibbles)
{
    if (hex.size() != expected_nibbles)
        throw std::invalid_argument("digest must have " + std::to_string(expected_nibbles) + " hex characters, got "
                                    + std::to_string(hex.size()));
    return from_hex(hex);
}

std::string Digest::hex() const
{
    static constexpr char digits[] = "0123456789abcdef";
    std::string out(size_, '0');
    for (std::size_t i = 0; i < size_; ++i)
        out[i] = digits[nibbles_[i]];
    return out;
}

PredicateVector::PredicateVector(std::vector<NibbleRange> ranges)
: ranges_{std::move(ranges)}
{
    for (const auto& r : ranges_)
        if (r.lo > 15 || r.hi > 15)
            throw std::invalid_argument("predicate bound out of range [0,15]");
}

PredicateVector PredicateVector::full_range(std::size_t length)
{
    if (length == 0)
        throw std::invalid_argument("vector length must be positive");
    return PredicateVector(std::vector<NibbleRange>(length, NibbleRange{0, 15}));
}

PredicateVector PredicateVector::singleton(const Digest& target)
{
    std::vector<NibbleRange> ranges;
    ranges.reserve(target.size());
    for (auto n : target.nibbles())
        ranges.push_back({n, n});
    return PredicateVector(std::move(ranges));
}

PredicateVector PredicateVector::parse(std::string_view hex)
{
    if (hex.empty() || hex.size() % 2 != 0)
        throw std::invalid_argument("vector hex must have a positive even length, got " + std::to_string(hex.size()));
    std::vector<NibbleRange> ranges(hex.size() / 2);
    for (std::size_t i = 0; i < ranges.size(); ++i)
    {
        const int lo = hex_value(hex[2 * i]);
        const int hi = hex_value(hex[2 * i + 1]);
        if (lo < 0 || hi < 0)
            throw std::invalid_argument("invalid hex character in vector");
        ranges[i] = {static_cast<std::uint8_t>(lo), static_cast<std::uint8_t>(hi)};
    }
    return PredicateVector(std::move(ranges));
}

bool PredicateVector::contains(const Digest& digest) const
{
    if (digest.size() != ranges_.size())
        throw LengthMismatch("vector has " + std::to_string(ranges_.size()) + " positions, digest has "
                             + std::to_string(digest.size()));
    unsigned ok = 1;
    for (std::size_t i = 0; i < ranges_.size(); ++i)
    {
        const unsigned x = digest[i];
        ok &= static_cast<unsigned>(x >= ranges_[i].lo) & static_cast<unsigned>(x <= ranges_[i].hi);
    }
    return ok != 0;
}

BigInt PredicateVector::cardinality() const
{
    BigInt result = 1;
    for (const auto& r : ranges_)
    {
        if (r.hi < r.lo)
            return 0;
        result *= static_cast<unsigned>(r.hi - r.lo + 1);
    }
    return result;
}

std::string PredicateVector::to_hex() const
{
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(ranges_.size() * 2);
    for (const auto& r : ranges_)
    {
        out.push_back(digits[r.lo]);
        out.push_back(digits[r.hi]);
    }
    return out;
}

std::string HitMask::mask_hex() const
{
    static constexpr char digits[] = "0123456789ABCDEF";
    const std::size_t chars = (keep.size() + 3) / 4;
    std::string out(chars, '0');
    for (std::size_t n = 0; n < keep.size(); ++n)
        if (keep[n])
        {
            const std::size_t ch = chars - 1 - n / 4;
            out[ch] = digits[hex_value(out[ch]) | (1 << (n % 4))];
        }
    return out;
}

std::vector<bool> HitMask::parse_mask(std::string_view hex, std::size_t byte_count)
{
    const std::size_t chars = (byte_count + 3) / 4;
    if (hex.size() != chars)
        throw std::invalid_argument("hit mask for " + std::to_string(byte_count) + " bytes needs " + std::to_string(chars)
                                    + " hex characters, got " + std::to_string(hex.size()));
    std::vector<bool> keep(byte_count, false);
    for (std::size_t c = 0; c < chars; ++c)
    {
        const int v = hex_value(hex[chars - 1 - c]);
        if (v < 0)
            throw std::invalid_argument("invalid hex character in hit mask");
        for (int b = 0; b < 4; ++b)
        {
            const std::size_t n = 4 * c + b;
            const bool set = (v >> b) & 1;
            if (n >= byte_count)
            {
                if (set)
                    throw std::invalid_argument("hit mask has bits beyond the digest length");
                continue;
            }
            keep[n] = set;
        }
    }
    return keep;
}

PredicateVector from_hit_mask(const Digest& target, std::string_view mask_hex)
{
    if (target.size() % 2 != 0)
        throw std::invalid_argument("hit masks need an even digest length");
    return from_hit_mask(target, HitMask::parse_mask(mask_hex, target.size() / 2));
}

PredicateVector from_hit_mask(const Digest& target, const std::vector<bool>& keep)
{
    if (target.size() % 2 != 0)
        throw std::invalid_argument("hit masks need an even digest length");
    const std::size_t bytes = target.size() / 2;
    if (keep.size() != bytes)
        throw std::invalid_argument("hit mask length does not match digest");
    std::vector<NibbleRange> ranges(target.size());
    for (std::size_t n = 0; n < bytes; ++n)
    {
        const std::size_t byte_index = bytes - 1 - n; // n counts from the right
        for (std::size_t half = 0; half < 2; ++half)
        {
            const std::size_t i = 2 * byte_index + half;
            ranges[i] = keep[n] ? NibbleRange{target[i], target[i]} : NibbleRange{0, 15};
        }
    }
    return PredicateVector(std::move(ranges));
}

HitMask to_hit_mask(const PredicateVector& vector)
{
    if (vector.size() == 0 || vector.size() % 2 != 0 || vector.size() > Digest::kMaxNibbles)
        throw HitMaskUnsupported("hit masks need an even vector length");
    const std::size_t bytes = vector.size() / 2;
    std::vector<std::uint8_t> nibbles(vector.size(), 0);
    std::vector<bool> keep(bytes, false);
    for (std::size_t n = 0; n < bytes; ++n)
    {
        const std::size_t byte_index = bytes - 1 - n;
        const auto& a = vector[2 * byte_index];
        const auto& b = vector[2 * byte_index + 1];
        const auto full = [](const NibbleRange& r) { return r.lo == 0 && r.hi == 15; };
        const auto fixed = [](const NibbleRange& r) { return r.lo == r.hi; };
        if (full(a) && full(b))
            continue;
        if (fixed(a) && fixed(b))
        {
            keep[n] = true;
            nibbles[2 * byte_index] = a.lo;
            nibbles[2 * byte_index + 1] = b.lo;
            continue;
        }
        throw HitMaskUnsupported("byte " + std::to_string(byte_index) + " is not expressible in a hit mask");
    }
    return HitMask{Digest::from_nibbles(nibbles), std::move(keep)};
}

bool is_13_smooth(const BigInt& value)
{
    if (value == 0)
        return true;
    BigInt rest = value;
    for (unsigned p : {2u, 3u, 5u, 7u, 11u, 13u})
        while (rest % p == 0)
            rest /= p;
    return rest == 1;
}

} // namespace threepc
