#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "threepc/bignum.hpp"
#include "threepc/digest.hpp"

namespace threepc {

/// Inclusive range of admissible values for one digest nibble. hi < lo is
/// permitted and admits nothing.
struct NibbleRange
{
    std::uint8_t lo = 0;
    std::uint8_t hi = 15;

    friend bool operator==(const NibbleRange&, const NibbleRange&) = default;
};

/// Thrown when a vector and a digest disagree on length.
class LengthMismatch : public std::logic_error
{
public:
    using std::logic_error::logic_error;
};

/// Thrown by to_hit_mask when the vector is not byte-granular.
class HitMaskUnsupported : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Per-nibble interval box describing a decoy set. A digest belongs to the set
/// iff every nibble lies inside its range.
class PredicateVector
{
public:
    PredicateVector() = default;
    /// Throws std::invalid_argument if a bound exceeds 15.
    explicit PredicateVector(std::vector<NibbleRange> ranges);

    /// The zero-knowledge vector: every nibble unconstrained.
    static PredicateVector full_range(std::size_t length);
    /// The one-element set {target}.
    static PredicateVector singleton(const Digest& target);
    /// Parses 2l hex characters, lo then hi per nibble. Case-insensitive.
    static PredicateVector parse(std::string_view hex);

    std::size_t size() const { return ranges_.size(); }
    std::span<const NibbleRange> ranges() const { return ranges_; }
    const NibbleRange& operator[](std::size_t i) const { return ranges_[i]; }

    /// Membership test. Always performs exactly 2l comparisons with no early exit,
    /// so the cost is independent of the set size. Throws LengthMismatch.
    bool contains(const Digest& digest) const;

    /// Membership test over a raw digest; nibble 2k is the high half of byte k.
    /// Requires size() == 2 * bytes.size().
    bool contains_bytes(std::span<const std::uint8_t> bytes) const noexcept
    {
        unsigned ok = 1;
        const NibbleRange* r = ranges_.data();
        for (std::size_t k = 0; k < bytes.size(); ++k)
        {
            const unsigned high = bytes[k] >> 4;
            const unsigned low = bytes[k] & 0x0F;
            ok &= static_cast<unsigned>(high >= r[2 * k].lo) & static_cast<unsigned>(high <= r[2 * k].hi);
            ok &= static_cast<unsigned>(low >= r[2 * k + 1].lo) & static_cast<unsigned>(low <= r[2 * k + 1].hi);
        }
        return ok != 0;
    }

    /// |X| = prod max(hi - lo + 1, 0).
    BigInt cardinality() const;

    /// 2l lowercase hex characters.
    std::string to_hex() const;

    friend bool operator==(const PredicateVector&, const PredicateVector&) = default;

private:
    std::vector<NibbleRange> ranges_;
};

inline PredicateVector zk_vector(std::size_t length)
{
    return PredicateVector::full_range(length);
}

/// Byte-granular restriction: a template digest plus one bit per digest byte.
/// Bit n counted from the right selects byte n counted from the right; a set bit
/// means that byte must match the template exactly.
struct HitMask
{
    Digest masked;           ///< target with unconstrained bytes zeroed
    std::vector<bool> keep;  ///< keep[n]: n-th byte from the right is fixed

    /// ceil(bits / 4) uppercase hex characters, e.g. "C001".
    std::string mask_hex() const;
    /// Parses a mask for a digest of `byte_count` bytes. Throws std::invalid_argument.
    static std::vector<bool> parse_mask(std::string_view hex, std::size_t byte_count);
};

/// Throws std::invalid_argument on odd digest length or mask length mismatch.
PredicateVector from_hit_mask(const Digest& target, std::string_view mask_hex);
PredicateVector from_hit_mask(const Digest& target, const std::vector<bool>& keep);

/// Throws HitMaskUnsupported unless every nibble range is a singleton or
/// full-range and both nibbles of each byte agree.
HitMask to_hit_mask(const PredicateVector& vector);

/// True iff no prime factor exceeds 13 (zero counts as smooth).
bool is_13_smooth(const BigInt& value);

} // namespace threepc
