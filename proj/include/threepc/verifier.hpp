#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "threepc/bignum.hpp"
#include "threepc/digest.hpp"
#include "threepc/hashers.hpp"
#include "threepc/potfile.hpp"
#include "threepc/predicate.hpp"
#include "threepc/rng.hpp"

namespace threepc {

struct CheckResult
{
    bool cracked = false;
    /// Every password whose fresh hash equals the target. More than one means
    /// a collision inside the candidate set (plausible for CRC-32).
    std::vector<std::string> cleartexts;
    /// Lines that claim the target digest but do not re-hash to it.
    std::vector<std::size_t> forged_lines;
};

/// Looks for the target among records claiming its digest and re-hashes each;
/// recorded digests alone never count as a crack.
CheckResult chk_cs(std::span<const PotfileEntry> entries, const Digest& target, const HashAlgoDescriptor& algo);

struct PowResult
{
    bool pass = false;
    double z_score = 0;
};

inline constexpr double kDefaultZThreshold = 5.0;
inline constexpr std::size_t kDefaultSpotCheckSample = 1000;

/// Poisson check of the returned hit count: pass iff
/// |hits - r| <= z_threshold * sqrt(r). Throws std::invalid_argument if r <= 0.
PowResult proof_of_work(std::uint64_t hit_count, double expected_r, double z_threshold = kDefaultZThreshold);

struct SpotCheckResult
{
    bool pass = true;
    std::size_t sampled = 0;
    std::vector<std::size_t> failed_lines;
};

/// Re-hashes min(sample_size, entries.size()) distinct records chosen
/// uniformly. A record fails if its digest field is not the fresh hash of its
/// password or lies outside the vector. Throws std::invalid_argument when
/// sample_size is zero.
SpotCheckResult spot_check(std::span<const PotfileEntry> entries, const PredicateVector& vector,
                           const HashAlgoDescriptor& algo, std::size_t sample_size, Rng& rng);

struct VerifyOptions
{
    double z_threshold = kDefaultZThreshold;
    std::size_t sample_size = kDefaultSpotCheckSample;
    std::uint64_t seed = 0;
};

struct VerificationVerdict
{
    bool cracked = false;
    std::vector<std::string> cleartexts;
    std::uint64_t hit_count = 0;
    double expected_r = 0;
    double z_score = 0;
    bool pow_pass = false;
    bool spotcheck_pass = false;
    std::size_t sampled = 0;
    std::size_t forged = 0;
    std::uint64_t seed = 0;

    bool foul_play() const { return !pow_pass || !spotcheck_pass || forged > 0; }
    /// 0 cracked and honest, 3 not cracked but honest, 4 foul play suspected.
    int exit_code() const { return foul_play() ? 4 : (cracked ? 0 : 3); }
};

VerificationVerdict verify(std::span<const PotfileEntry> entries, const Digest& target, const PredicateVector& vector,
                           const HashAlgoDescriptor& algo, const BigInt& keyspace_size, const VerifyOptions& options);

/// Line-oriented "key: value" summary; z-score to 4 decimals.
std::string format_verdict(const VerificationVerdict& verdict);

} // namespace threepc
