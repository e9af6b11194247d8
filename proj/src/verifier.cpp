#include "threepc/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <unordered_set>

#include "threepc/planner.hpp"

namespace threepc {
namespace {

bool same_digest(std::string_view hex, const Digest& digest)
{
    if (hex.size() != digest.size())
        return false;
    for (std::size_t i = 0; i < hex.size(); ++i)
        if (hex_value(hex[i]) != digest[i])
            return false;
    return true;
}

bool rehashes_to(const HashAlgoDescriptor& algo, std::string_view password, const Digest& expected)
{
    std::uint8_t out[32];
    const std::size_t n = algo.hash(password, out);
    return n != 0 && Digest::from_bytes({out, n}) == expected;
}

// Floyd's algorithm: k distinct indices from [0, n) without materializing n.
std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k, Rng& rng)
{
    std::unordered_set<std::size_t> chosen;
    chosen.reserve(k * 2);
    for (std::size_t j = n - k; j < n; ++j)
    {
        const auto t = static_cast<std::size_t>(rng.below(j + 1));
        if (!chosen.insert(t).second)
            chosen.insert(j);
    }
    std::vector<std::size_t> out(chosen.begin(), chosen.end());
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

CheckResult chk_cs(std::span<const PotfileEntry> entries, const Digest& target, const HashAlgoDescriptor& algo)
{
    CheckResult result;
    for (const auto& e : entries)
    {
        if (!same_digest(e.digest_hex, target))
            continue;
        if (rehashes_to(algo, e.password, target))
        {
            result.cracked = true;
            result.cleartexts.push_back(e.password);
        }
        else
            result.forged_lines.push_back(e.line);
    }
    return result;
}

PowResult proof_of_work(std::uint64_t hit_count, double expected_r, double z_threshold)
{
    if (!(expected_r > 0))
        throw std::invalid_argument("proof_of_work needs a positive expected count");
    const double z = (static_cast<double>(hit_count) - expected_r) / std::sqrt(expected_r);
    return {std::abs(z) <= z_threshold, z};
}

SpotCheckResult spot_check(std::span<const PotfileEntry> entries, const PredicateVector& vector,
                           const HashAlgoDescriptor& algo, std::size_t sample_size, Rng& rng)
{
    if (sample_size == 0)
        throw std::invalid_argument("spot-check sample size must be at least 1");
    SpotCheckResult result;
    const std::size_t k = std::min(sample_size, entries.size());
    for (std::size_t idx : sample_indices(entries.size(), k, rng))
    {
        const auto& e = entries[idx];
        bool ok = e.digest_hex.size() == algo.digest_nibbles;
        if (ok)
        {
            const Digest recorded = Digest::from_hex(e.digest_hex);
            ok = vector.size() == recorded.size() && vector.contains(recorded) && rehashes_to(algo, e.password, recorded);
        }
        if (!ok)
            result.failed_lines.push_back(e.line);
    }
    result.sampled = k;
    result.pass = result.failed_lines.empty();
    return result;
}

VerificationVerdict verify(std::span<const PotfileEntry> entries, const Digest& target, const PredicateVector& vector,
                           const HashAlgoDescriptor& algo, const BigInt& keyspace_size, const VerifyOptions& options)
{
    VerificationVerdict verdict;
    verdict.seed = options.seed;

    const auto check = chk_cs(entries, target, algo);
    verdict.cracked = check.cracked;
    verdict.cleartexts = check.cleartexts;
    verdict.forged = check.forged_lines.size();
    verdict.hit_count = entries.size();

    verdict.expected_r = to_double(expected_candidates(vector, keyspace_size));
    if (verdict.expected_r > 0)
    {
        const auto pow = proof_of_work(verdict.hit_count, verdict.expected_r, options.z_threshold);
        verdict.pow_pass = pow.pass;
        verdict.z_score = pow.z_score;
    }
    else
    {
        // an empty decoy set can only honestly produce nothing
        verdict.pow_pass = verdict.hit_count == 0;
        verdict.z_score = 0;
    }

    Rng rng(options.seed);
    const auto spot = spot_check(entries, vector, algo, std::max<std::size_t>(options.sample_size, 1), rng);
    verdict.spotcheck_pass = spot.pass;
    verdict.sampled = spot.sampled;
    return verdict;
}

std::string format_verdict(const VerificationVerdict& v)
{
    std::ostringstream out;
    const auto yes_no = [](bool b) { return b ? "yes" : "no"; };
    out << "cracked: " << yes_no(v.cracked) << '\n';
    for (const auto& c : v.cleartexts)
        out << "cleartext: " << c << '\n';
    out << "hit_count: " << v.hit_count << '\n';
    out << "expected_r: " << std::setprecision(10) << v.expected_r << '\n';
    out << "z_score: " << std::fixed << std::setprecision(4) << v.z_score << '\n';
    out << "pow_pass: " << yes_no(v.pow_pass) << '\n';
    out << "spotcheck_pass: " << yes_no(v.spotcheck_pass) << '\n';
    out << "sampled: " << v.sampled << '\n';
    out << "forged: " << v.forged << '\n';
    out << "seed: " << v.seed << '\n';
    out << "verdict: " << (v.foul_play() ? "foul-play-suspected" : (v.cracked ? "cracked" : "not-cracked")) << '\n';
    return out.str();
}

} // namespace threepc
