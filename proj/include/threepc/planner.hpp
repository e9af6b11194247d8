#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "threepc/bignum.hpp"
#include "threepc/digest.hpp"
#include "threepc/predicate.hpp"
#include "threepc/rng.hpp"

namespace threepc {

/// 2^A 3^B 5^C 7^D 11^E 13^F.
struct SmoothFactorization
{
    static constexpr std::array<unsigned, 6> kPrimes{2, 3, 5, 7, 11, 13};

    std::array<unsigned, 6> exponents{};

    BigInt value() const;
    double log_value() const;
    /// e.g. "2^3*3*5*7^2"; "1" for the empty product.
    std::string to_string() const;

    friend bool operator==(const SmoothFactorization&, const SmoothFactorization&) = default;
};

/// Window widths for each of the l digest positions.
struct SlotPacking
{
    std::vector<unsigned> slot_sizes;

    BigInt product() const;
};

/// First-fit-decreasing placement of the prime factors (largest prime first)
/// into `slots` bins with product cap 16. Unused bins get width 1.
/// Returns nullopt when FFD needs more than `slots` bins.
std::optional<SlotPacking> pack_slots(const SmoothFactorization& factorization, std::size_t slots);

struct SmoothChoice
{
    SmoothFactorization factorization;
    SlotPacking packing;
    BigInt value;
    double relative_error = 0; ///< value / target - 1
};

/// No packable smooth value inside the tolerance band. Carries the nearest
/// packable candidate when one exists at all.
class WidenToleranceError : public std::runtime_error
{
public:
    WidenToleranceError(const std::string& what, std::optional<SmoothChoice> nearest)
    : std::runtime_error(what)
    , nearest_{std::move(nearest)}
    {
    }

    const std::optional<SmoothChoice>& nearest() const { return nearest_; }

private:
    std::optional<SmoothChoice> nearest_;
};

inline constexpr double kDefaultTolerance = 0.05;

/// Finds the FFD-packable 13-smooth value closest to `nv_target` in log space
/// among those with |value / nv_target - 1| <= tolerance. Ties go to the
/// smaller value. Exact over all candidates; deterministic.
SmoothChoice smooth_search(const Rational& nv_target, std::size_t length, double tolerance = kDefaultTolerance);

struct PlanParameters
{
    BigInt keyspace_size;
    Rational expected_candidates; ///< r
    std::size_t digest_length = 0;
    Rational nv_target; ///< r * 16^l / |DS|

    double nv_target_real() const { return to_double(nv_target); }
};

/// Throws std::invalid_argument for a zero keyspace or non-positive r.
PlanParameters plan_nv(const BigInt& keyspace_size, const Rational& r, std::size_t length);

/// Places one window per position: width widths[i], containing target[i],
/// offset drawn uniformly from the valid range.
PredicateVector place_windows(const Digest& target, std::span<const unsigned> widths, Rng& rng);

/// Randomly permutes the slot widths across positions, then places windows.
PredicateVector gen_v(const Digest& target, const SlotPacking& packing, Rng& rng);

class DuplicatePlan : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Remembers which targets already have a vector. Generating a second vector
/// for a target would let an observer intersect the two decoy sets.
class PlanStore
{
public:
    /// In-memory store.
    PlanStore() = default;
    /// Store persisted as an index file; created on first use.
    explicit PlanStore(std::filesystem::path index_file);

    bool contains(std::string_view algo, const Digest& target) const;

    /// gen_v guarded by the store. Throws DuplicatePlan.
    PredicateVector generate(std::string_view algo, const Digest& target, const SlotPacking& packing, Rng& rng);

    /// Records a vector created elsewhere (e.g. from a hit mask). Throws DuplicatePlan.
    void record(std::string_view algo, const Digest& target);

private:
    static std::string key(std::string_view algo, const Digest& target);

    std::optional<std::filesystem::path> index_file_;
    std::set<std::string> keys_;
};

/// |X| * |DS| / 16^l.
Rational expected_candidates(const PredicateVector& vector, const BigInt& keyspace_size);

/// |X| / 16^l: chance that an arbitrary digest falls in the decoy set.
Rational deniability(const PredicateVector& vector);

/// 1 / (|DS| - sorted_out). Throws std::invalid_argument if sorted_out >= |DS|.
Rational guess_probability(const BigInt& keyspace_size, const BigInt& sorted_out);

struct Projection
{
    std::vector<Rational> per_set;
    Rational cumulative;
};

/// Expected candidates from each of several disjoint data sets and their sum.
Projection multi_dataset_projection(const PredicateVector& vector, std::span<const BigInt> sizes);

} // namespace threepc
