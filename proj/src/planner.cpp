#include "threepc/planner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <mutex>

namespace threepc {
namespace {

const std::array<double, 6> kLogPrimes = {std::log(2.0), std::log(3.0), std::log(5.0),
                                          std::log(7.0), std::log(11.0), std::log(13.0)};

// Smooth values split by prime group, sorted by log, bounded by 16^l.
struct SmoothTables
{
    struct Entry
    {
        double log;
        std::uint16_t e[3];
    };

    std::vector<Entry> low;  // 2^a 3^b 5^c
    std::vector<Entry> high; // 7^d 11^e 13^f with d+e+f <= l
};

std::shared_ptr<const SmoothTables> build_tables(std::size_t length)
{
    auto tables = std::make_shared<SmoothTables>();
    const double limit = static_cast<double>(length) * std::log(16.0) + 1e-9;

    for (unsigned c = 0; c * kLogPrimes[2] <= limit; ++c)
        for (unsigned b = 0; c * kLogPrimes[2] + b * kLogPrimes[1] <= limit; ++b)
            for (unsigned a = 0;; ++a)
            {
                const double lg = a * kLogPrimes[0] + b * kLogPrimes[1] + c * kLogPrimes[2];
                if (lg > limit)
                    break;
                tables->low.push_back({lg, {std::uint16_t(a), std::uint16_t(b), std::uint16_t(c)}});
            }

    for (unsigned f = 0; f <= length && f * kLogPrimes[5] <= limit; ++f)
        for (unsigned e = 0; e + f <= length && f * kLogPrimes[5] + e * kLogPrimes[4] <= limit; ++e)
            for (unsigned d = 0; d + e + f <= length; ++d)
            {
                const double lg = d * kLogPrimes[3] + e * kLogPrimes[4] + f * kLogPrimes[5];
                if (lg > limit)
                    break;
                tables->high.push_back({lg, {std::uint16_t(d), std::uint16_t(e), std::uint16_t(f)}});
            }

    const auto by_log = [](const SmoothTables::Entry& x, const SmoothTables::Entry& y) { return x.log < y.log; };
    std::sort(tables->low.begin(), tables->low.end(), by_log);
    std::sort(tables->high.begin(), tables->high.end(), by_log);
    return tables;
}

std::shared_ptr<const SmoothTables> tables_for(std::size_t length)
{
    static std::mutex mutex;
    static std::map<std::size_t, std::shared_ptr<const SmoothTables>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[length];
    if (!slot)
        slot = build_tables(length);
    return slot;
}

// FFD into at most `slots` bins; fills `bins` with the bin products.
bool ffd(const std::array<unsigned, 6>& exponents, std::size_t slots, std::vector<unsigned>& bins)
{
    bins.clear();
    for (int k = 5; k >= 0; --k)
    {
        const unsigned p = SmoothFactorization::kPrimes[k];
        for (unsigned n = 0; n < exponents[k]; ++n)
        {
            bool placed = false;
            for (auto& bin : bins)
                if (bin * p <= 16)
                {
                    bin *= p;
                    placed = true;
                    break;
                }
            if (!placed)
            {
                if (bins.size() >= slots)
                    return false;
                bins.push_back(p);
            }
        }
    }
    return true;
}

struct SearchResult
{
    bool found = false;
    std::array<unsigned, 6> exponents{};
    double log_error = std::numeric_limits<double>::infinity();
    double log_value = 0;
};

SearchResult search(const SmoothTables& tables, double log_target, std::size_t length, double band_lo, double band_hi)
{
    SearchResult best;
    std::vector<unsigned> bins;
    bins.reserve(length);
    const auto& low = tables.low;
    std::size_t p = low.size();

    // Returns true when the candidate is packable (scanning further in the same
    // direction can only be worse).
    const auto consider = [&](const SmoothTables::Entry& lo, const SmoothTables::Entry& hi, double err) {
        const std::array<unsigned, 6> ex{lo.e[0], lo.e[1], lo.e[2], hi.e[0], hi.e[1], hi.e[2]};
        if (!ffd(ex, length, bins))
            return false;
        const double abs_err = std::abs(err);
        const double value_log = lo.log + hi.log;
        constexpr double eps = 1e-12;
        if (!best.found || abs_err < best.log_error - eps
            || (abs_err <= best.log_error + eps && value_log < best.log_value))
        {
            best.found = true;
            best.exponents = ex;
            best.log_error = abs_err;
            best.log_value = value_log;
        }
        return true;
    };

    for (const auto& hi : tables.high)
    {
        if (hi.log - log_target > std::min(best.log_error, band_hi) + 1e-12)
            break;
        const double t = log_target - hi.log;
        while (p > 0 && low[p - 1].log >= t)
            --p;
        for (std::size_t q = p; q < low.size(); ++q)
        {
            const double err = low[q].log - t;
            if (err > band_hi || err > best.log_error + 1e-12)
                break;
            if (consider(low[q], hi, err))
                break;
        }
        for (std::size_t q = p; q-- > 0;)
        {
            const double err = low[q].log - t;
            if (err < band_lo || -err > best.log_error + 1e-12)
                break;
            if (consider(low[q], hi, err))
                break;
        }
    }
    return best;
}

SmoothChoice make_choice(const std::array<unsigned, 6>& exponents, std::size_t length, const Rational& target)
{
    SmoothChoice choice;
    choice.factorization.exponents = exponents;
    choice.packing = *pack_slots(choice.factorization, length);
    choice.value = choice.factorization.value();
    choice.relative_error = to_double(Rational(choice.value) / target - 1);
    return choice;
}

} // namespace

BigInt SmoothFactorization::value() const
{
    BigInt v = 1;
    for (std::size_t k = 0; k < kPrimes.size(); ++k)
        v *= boost::multiprecision::pow(BigInt(kPrimes[k]), exponents[k]);
    return v;
}

double SmoothFactorization::log_value() const
{
    double lg = 0;
    for (std::size_t k = 0; k < kPrimes.size(); ++k)
        lg += exponents[k] * kLogPrimes[k];
    return lg;
}

std::string SmoothFactorization::to_string() const
{
    std::string out;
    for (std::size_t k = 0; k < kPrimes.size(); ++k)
    {
        if (exponents[k] == 0)
            continue;
        if (!out.empty())
            out += '*';
        out += std::to_string(kPrimes[k]);
        if (exponents[k] > 1)
            out += '^' + std::to_string(exponents[k]);
    }
    return out.empty() ? "1" : out;
}

BigInt SlotPacking::product() const
{
    BigInt v = 1;
    for (unsigned s : slot_sizes)
        v *= s;
    return v;
}

std::optional<SlotPacking> pack_slots(const SmoothFactorization& factorization, std::size_t slots)
{
    std::vector<unsigned> bins;
    if (!ffd(factorization.exponents, slots, bins))
        return std::nullopt;
    bins.resize(slots, 1);
    return SlotPacking{std::move(bins)};
}

SmoothChoice smooth_search(const Rational& nv_target, std::size_t length, double tolerance)
{
    if (nv_target < 1)
        throw std::invalid_argument("smooth_search: target must be at least 1");
    if (length == 0)
        throw std::invalid_argument("smooth_search: length must be positive");
    if (!(tolerance >= 0) || tolerance >= 1)
        throw std::invalid_argument("smooth_search: tolerance must be in [0, 1)");

    const auto tables = tables_for(length);
    const double log_target = log_of(nv_target);
    const double band_lo = std::log1p(-tolerance);
    const double band_hi = std::log1p(tolerance);
    constexpr double kNoBand = std::numeric_limits<double>::infinity();

    const SearchResult banded = search(*tables, log_target, length, band_lo - 1e-12, band_hi + 1e-12);
    if (banded.found)
    {
        auto choice = make_choice(banded.exponents, length, nv_target);
        // the log-space band is padded by 1e-12; confirm exactly
        if (std::abs(choice.relative_error) <= tolerance)
            return choice;
    }

    const SearchResult nearest = search(*tables, log_target, length, -kNoBand, kNoBand);
    std::optional<SmoothChoice> nearest_choice;
    std::string message = "no packable 13-smooth value within " + std::to_string(tolerance * 100)
                          + "% of N=" + format_real(nv_target, 8) + " for l=" + std::to_string(length);
    if (nearest.found)
    {
        nearest_choice = make_choice(nearest.exponents, length, nv_target);
        message += "; nearest is " + nearest_choice->factorization.to_string() + " = " + to_decimal(nearest_choice->value)
                   + " (relative error " + std::to_string(nearest_choice->relative_error) + "); widen the tolerance";
    }
    throw WidenToleranceError(message, std::move(nearest_choice));
}

PlanParameters plan_nv(const BigInt& keyspace_size, const Rational& r, std::size_t length)
{
    if (keyspace_size < 1)
        throw std::invalid_argument("keyspace size must be at least 1");
    if (r <= 0)
        throw std::invalid_argument("expected candidate count r must be positive");
    PlanParameters params;
    params.keyspace_size = keyspace_size;
    params.expected_candidates = r;
    params.digest_length = length;
    params.nv_target = r * Rational(pow16(length)) / Rational(keyspace_size);
    return params;
}

PredicateVector place_windows(const Digest& target, std::span<const unsigned> widths, Rng& rng)
{
    if (widths.size() != target.size())
        throw LengthMismatch("slot count does not match digest length");
    std::vector<NibbleRange> ranges(target.size());
    for (std::size_t i = 0; i < widths.size(); ++i)
    {
        const int f = static_cast<int>(widths[i]);
        if (f < 1 || f > 16)
            throw std::invalid_argument("slot width out of range [1,16]");
        const int t = target[i];
        const int lo_min = std::max(0, t - f + 1);
        const int lo_max = std::min(16 - f, t);
        const int lo = lo_min + static_cast<int>(rng.below(static_cast<std::uint64_t>(lo_max - lo_min + 1)));
        ranges[i] = {static_cast<std::uint8_t>(lo), static_cast<std::uint8_t>(lo + f - 1)};
    }
    return PredicateVector(std::move(ranges));
}

PredicateVector gen_v(const Digest& target, const SlotPacking& packing, Rng& rng)
{
    std::vector<unsigned> widths = packing.slot_sizes;
    if (widths.size() != target.size())
        throw LengthMismatch("packing has " + std::to_string(widths.size()) + " slots, digest has "
                             + std::to_string(target.size()) + " nibbles");
    rng.shuffle(std::span<unsigned>(widths));
    return place_windows(target, widths, rng);
}

PlanStore::PlanStore(std::filesystem::path index_file)
: index_file_{std::move(index_file)}
{
    std::ifstream in(*index_file_);
    std::string line;
    while (std::getline(in, line))
        if (!line.empty())
            keys_.insert(line);
}

std::string PlanStore::key(std::string_view algo, const Digest& target)
{
    return std::string(algo) + ":" + target.hex();
}

bool PlanStore::contains(std::string_view algo, const Digest& target) const
{
    return keys_.count(key(algo, target)) != 0;
}

void PlanStore::record(std::string_view algo, const Digest& target)
{
    const auto k = key(algo, target);
    if (keys_.count(k))
        throw DuplicatePlan("a vector was already generated for target " + target.hex()
                            + "; generating another would shrink its anonymity set");
    if (index_file_)
    {
        if (index_file_->has_parent_path())
            std::filesystem::create_directories(index_file_->parent_path());
        std::ofstream out(*index_file_, std::ios::app);
        out << k << '\n';
        if (!out)
            throw std::runtime_error("cannot write plan store " + index_file_->string());
    }
    keys_.insert(k);
}

PredicateVector PlanStore::generate(std::string_view algo, const Digest& target, const SlotPacking& packing, Rng& rng)
{
    if (contains(algo, target))
        throw DuplicatePlan("a vector was already generated for target " + target.hex()
                            + "; generating another would shrink its anonymity set");
    auto vector = gen_v(target, packing, rng);
    record(algo, target);
    return vector;
}

Rational expected_candidates(const PredicateVector& vector, const BigInt& keyspace_size)
{
    return Rational(vector.cardinality() * keyspace_size) / Rational(pow16(vector.size()));
}

Rational deniability(const PredicateVector& vector)
{
    return Rational(vector.cardinality()) / Rational(pow16(vector.size()));
}

Rational guess_probability(const BigInt& keyspace_size, const BigInt& sorted_out)
{
    if (sorted_out >= keyspace_size || sorted_out < 0)
        throw std::invalid_argument("sorted-out count must be below the keyspace size");
    return Rational(1) / Rational(keyspace_size - sorted_out);
}

Projection multi_dataset_projection(const PredicateVector& vector, std::span<const BigInt> sizes)
{
    Projection projection;
    projection.cumulative = 0;
    for (const auto& size : sizes)
    {
        projection.per_set.push_back(expected_candidates(vector, size));
        projection.cumulative += projection.per_set.back();
    }
    return projection;
}

} // namespace threepc
