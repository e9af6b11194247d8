#include <cmath>
#include <map>
#include <random>

#include <unistd.h>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "threepc/planner.hpp"

using namespace threepc;

namespace {

double as_double(const Rational& r)
{
    return to_double(r);
}

BigInt pow_big(unsigned base, unsigned exp)
{
    BigInt v = 1;
    for (unsigned i = 0; i < exp; ++i)
        v *= base;
    return v;
}

Digest random_digest(std::mt19937_64& gen, std::size_t l)
{
    std::vector<std::uint8_t> n(l);
    for (auto& x : n)
        x = static_cast<std::uint8_t>(gen() % 16);
    return Digest::from_nibbles(n);
}

} // namespace

TEST_CASE("N_v for the reference word list and PIN space")
{
    const auto words = plan_nv(fixtures::kRockYouSize, 20, 8);
    CHECK(as_double(words.nv_target) == doctest::Approx(5988.36).epsilon(1e-6));
    CHECK(words.nv_target == Rational(BigInt(20) * pow16(8), BigInt(fixtures::kRockYouSize)));

    const auto pins = plan_nv(BigInt(100'000'000), 10, 64);
    CHECK(as_double(pins.nv_target) / 1.158e70 == doctest::Approx(1.0).epsilon(1e-3));

    CHECK(plan_nv(pow16(8), 1, 8).nv_target == 1);
}

TEST_CASE("N_v preconditions")
{
    CHECK_THROWS_AS(plan_nv(0, 1, 8), std::invalid_argument);
    CHECK_THROWS_AS(plan_nv(10, 0, 8), std::invalid_argument);
    CHECK_THROWS_AS(plan_nv(10, Rational(-1), 8), std::invalid_argument);
}

TEST_CASE("smooth search near the word-list target")
{
    const auto choice = smooth_search(plan_nv(fixtures::kRockYouSize, 20, 8).nv_target, 8);
    CHECK(std::abs(choice.relative_error) <= 0.05);
    // 5880 is admissible, so the winner is at least as close in log space
    CHECK(std::abs(std::log(to_double(choice.value) / 5988.36)) <= std::abs(std::log(5880 / 5988.36)) + 1e-12);
    CHECK(choice.packing.product() == choice.value);
    CHECK(choice.factorization.value() == choice.value);
    CHECK(oracle::smooth13(choice.value));
}

TEST_CASE("smooth search hits powers of sixteen exactly")
{
    const auto choice = smooth_search(Rational(pow16(26)), 32);
    CHECK(choice.value == pow16(26));
    CHECK(choice.relative_error == 0);
    std::map<unsigned, int> counts;
    for (unsigned w : choice.packing.slot_sizes)
        ++counts[w];
    CHECK(counts[16] == 26);
    CHECK(counts[1] == 6);
}

TEST_CASE("unpackable smooth values are skipped")
{
    const BigInt five9 = pow_big(5, 9);
    SmoothFactorization f;
    f.exponents = {0, 0, 9, 0, 0, 0};
    CHECK_FALSE(pack_slots(f, 8).has_value());
    const auto choice = smooth_search(Rational(five9), 8);
    CHECK(choice.value != five9);
    CHECK(std::abs(choice.relative_error) <= 0.05);
    CHECK(pack_slots(choice.factorization, 8).has_value());
}

TEST_CASE("smooth search tie-breaking and tolerance")
{
    CHECK(smooth_search(1, 8).value == 1);
    CHECK(smooth_search(16, 1).value == 16);
    // 17 is not 13-smooth; ln(18/17) < ln(17/16)
    CHECK(smooth_search(17, 2, 0.1).value == 18);
    CHECK_THROWS_AS(smooth_search(Rational(1, 2), 8), std::invalid_argument);
    try
    {
        // one slot can only take values up to 16
        smooth_search(1000, 1, 0.05);
        FAIL("expected a widen-tolerance error");
    }
    catch (const WidenToleranceError& e)
    {
        REQUIRE(e.nearest().has_value());
        CHECK(e.nearest()->value == 16);
    }
}

TEST_CASE("smooth search results are packable and within tolerance across magnitudes")
{
    std::mt19937_64 gen(17);
    for (int i = 0; i < 300; ++i)
    {
        const std::size_t l = 8 + gen() % 57;
        const double log10_n = 1 + (gen() % 10'000) / 10'000.0 * (l * std::log10(16.0) - 1.5);
        const Rational n = parse_decimal("1e" + std::to_string(static_cast<int>(log10_n)))
                           * parse_decimal(std::to_string(1 + (gen() % 900) / 100.0));
        CAPTURE(l);
        const auto choice = smooth_search(n, l);
        CHECK(std::abs(choice.relative_error) <= 0.05);
        CHECK(choice.packing.slot_sizes.size() == l);
        CHECK(choice.packing.product() == choice.value);
        CHECK(oracle::smooth13(choice.value));
        for (unsigned w : choice.packing.slot_sizes)
            CHECK((w >= 1 && w <= 16));
    }
}

TEST_CASE("gen_v with the reference slot order")
{
    const auto target = Digest::from_hex(fixtures::kWordsTarget);
    const std::vector<unsigned> widths{4, 5, 2, 3, 7, 1, 1, 7};
    const auto reference = PredicateVector::parse(fixtures::kWordsVector);
    // the reference vector is one of the outputs place_windows can produce
    bool seen = false;
    for (std::uint64_t seed = 0; seed < 20'000 && !seen; ++seed)
    {
        Rng rng(seed);
        seen = place_windows(target, widths, rng) == reference;
    }
    CHECK(seen);
    for (std::size_t i = 0; i < widths.size(); ++i)
        CHECK(reference[i].hi - reference[i].lo + 1 == static_cast<int>(widths[i]));
}

TEST_CASE("gen_v extremes")
{
    std::mt19937_64 gen(1);
    const auto target = random_digest(gen, 32);
    Rng rng(5);
    CHECK(gen_v(target, SlotPacking{std::vector<unsigned>(32, 1)}, rng) == PredicateVector::singleton(target));
    CHECK(gen_v(target, SlotPacking{std::vector<unsigned>(32, 16)}, rng) == zk_vector(32));
}

TEST_CASE("window offsets are uniform")
{
    const auto target = Digest::from_hex("7");
    const std::vector<unsigned> widths{4};
    std::map<int, int> counts;
    const int runs = 100'000;
    for (int seed = 0; seed < runs; ++seed)
    {
        Rng rng(static_cast<std::uint64_t>(seed));
        ++counts[place_windows(target, widths, rng)[0].lo];
    }
    REQUIRE(counts.size() == 4);
    double chi2 = 0;
    for (int lo = 4; lo <= 7; ++lo)
    {
        const double freq = static_cast<double>(counts[lo]) / runs;
        CHECK(freq == doctest::Approx(0.25).epsilon(0.08)); // 0.25 +- 0.02
        chi2 += std::pow(counts[lo] - runs / 4.0, 2) / (runs / 4.0);
    }
    CHECK(chi2 < 16.27); // 3 degrees of freedom, p = 0.001
}

TEST_CASE("gen_v membership, cardinality and determinism")
{
    std::mt19937_64 gen(23);
    for (int i = 0; i < 10'000; ++i)
    {
        const std::size_t l = 1 + gen() % 64;
        const auto target = random_digest(gen, l);
        std::vector<unsigned> widths(l);
        for (auto& w : widths)
            w = 1 + gen() % 16;
        SlotPacking packing{widths};
        const std::uint64_t seed = gen();
        Rng a(seed), b(seed);
        const auto v = gen_v(target, packing, a);
        REQUIRE(v.contains(target));
        REQUIRE(v.cardinality() == packing.product());
        REQUIRE(gen_v(target, packing, b) == v);
    }
}

TEST_CASE("plan store refuses a second vector for a target")
{
    PlanStore store;
    const auto target = Digest::from_hex("c6bfaba2");
    Rng rng(1);
    const SlotPacking packing{{4, 5, 2, 3, 7, 1, 1, 7}};
    CHECK_NOTHROW(store.generate("crc32", target, packing, rng));
    CHECK(store.contains("crc32", target));
    CHECK_THROWS_AS(store.generate("crc32", target, packing, rng), DuplicatePlan);
    CHECK_THROWS_AS(store.record("crc32", target), DuplicatePlan);
    CHECK_NOTHROW(store.generate("crc32", Digest::from_hex("c6bfaba3"), packing, rng));
}

TEST_CASE("plan store persists across instances")
{
    const auto dir = std::filesystem::temp_directory_path() / ("threepc-store-" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    const auto index = dir / "plans.idx";
    std::filesystem::remove(index);
    const auto target = Digest::from_hex("00112233");
    {
        PlanStore store(index);
        store.record("crc32", target);
    }
    PlanStore reopened(index);
    CHECK(reopened.contains("crc32", target));
    CHECK_FALSE(reopened.contains("ntlm", target));
    std::filesystem::remove_all(dir);
}

TEST_CASE("expected candidates")
{
    const auto words = PredicateVector::parse(fixtures::kWordsVector);
    CHECK(as_double(expected_candidates(words, fixtures::kRockYouSize)) == doctest::Approx(19.638).epsilon(1e-4));
    CHECK(as_double(expected_candidates(words, BigInt(fixtures::kFrenchWords) * 10 * 32)) ==
          doctest::Approx(265.41).epsilon(1e-4));
    const auto ntlm = from_hit_mask(Digest::from_hex(fixtures::kNtlmTarget), fixtures::kNtlmMask);
    const BigInt keyspace = pow_big(62, 9);
    CHECK(keyspace == BigInt(13'537'086'546'263'552ULL));
    CHECK(std::abs(as_double(expected_candidates(ntlm, keyspace)) - 806'873'234.88) < 0.01);
    for (std::uint64_t n : {1ull, 77ull, 10'000'000ull})
        CHECK(expected_candidates(zk_vector(8), n) == n);
}

TEST_CASE("deniability")
{
    CHECK(as_double(deniability(PredicateVector::parse(fixtures::kWordsVector))) ==
          doctest::Approx(1.369e-6).epsilon(1e-3));
    CHECK(deniability(zk_vector(8)) == 1);
    CHECK(deniability(PredicateVector::singleton(Digest::from_hex("abcd"))) == Rational(1, 65536));
}

TEST_CASE("guess probability")
{
    CHECK(guess_probability(10, 4) == Rational(1, 6));
    CHECK(guess_probability(1000, 0) == Rational(1, 1000));
    CHECK(guess_probability(1000, 1000 - 20) == Rational(1, 20));
    CHECK_THROWS_AS(guess_probability(10, 10), std::invalid_argument);
    CHECK_THROWS_AS(guess_probability(10, 11), std::invalid_argument);
}

TEST_CASE("multi data set projection")
{
    const auto words = PredicateVector::parse(fixtures::kWordsVector);
    const std::vector<BigInt> sizes{fixtures::kRockYouSize, BigInt(193'866'880)};
    const auto projection = multi_dataset_projection(words, sizes);
    REQUIRE(projection.per_set.size() == 2);
    CHECK(as_double(projection.per_set[0]) == doctest::Approx(19.63).epsilon(1e-3));
    CHECK(as_double(projection.per_set[1]) == doctest::Approx(265.41).epsilon(1e-3));
    CHECK(projection.cumulative == projection.per_set[0] + projection.per_set[1]);

    const std::vector<BigInt> whole{pow16(8) / 4, pow16(8) / 4, pow16(8) / 2};
    CHECK(multi_dataset_projection(words, whole).cumulative == 5880);

    const std::vector<BigInt> one{BigInt(12345)};
    CHECK(multi_dataset_projection(words, one).cumulative == expected_candidates(words, 12345));
}

TEST_CASE("projection is additive over concatenation")
{
    std::mt19937_64 gen(4);
    const auto v = PredicateVector::parse(fixtures::kWordsVector);
    for (int i = 0; i < 100; ++i)
    {
        std::vector<BigInt> a(1 + gen() % 4), b(1 + gen() % 4);
        for (auto& x : a)
            x = gen() % 1'000'000;
        for (auto& x : b)
            x = gen() % 1'000'000;
        std::vector<BigInt> both = a;
        both.insert(both.end(), b.begin(), b.end());
        const auto pa = multi_dataset_projection(v, a);
        const auto pb = multi_dataset_projection(v, b);
        const auto pab = multi_dataset_projection(v, both);
        CHECK(pab.cumulative == pa.cumulative + pb.cumulative);
        for (std::size_t k = 0; k < a.size(); ++k)
            CHECK(pab.per_set[k] == pa.per_set[k]);
    }
}
