#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace threepc {

/// Seeded generator with a portable bounded draw. std::mt19937_64 output is
/// fixed by the standard; the standard distributions are not, so draws and
/// shuffles are done here to keep seeded runs identical across toolchains.
class Rng
{
public:
    explicit Rng(std::uint64_t seed)
    : engine_{seed}
    , seed_{seed}
    {
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, bound). bound must be positive.
    std::uint64_t below(std::uint64_t bound)
    {
        // rejection sampling on the largest multiple of bound
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t x;
        do
            x = engine_();
        while (x >= limit);
        return x % bound;
    }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    template <typename T>
    void shuffle(std::span<T> items)
    {
        for (std::size_t i = items.size(); i > 1; --i)
            std::swap(items[i - 1], items[below(i)]);
    }

private:
    std::mt19937_64 engine_;
    std::uint64_t seed_;
};

} // namespace threepc
