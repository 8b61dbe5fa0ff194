#ifndef MSLR_RNG_HPP
#define MSLR_RNG_HPP

#include <cstdint>
#include <random>

namespace mslr
{
    /// Seeded generator used by every stochastic component.
    ///
    /// The raw stream is std::mt19937_64, whose output sequence is fixed by
    /// the standard. All derived variates use transforms written here rather
    /// than the implementation-defined <random> distributions, so a seed
    /// replays the same stream on every platform:
    ///   uniform()  : top 53 bits of one draw, scaled to [0, 1)
    ///   below(b)   : rejection sampling on the top bits, unbiased on [0, b)
    ///   normal()   : Box-Muller on two uniforms, second variate cached
    class Rng
    {
    public:
        explicit Rng(std::uint64_t seed) : engine_(seed) {}

        std::uint64_t next_u64() { return engine_(); }

        double uniform();

        /// Uniform integer on [0, bound). bound must be positive.
        std::uint64_t below(std::uint64_t bound);

        /// Uniform integer on the closed range [lo, hi].
        std::int64_t between(std::int64_t lo, std::int64_t hi);

        /// +1 or -1 with equal probability.
        int sign() { return (engine_() >> 63) ? 1 : -1; }

        double normal();

    private:
        std::mt19937_64 engine_;
        double spare_ = 0.0;
        bool has_spare_ = false;
    };

    /// splitmix64 mix of (master, index); used to fan one master seed out to
    /// independent per-trial and per-role streams.
    std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);
} // namespace mslr

#endif
