#include "mslr/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mslr
{
    double Rng::uniform()
    {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    std::uint64_t Rng::below(std::uint64_t bound)
    {
        if (bound == 0)
            throw std::invalid_argument("Rng::below: bound must be positive");
        if (bound == 1)
            return 0;
        // 2^64 mod bound leading values are rejected so the modulus is unbiased
        const std::uint64_t threshold = (0 - bound) % bound;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x < threshold);
        return x % bound;
    }

    std::int64_t Rng::between(std::int64_t lo, std::int64_t hi)
    {
        if (hi < lo)
            throw std::invalid_argument("Rng::between: empty range");
        const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<std::int64_t>(below(span));
    }

    double Rng::normal()
    {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform(); // (0, 1]
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(theta);
        has_spare_ = true;
        return radius * std::cos(theta);
    }

    std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index)
    {
        std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
} // namespace mslr
