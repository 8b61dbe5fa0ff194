#ifndef MSLR_EXACT_HPP
#define MSLR_EXACT_HPP

#include <cstdint>
#include <optional>

#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/gmp.hpp>

namespace mslr
{
    /// Exact rational scalar. Expression templates are off so the type
    /// behaves as a plain value inside Eigen containers and std algorithms.
    using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                                   boost::multiprecision::et_off>;

    /// Every finite double is a dyadic rational, so this is exact.
    inline Rational to_rational(double x) { return Rational(x); }

    double to_double(const Rational& x);

    /// Arithmetic modulo the Mersenne prime 2^61 - 1. Used as a fast exact
    /// filter: identities that hold over the rationals also hold mod p.
    namespace modp
    {
        inline constexpr std::uint64_t prime = (std::uint64_t{1} << 61) - 1;

        inline std::uint64_t reduce(unsigned __int128 x)
        {
            std::uint64_t lo = static_cast<std::uint64_t>(x & prime);
            std::uint64_t hi = static_cast<std::uint64_t>(x >> 61);
            std::uint64_t s = lo + hi;
            if (s >= prime)
                s -= prime;
            return s;
        }
        inline std::uint64_t mul(std::uint64_t a, std::uint64_t b)
        {
            return reduce(static_cast<unsigned __int128>(a) * b);
        }
        inline std::uint64_t add(std::uint64_t a, std::uint64_t b)
        {
            std::uint64_t s = a + b;
            return s >= prime ? s - prime : s;
        }
        inline std::uint64_t sub(std::uint64_t a, std::uint64_t b)
        {
            return a >= b ? a - b : a + prime - b;
        }
        std::uint64_t pow(std::uint64_t base, std::uint64_t exp);
        inline std::uint64_t inv(std::uint64_t a) { return pow(a, prime - 2); }

        /// num/den mod p; empty when p divides the denominator.
        std::optional<std::uint64_t> from_rational(const Rational& x);
    } // namespace modp
} // namespace mslr

#endif
