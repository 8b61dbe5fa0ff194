#include "mslr/exact.hpp"

#include <gmp.h>

namespace mslr
{
    double to_double(const Rational& x)
    {
        return x.convert_to<double>();
    }

    namespace modp
    {
        std::uint64_t pow(std::uint64_t base, std::uint64_t exp)
        {
            std::uint64_t result = 1;
            base %= prime;
            while (exp) {
                if (exp & 1)
                    result = mul(result, base);
                base = mul(base, base);
                exp >>= 1;
            }
            return result;
        }

        std::optional<std::uint64_t> from_rational(const Rational& x)
        {
            const mpq_t& q = x.backend().data();
            // mpz_fdiv_ui returns the non-negative residue
            const std::uint64_t num = mpz_fdiv_ui(mpq_numref(q), prime);
            const std::uint64_t den = mpz_fdiv_ui(mpq_denref(q), prime);
            if (den == 0)
                return std::nullopt;
            return mul(num, inv(den));
        }
    } // namespace modp
} // namespace mslr
