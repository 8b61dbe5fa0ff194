#include "mslr/align.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mslr
{
    double rip_margin(double delta)
    {
        return delta * delta / 16.0 - delta * delta * delta / 48.0;
    }

    double alpha_exponent(double alpha)
    {
        if (alpha < 1.0)
            throw std::invalid_argument("alpha_exponent: need alpha >= 1");
        const double am1 = alpha - 1.0;
        return alpha * std::log(alpha) - (am1 > 0.0 ? am1 * std::log(am1) : 0.0);
    }

    std::int64_t smallest_z_star(std::size_t L, double alpha_star)
    {
        if (L < 1 || !(alpha_star > 1.0))
            throw std::invalid_argument("smallest_z_star: need L >= 1 and alpha* > 1");
        const double L3 = std::pow(static_cast<double>(L), 3.0);
        const double target = 1.0 / std::sqrt(alpha_star);
        constexpr std::int64_t kMaxZ = std::int64_t{1} << 40;
        // the left side increases with z, so double then bisect
        auto ok = [&](std::int64_t z) {
            const double u = 4.0 * static_cast<double>(z) + 1.0;
            return 1.0 - L3 * (3.0 / u - 1.0 / (u * u)) >= target;
        };
        std::int64_t hi = 1;
        while (!ok(hi)) {
            if (hi > kMaxZ)
                throw InfeasibleDelta("smallest_z_star: z* out of range");
            hi *= 2;
        }
        std::int64_t lo = hi / 2; // !ok(lo) unless lo == 0
        while (hi - lo > 1) {
            const std::int64_t mid = lo + (hi - lo) / 2;
            (ok(mid) ? hi : lo) = mid;
        }
        return hi;
    }

    AlignConstants compute_constants(double delta, std::size_t L, std::optional<double> alpha_override)
    {
        if (!(delta > 0.0) || !(delta < std::sqrt(2.0) - 1.0))
            throw InfeasibleDelta("compute_constants: delta must lie in (0, sqrt(2) - 1)");
        AlignConstants c;
        c.delta = delta;
        const double g = rip_margin(delta);
        c.c_prime = std::floor(1.0 / g) + 1.0;
        if (g - 1.0 / c.c_prime <= 0.0)
            c.c_prime += 1.0;
        if (alpha_override) {
            if (!(*alpha_override > 1.0))
                throw std::invalid_argument("compute_constants: alpha override must exceed 1");
            c.alpha_star = *alpha_override;
            c.alpha_overridden = true;
        } else {
            const double target = g - 1.0 / c.c_prime;
            double lo = 1.0, hi = 2.0;
            while (alpha_exponent(hi) < target)
                hi *= 2.0;
            for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
                const double mid = 0.5 * (lo + hi);
                (alpha_exponent(mid) < target ? lo : hi) = mid;
            }
            c.alpha_star = lo;
        }
        c.z_star = smallest_z_star(L, c.alpha_star);
        return c;
    }

    bool is_good_pair(std::span<const double> means_v, double tol)
    {
        if (means_v.size() != 2)
            throw std::invalid_argument("is_good_pair: need two means");
        return std::abs(means_v[0] - means_v[1]) > tol;
    }

    namespace
    {
        bool same_multiset(std::vector<double> a, std::span<const double> b, double tol)
        {
            if (a.size() != b.size())
                return false;
            std::vector<double> bs(b.begin(), b.end());
            std::sort(a.begin(), a.end());
            std::sort(bs.begin(), bs.end());
            for (std::size_t i = 0; i < a.size(); ++i)
                if (std::abs(a[i] - bs[i]) > tol)
                    return false;
            return true;
        }
    } // namespace

    PairAlignment align_pair_L2(std::span<const double> mv, std::span<const double> mb,
                                std::span<const double> msum, std::span<const double> mdiff, double tol)
    {
        if (mv.size() != 2 || mb.size() != 2 || msum.size() != 2 || mdiff.size() != 2)
            throw std::invalid_argument("align_pair_L2: every multiset needs two means");
        std::array<double, 2> ref{mv[0], mv[1]};
        std::sort(ref.begin(), ref.end());
        if (std::abs(ref[0] - ref[1]) <= tol)
            throw std::invalid_argument("align_pair_L2: reference is not good");

        auto fits = [&](double b0, double b1) {
            return same_multiset({(ref[0] + b0) / 2, (ref[1] + b1) / 2}, msum, tol) &&
                   same_multiset({(ref[0] - b0) / 2, (ref[1] - b1) / 2}, mdiff, tol);
        };
        const bool straight = fits(mb[0], mb[1]);
        const bool crossed = fits(mb[1], mb[0]);
        const bool degenerate = std::abs(mb[0] - mb[1]) <= tol;
        if (straight && crossed && !degenerate)
            throw AmbiguousPairing("align_pair_L2: both pairings fit");
        if (straight)
            return PairAlignment{ref, {mb[0], mb[1]}};
        if (crossed)
            return PairAlignment{ref, {mb[1], mb[0]}};
        throw NoPairing("align_pair_L2: no pairing fits the sum and difference means");
    }

    bool is_good_triplet(std::span<const double> mA, std::span<const double> mB, std::span<const double> mC,
                         double tol)
    {
        const std::size_t L = mA.size();
        if (mB.size() != L || mC.size() != L)
            throw std::invalid_argument("is_good_triplet: multisets differ in size");
        for (std::size_t i = 0; i < L; ++i)
            for (std::size_t j = 0; j < L; ++j)
                for (std::size_t l = 0; l < L; ++l) {
                    if (i == j && j == l)
                        continue;
                    if (std::abs(mA[i] + mB[j] - mC[l]) <= tol)
                        return false;
                }
        return true;
    }

    namespace
    {
        bool has_repeat(const std::vector<std::int64_t>& sorted)
        {
            return std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end();
        }
    } // namespace

    std::vector<TripletComponent> derive_components(const TripletRecord& t)
    {
        if (t.q < 2)
            throw std::invalid_argument("derive_components: need q >= 2");
        const std::size_t L = t.a.units.size();
        if (t.b.units.size() != L || t.c.units.size() != L)
            throw std::invalid_argument("derive_components: multisets differ in size");
        if (has_repeat(t.a.units) || has_repeat(t.b.units) || has_repeat(t.c.units))
            throw NotGood("derive_components: repeated mean");

        const std::int64_t qm1 = t.q - 1;
        std::vector<TripletComponent> out;
        std::vector<char> used(L, 0);
        for (std::int64_t x : t.a.units) {
            std::size_t hit = L;
            for (std::size_t j = 0; j < L; ++j) {
                if (!std::binary_search(t.c.units.begin(), t.c.units.end(), x + t.b.units[j]))
                    continue;
                if (hit != L)
                    throw NotGood("derive_components: two partners for one mean");
                hit = j;
            }
            if (hit == L)
                throw NotGood("derive_components: no partner for a mean");
            if (used[hit])
                throw NotGood("derive_components: partner used twice");
            used[hit] = 1;
            const std::int64_t y = t.b.units[hit];
            if (y % qm1 != 0)
                throw NotGood("derive_components: partner not divisible by q - 1");
            out.push_back(TripletComponent{x, y, x - y / qm1, y / qm1});
        }
        return out;
    }

    std::vector<double> derive_base_means(const TripletRecord& t)
    {
        std::vector<double> out;
        for (const auto& c : derive_components(t))
            out.push_back(static_cast<double>(c.base) * t.a.epsilon);
        std::sort(out.begin(), out.end());
        return out;
    }

    std::vector<LabeledMean> label_with_reference(const TripletRecord& ref, const TripletRecord& cand,
                                                  const GridMixture& mr_sum)
    {
        const std::vector<TripletComponent> rc = derive_components(ref);
        const std::vector<TripletComponent> cc = derive_components(cand);
        const std::size_t L = rc.size();
        if (cc.size() != L || mr_sum.units.size() != L)
            throw std::invalid_argument("label_with_reference: multisets differ in size");
        if (has_repeat(mr_sum.units))
            throw NotMatchingGood("label_with_reference: repeated mean of r' + r*");

        std::vector<LabeledMean> out;
        std::vector<char> used(L, 0);
        for (const auto& c : cc) {
            std::size_t hit = L;
            for (std::size_t j = 0; j < L; ++j) {
                if (!std::binary_search(mr_sum.units.begin(), mr_sum.units.end(), c.r + rc[j].r))
                    continue;
                if (hit != L)
                    throw NotMatchingGood("label_with_reference: two reference labels fit");
                hit = j;
            }
            if (hit == L || used[hit])
                throw NotMatchingGood("label_with_reference: no consistent reference label");
            used[hit] = 1;
            out.push_back(LabeledMean{rc[hit].r, c.base});
        }
        std::sort(out.begin(), out.end(), [](const LabeledMean& x, const LabeledMean& y) { return x.label < y.label; });
        return out;
    }
} // namespace mslr
