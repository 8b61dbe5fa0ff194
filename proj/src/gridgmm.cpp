#include "mslr/gridgmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace mslr
{
    std::vector<double> GridMixture::means() const
    {
        std::vector<double> out;
        out.reserve(units.size());
        for (std::int64_t u : units)
            out.push_back(static_cast<double>(u) * epsilon);
        return out;
    }

    std::vector<std::int64_t> CandidateWindow::points() const
    {
        std::vector<std::int64_t> out(size());
        std::iota(out.begin(), out.end(), lo);
        return out;
    }

    std::size_t required_batch_size(double sigma, double epsilon, std::size_t L, double n, double c)
    {
        if (sigma < 0.0 || !(epsilon > 0.0) || L < 1 || !(n > 1.0) || !(c > 0.0))
            throw std::invalid_argument("required_batch_size: bad arguments");
        const double Ld = static_cast<double>(L);
        const double raw = c * Ld * Ld * std::log(n) * std::exp(std::pow(sigma / epsilon, 2.0 / 3.0));
        return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(raw - 1e-9)));
    }

    namespace
    {
        std::int64_t floor_units(double x, double epsilon)
        {
            return static_cast<std::int64_t>(std::floor(x / epsilon + 1e-9));
        }
        std::int64_t ceil_units(double x, double epsilon)
        {
            return static_cast<std::int64_t>(std::ceil(x / epsilon - 1e-9));
        }

        void check_inputs(std::span<const double> samples, std::size_t L, double sigma, double epsilon)
        {
            if (samples.empty())
                throw std::invalid_argument("gridgmm: empty sample");
            if (L < 1)
                throw std::invalid_argument("gridgmm: need L >= 1");
            if (sigma < 0.0 || !(epsilon > 0.0))
                throw std::invalid_argument("gridgmm: need sigma >= 0 and epsilon > 0");
        }

        // Calls visit(idx) for every weakly increasing L-tuple of indices into
        // [0, W), in lexicographic order. visit also receives the depth-wise
        // hook so callers can keep running sums.
        template <typename Push, typename Leaf>
        void enumerate_multisets(std::size_t W, std::size_t L, Push&& push, Leaf&& leaf)
        {
            std::vector<std::size_t> idx(L);
            auto rec = [&](auto&& self, std::size_t depth, std::size_t start) -> void {
                for (std::size_t p = start; p < W; ++p) {
                    idx[depth] = p;
                    push(depth, p);
                    if (depth + 1 == L)
                        leaf(idx);
                    else
                        self(self, depth + 1, p);
                }
            };
            rec(rec, 0, 0);
        }

        GridMixture make_mixture(std::size_t L, double sigma, double epsilon, std::vector<std::int64_t> units)
        {
            std::sort(units.begin(), units.end());
            return GridMixture{L, sigma, epsilon, std::move(units)};
        }
    } // namespace

    CandidateWindow make_window(std::span<const double> samples, double sigma, double epsilon)
    {
        check_inputs(samples, 1, sigma, epsilon);
        const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
        return CandidateWindow{floor_units(*mn - 4.0 * sigma, epsilon), ceil_units(*mx + 4.0 * sigma, epsilon),
                               epsilon};
    }

    std::vector<std::int64_t> neighbourhood_points(std::span<const double> samples, double sigma, double epsilon)
    {
        check_inputs(samples, 1, sigma, epsilon);
        std::vector<double> s(samples.begin(), samples.end());
        std::sort(s.begin(), s.end());
        std::vector<std::int64_t> out;
        for (double x : s) {
            std::int64_t lo = floor_units(x - 4.0 * sigma, epsilon);
            const std::int64_t hi = ceil_units(x + 4.0 * sigma, epsilon);
            if (!out.empty())
                lo = std::max(lo, out.back() + 1);
            for (std::int64_t p = lo; p <= hi; ++p)
                out.push_back(p);
        }
        return out;
    }

    double multiset_count(std::size_t W, std::size_t L)
    {
        // C(W + L - 1, L) = prod_{i=1..L} (W - 1 + i) / i
        double c = 1.0;
        for (std::size_t i = 1; i <= L; ++i) {
            c = c * static_cast<double>(W - 1 + i) / static_cast<double>(i);
            if (!std::isfinite(c))
                return std::numeric_limits<double>::infinity();
        }
        return W == 0 ? 0.0 : c;
    }

    namespace
    {
        // cdf[i * W + p] = P(N(points[p] eps, sigma^2) <= x_i) for sorted x.
        // Distinct sorted sample values with the empirical CDF just below
        // (lo) and at (hi) each one.
        struct EvalGrid
        {
            std::vector<double> u, lo, hi;
        };

        EvalGrid eval_grid(std::vector<double> x)
        {
            std::sort(x.begin(), x.end());
            EvalGrid g;
            const double Td = static_cast<double>(x.size());
            for (std::size_t i = 0; i < x.size();) {
                std::size_t j = i;
                while (j < x.size() && x[j] == x[i])
                    ++j;
                g.u.push_back(x[i]);
                g.lo.push_back(static_cast<double>(i) / Td);
                g.hi.push_back(static_cast<double>(j) / Td);
                i = j;
            }
            return g;
        }

        // t[i * W + p] = P(N(points[p] eps, sigma^2) <= u_i), or < u_i when
        // left is set. The two differ only for sigma = 0.
        std::vector<double> cdf_table(const std::vector<double>& u, std::span<const std::int64_t> points,
                                      double sigma, double epsilon, bool left = false)
        {
            const std::size_t W = points.size();
            std::vector<double> t(u.size() * W);
            for (std::size_t i = 0; i < u.size(); ++i)
                for (std::size_t p = 0; p < W; ++p) {
                    const double mu = static_cast<double>(points[p]) * epsilon;
                    if (sigma > 0.0)
                        t[i * W + p] = 0.5 * std::erfc(-(u[i] - mu) / (sigma * std::sqrt(2.0)));
                    else if (left)
                        t[i * W + p] = u[i] > mu + 1e-9 * epsilon ? 1.0 : 0.0;
                    else
                        t[i * W + p] = u[i] >= mu - 1e-9 * epsilon ? 1.0 : 0.0;
                }
            return t;
        }

        // sup |F - F_emp|. Between samples F_emp is flat and F is monotone,
        // so checking F(u-) and F(u) at every sample value is enough.
        double ks_from_cdf(const double* F, const double* F_left, const EvalGrid& g, double scale)
        {
            double d = 0.0;
            for (std::size_t i = 0; i < g.u.size(); ++i) {
                const double f = F[i] * scale, fl = F_left[i] * scale;
                d = std::max(d, std::max(std::abs(f - g.hi[i]), std::abs(fl - g.lo[i])));
            }
            return d;
        }
    } // namespace

    double ks_distance(std::span<const double> samples, std::span<const std::int64_t> units, double sigma,
                       double epsilon)
    {
        check_inputs(samples, std::max<std::size_t>(units.size(), 1), sigma, epsilon);
        const EvalGrid g = eval_grid({samples.begin(), samples.end()});
        const std::size_t U = g.u.size(), W = units.size();
        const std::vector<double> t = cdf_table(g.u, units, sigma, epsilon);
        const std::vector<double> tl = sigma > 0.0 ? t : cdf_table(g.u, units, sigma, epsilon, true);
        std::vector<double> F(U, 0.0), Fl(U, 0.0);
        for (std::size_t i = 0; i < U; ++i)
            for (std::size_t p = 0; p < W; ++p) {
                F[i] += t[i * W + p];
                Fl[i] += tl[i * W + p];
            }
        return ks_from_cdf(F.data(), Fl.data(), g, 1.0 / static_cast<double>(W));
    }

    GridMixture min_distance_estimate(std::span<const double> samples, std::size_t L, double sigma,
                                      double epsilon, std::span<const std::int64_t> points, double cap)
    {
        check_inputs(samples, L, sigma, epsilon);
        if (points.empty())
            throw std::invalid_argument("min_distance_estimate: no candidate points");
        const std::size_t W = points.size();
        const double count = multiset_count(W, L);
        if (count > cap)
            throw WindowTooLarge("min_distance_estimate: " + std::to_string(count) + " candidate multisets");

        const EvalGrid g = eval_grid({samples.begin(), samples.end()});
        const std::size_t U = g.u.size();
        const bool steps = !(sigma > 0.0);
        const std::vector<double> t = cdf_table(g.u, points, sigma, epsilon);
        const std::vector<double> tl = steps ? cdf_table(g.u, points, sigma, epsilon, true) : std::vector<double>{};
        // transpose so each candidate point's column is contiguous
        std::vector<double> col(W * U), col_left(steps ? W * U : 0);
        for (std::size_t i = 0; i < U; ++i)
            for (std::size_t p = 0; p < W; ++p) {
                col[p * U + i] = t[i * W + p];
                if (steps)
                    col_left[p * U + i] = tl[i * W + p];
            }

        // acc[d] holds the summed CDF of the first d + 1 chosen points
        std::vector<std::vector<double>> acc(L, std::vector<double>(U));
        std::vector<std::vector<double>> acc_left(steps ? L : 0, std::vector<double>(U));
        auto add = [&](std::vector<std::vector<double>>& a, const std::vector<double>& c, std::size_t d,
                       std::size_t p) {
            const double* src = &c[p * U];
            if (d == 0)
                std::copy(src, src + U, a[0].begin());
            else
                for (std::size_t i = 0; i < U; ++i)
                    a[d][i] = a[d - 1][i] + src[i];
        };
        const double scale = 1.0 / static_cast<double>(L);
        double best = std::numeric_limits<double>::infinity();
        std::vector<std::size_t> best_idx;
        enumerate_multisets(
            W, L,
            [&](std::size_t d, std::size_t p) {
                add(acc, col, d, p);
                if (steps)
                    add(acc_left, col_left, d, p);
            },
            [&](const std::vector<std::size_t>& idx) {
                const double* F = acc[L - 1].data();
                const double dist = ks_from_cdf(F, steps ? acc_left[L - 1].data() : F, g, scale);
                if (dist < best) {
                    best = dist;
                    best_idx = idx;
                }
            });

        std::vector<std::int64_t> units;
        for (std::size_t p : best_idx)
            units.push_back(points[p]);
        return make_mixture(L, sigma, epsilon, std::move(units));
    }

    GridMixture min_distance_estimate(std::span<const double> samples, std::size_t L, double sigma,
                                      double epsilon, const CandidateWindow& window, double cap)
    {
        if (window.hi < window.lo)
            throw std::invalid_argument("min_distance_estimate: empty window");
        if (multiset_count(window.size(), L) > cap)
            throw WindowTooLarge("min_distance_estimate: window of " + std::to_string(window.size()) +
                                 " points exceeds the cap");
        const std::vector<std::int64_t> pts = window.points();
        return min_distance_estimate(samples, L, sigma, epsilon, pts, cap);
    }

    GridMixture brute_likelihood_estimate(std::span<const double> samples, std::size_t L, double sigma,
                                          double epsilon, std::span<const std::int64_t> points, double cap)
    {
        check_inputs(samples, L, sigma, epsilon);
        if (!(sigma > 0.0))
            throw std::invalid_argument("brute_likelihood_estimate: need sigma > 0");
        if (points.empty())
            throw std::invalid_argument("brute_likelihood_estimate: no candidate points");
        const std::size_t W = points.size();
        const double count = multiset_count(W, L);
        if (count > cap)
            throw WindowTooLarge("brute_likelihood_estimate: " + std::to_string(count) + " candidate multisets");

        const std::size_t T = samples.size();
        std::vector<double> logphi(W * T);
        for (std::size_t p = 0; p < W; ++p)
            for (std::size_t i = 0; i < T; ++i) {
                const double z = (samples[i] - static_cast<double>(points[p]) * epsilon) / sigma;
                logphi[p * T + i] = -0.5 * z * z;
            }

        double best = -std::numeric_limits<double>::infinity();
        std::vector<std::size_t> best_idx;
        enumerate_multisets(
            W, L, [](std::size_t, std::size_t) {},
            [&](const std::vector<std::size_t>& idx) {
                double ll = 0.0;
                for (std::size_t i = 0; i < T; ++i) {
                    double m = -std::numeric_limits<double>::infinity();
                    for (std::size_t p : idx)
                        m = std::max(m, logphi[p * T + i]);
                    double s = 0.0;
                    for (std::size_t p : idx)
                        s += std::exp(logphi[p * T + i] - m);
                    ll += m + std::log(s);
                }
                if (ll > best) {
                    best = ll;
                    best_idx = idx;
                }
            });

        std::vector<std::int64_t> units;
        for (std::size_t p : best_idx)
            units.push_back(points[p]);
        return make_mixture(L, sigma, epsilon, std::move(units));
    }

    GridMixture brute_likelihood_estimate(std::span<const double> samples, std::size_t L, double sigma,
                                          double epsilon, const CandidateWindow& window, double cap)
    {
        if (window.hi < window.lo)
            throw std::invalid_argument("brute_likelihood_estimate: empty window");
        if (multiset_count(window.size(), L) > cap)
            throw WindowTooLarge("brute_likelihood_estimate: window exceeds the cap");
        const std::vector<std::int64_t> pts = window.points();
        return brute_likelihood_estimate(samples, L, sigma, epsilon, pts, cap);
    }

    GridMixture lloyd_snap(std::span<const double> samples, std::size_t L, double epsilon, Rng& rng, double sigma)
    {
        check_inputs(samples, L, sigma, epsilon);
        const std::size_t T = samples.size();
        if (T < L)
            throw std::invalid_argument("lloyd_snap: need at least L samples");
        constexpr int kRestarts = 10;
        constexpr int kIterations = 100;

        std::vector<double> best_centers;
        double best_sse = std::numeric_limits<double>::infinity();
        std::vector<std::size_t> assign(T);
        for (int restart = 0; restart < kRestarts; ++restart) {
            // L distinct sample positions
            std::vector<std::size_t> pick(T);
            std::iota(pick.begin(), pick.end(), std::size_t{0});
            for (std::size_t i = 0; i < L; ++i)
                std::swap(pick[i], pick[i + static_cast<std::size_t>(rng.below(T - i))]);
            std::vector<double> c(L);
            for (std::size_t l = 0; l < L; ++l)
                c[l] = samples[pick[l]];

            for (int it = 0; it < kIterations; ++it) {
                for (std::size_t i = 0; i < T; ++i) {
                    std::size_t arg = 0;
                    for (std::size_t l = 1; l < L; ++l)
                        if (std::abs(samples[i] - c[l]) < std::abs(samples[i] - c[arg]))
                            arg = l;
                    assign[i] = arg;
                }
                std::vector<double> sum(L, 0.0);
                std::vector<std::size_t> cnt(L, 0);
                for (std::size_t i = 0; i < T; ++i) {
                    sum[assign[i]] += samples[i];
                    ++cnt[assign[i]];
                }
                double moved = 0.0;
                for (std::size_t l = 0; l < L; ++l) {
                    if (cnt[l] == 0)
                        continue; // empty cluster keeps its center
                    const double nc = sum[l] / static_cast<double>(cnt[l]);
                    moved = std::max(moved, std::abs(nc - c[l]));
                    c[l] = nc;
                }
                if (moved < epsilon / 100.0)
                    break;
            }
            double sse = 0.0;
            for (std::size_t i = 0; i < T; ++i) {
                double d = std::numeric_limits<double>::infinity();
                for (double cl : c)
                    d = std::min(d, std::abs(samples[i] - cl));
                sse += d * d;
            }
            if (sse < best_sse) {
                best_sse = sse;
                best_centers = c;
            }
        }
        std::vector<std::int64_t> units;
        for (double cl : best_centers)
            units.push_back(static_cast<std::int64_t>(std::llround(cl / epsilon)));
        return make_mixture(L, sigma, epsilon, std::move(units));
    }

    std::string_view to_string(Estimator e)
    {
        switch (e) {
        case Estimator::min_distance:
            return "min_distance";
        case Estimator::lloyd_snap:
            return "lloyd_snap";
        case Estimator::automatic:
            return "auto";
        }
        return "?";
    }

    Estimator parse_estimator(std::string_view name)
    {
        if (name == "min_distance")
            return Estimator::min_distance;
        if (name == "lloyd_snap")
            return Estimator::lloyd_snap;
        if (name == "auto")
            return Estimator::automatic;
        throw std::invalid_argument("unknown estimator: " + std::string(name));
    }

    GridMixture estimate_means(std::span<const double> samples, std::size_t L, double sigma, double epsilon,
                               Estimator estimator, Rng& rng, double cap)
    {
        switch (estimator) {
        case Estimator::min_distance:
            return min_distance_estimate(samples, L, sigma, epsilon, make_window(samples, sigma, epsilon), cap);
        case Estimator::lloyd_snap:
            return lloyd_snap(samples, L, epsilon, rng, sigma);
        case Estimator::automatic: {
            const std::vector<std::int64_t> pts = neighbourhood_points(samples, sigma, epsilon);
            if (multiset_count(pts.size(), L) <= cap)
                return min_distance_estimate(samples, L, sigma, epsilon, pts, cap);
            return lloyd_snap(samples, L, epsilon, rng, sigma);
        }
        }
        throw std::invalid_argument("estimate_means: bad estimator");
    }
} // namespace mslr
