#include "mslr/noiseless.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

namespace mslr
{
    AlphaGrid alpha_grid_at(std::size_t k, std::size_t L, std::size_t t)
    {
        if (k < 1 || L < 1)
            throw std::invalid_argument("alpha_grid_at: need k, L >= 1");
        if (t >= k * k * L * L)
            throw std::invalid_argument("alpha_grid_at: t out of range");
        AlphaGrid g;
        g.t = t;
        g.k = k;
        g.L = L;
        g.gamma = 1.0 / static_cast<double>(k * k * L * L);
        const Rational den(static_cast<long long>(2 * k * k * k * L * L));
        for (std::size_t j = 1; j <= 2 * k; ++j) {
            Rational a = Rational(static_cast<long long>(2 * k * t + j)) / den;
            g.alphas.push_back(to_double(a));
            g.exact.push_back(std::move(a));
        }
        return g;
    }

    AlphaGrid make_alpha_grid(std::size_t k, std::size_t L, Rng& rng)
    {
        if (k < 1 || L < 1)
            throw std::invalid_argument("make_alpha_grid: need k, L >= 1");
        const std::size_t t = static_cast<std::size_t>(rng.below(k * k * L * L));
        return alpha_grid_at(k, L, t);
    }

    template <typename Scalar>
    ProcessedBatch<Scalar> process_batch(std::span<const Scalar> samples, std::size_t L, double rel_tol)
    {
        if (samples.empty())
            throw std::invalid_argument("process_batch: empty batch");
        std::vector<Scalar> v(samples.begin(), samples.end());
        std::sort(v.begin(), v.end());
        ProcessedBatch<Scalar> out;
        for (const Scalar& x : v) {
            if (!out.values.empty()) {
                const Scalar& last = out.values.back();
                bool same;
                if constexpr (std::is_same_v<Scalar, Rational>) {
                    same = x == last;
                } else {
                    same = std::abs(x - last) <= rel_tol * std::max(std::abs(x), std::abs(last));
                }
                if (same)
                    continue;
            }
            out.values.push_back(x);
        }
        if (out.values.size() < L)
            throw MissedComponent("process_batch: " + std::to_string(out.values.size()) +
                                  " distinct responses, expected " + std::to_string(L));
        if (out.values.size() > L)
            throw ExtraResponses("process_batch: " + std::to_string(out.values.size()) +
                                 " distinct responses, expected " + std::to_string(L));
        return out;
    }

    template ProcessedBatch<double> process_batch(std::span<const double>, std::size_t, double);
    template ProcessedBatch<Rational> process_batch(std::span<const Rational>, std::size_t, double);

    namespace
    {
        // advance idx to the next s-subset of {0..n-1} in lex order
        bool next_subset(std::vector<std::size_t>& idx, std::size_t n)
        {
            const std::size_t s = idx.size();
            std::size_t i = s;
            while (i > 0) {
                --i;
                if (idx[i] < n - s + i) {
                    ++idx[i];
                    for (std::size_t j = i + 1; j < s; ++j)
                        idx[j] = idx[j - 1] + 1;
                    return true;
                }
            }
            return false;
        }

        void check_decode_args(const AlphaGrid& grid, std::size_t count, std::size_t n, std::size_t k)
        {
            if (count != 2 * k || grid.alphas.size() != 2 * k)
                throw std::invalid_argument("decode_sparse: need 2k values and 2k alphas");
            if (k < 1 || k > n)
                throw std::invalid_argument("decode_sparse: need 1 <= k <= n");
        }

        // Exact solve of the 2k x |support| system; empty if inconsistent.
        std::optional<Vector<Rational>> exact_solve(const AlphaGrid& grid, std::span<const Rational> values,
                                                    const std::vector<std::size_t>& support, std::size_t n)
        {
            const std::size_t rows = values.size();
            const std::size_t s = support.size();
            std::vector<std::vector<Rational>> a(rows, std::vector<Rational>(s + 1));
            for (std::size_t r = 0; r < rows; ++r) {
                const Vector<Rational> row = vandermonde_row(grid.exact[r], n);
                for (std::size_t c = 0; c < s; ++c)
                    a[r][c] = row(static_cast<Eigen::Index>(support[c]));
                a[r][s] = values[r];
            }
            std::vector<std::size_t> pivot_col;
            std::size_t pr = 0;
            for (std::size_t c = 0; c < s && pr < rows; ++c) {
                std::size_t p = pr;
                while (p < rows && a[p][c] == 0)
                    ++p;
                if (p == rows)
                    return std::nullopt; // rank deficient support
                std::swap(a[p], a[pr]);
                for (std::size_t r = 0; r < rows; ++r) {
                    if (r == pr || a[r][c] == 0)
                        continue;
                    const Rational f = a[r][c] / a[pr][c];
                    for (std::size_t cc = c; cc <= s; ++cc)
                        a[r][cc] -= f * a[pr][cc];
                }
                pivot_col.push_back(c);
                ++pr;
            }
            for (std::size_t r = pr; r < rows; ++r)
                if (a[r][s] != 0)
                    return std::nullopt;
            Vector<Rational> beta = Vector<Rational>::Zero(static_cast<Eigen::Index>(n));
            for (std::size_t i = 0; i < pivot_col.size(); ++i)
                beta(static_cast<Eigen::Index>(support[pivot_col[i]])) = a[i][s] / a[i][pivot_col[i]];
            return beta;
        }

        // Depth-first search over supports with incremental elimination mod p.
        // State rows are (coefficients for columns > current, rhs).
        class ModSearch
        {
        public:
            ModSearch(std::vector<std::uint64_t> m, std::vector<std::uint64_t> y, std::size_t rows,
                      std::size_t n, std::size_t s)
                : rows_(rows), n_(n), s_(s), m0_(std::move(m)), y0_(std::move(y))
            {
            }

            template <typename Accept>
            bool run(Accept&& accept)
            {
                std::vector<char> used(rows_, 0);
                std::vector<std::size_t> chosen;
                return dfs(m0_, y0_, used, chosen, 0, accept);
            }

        private:
            template <typename Accept>
            bool dfs(const std::vector<std::uint64_t>& m, const std::vector<std::uint64_t>& y,
                     std::vector<char>& used, std::vector<std::size_t>& chosen, std::size_t start,
                     Accept& accept)
            {
                using namespace modp;
                const std::size_t depth = chosen.size();
                for (std::size_t c = start; c + (s_ - depth) <= n_; ++c) {
                    std::size_t p = rows_;
                    for (std::size_t r = 0; r < rows_; ++r)
                        if (!used[r] && m[r * n_ + c] != 0) {
                            p = r;
                            break;
                        }
                    if (p == rows_)
                        continue;
                    chosen.push_back(c);
                    if (depth + 1 == s_) {
                        // last column: every other free row must be consistent
                        bool ok = true;
                        for (std::size_t r = 0; r < rows_ && ok; ++r)
                            if (!used[r] && r != p)
                                ok = mul(y[r], m[p * n_ + c]) == mul(m[r * n_ + c], y[p]);
                        if (ok && accept(chosen))
                            return true;
                    } else {
                        std::vector<std::uint64_t> m2 = m;
                        std::vector<std::uint64_t> y2 = y;
                        const std::uint64_t pinv = inv(m[p * n_ + c]);
                        for (std::size_t r = 0; r < rows_; ++r) {
                            if (used[r] || r == p || m[r * n_ + c] == 0)
                                continue;
                            const std::uint64_t f = mul(m[r * n_ + c], pinv);
                            for (std::size_t cc = c + 1; cc < n_; ++cc)
                                m2[r * n_ + cc] = sub(m2[r * n_ + cc], mul(f, m[p * n_ + cc]));
                            y2[r] = sub(y2[r], mul(f, y[p]));
                        }
                        used[p] = 1;
                        const bool found = dfs(m2, y2, used, chosen, c + 1, accept);
                        used[p] = 0;
                        if (found)
                            return true;
                    }
                    chosen.pop_back();
                }
                return false;
            }

            std::size_t rows_, n_, s_;
            std::vector<std::uint64_t> m0_, y0_;
        };
    } // namespace

    Vector<double> decode_sparse(const AlphaGrid& grid, std::span<const double> values, std::size_t n,
                                 std::size_t k)
    {
        check_decode_args(grid, values.size(), n, k);
        const Eigen::Index rows = static_cast<Eigen::Index>(values.size());
        Eigen::VectorXd y(rows);
        for (Eigen::Index r = 0; r < rows; ++r)
            y(r) = values[static_cast<std::size_t>(r)];
        const double tol = 1e-7 * (1.0 + y.cwiseAbs().maxCoeff());
        if (y.cwiseAbs().maxCoeff() <= tol)
            return Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));

        Eigen::MatrixXd full(rows, static_cast<Eigen::Index>(n));
        for (Eigen::Index r = 0; r < rows; ++r)
            full.row(r) = vandermonde_row(grid.alphas[static_cast<std::size_t>(r)], n).transpose();

        for (std::size_t s = 1; s <= k; ++s) {
            std::vector<std::size_t> idx(s);
            std::iota(idx.begin(), idx.end(), std::size_t{0});
            do {
                Eigen::MatrixXd a(rows, static_cast<Eigen::Index>(s));
                for (std::size_t c = 0; c < s; ++c)
                    a.col(static_cast<Eigen::Index>(c)) = full.col(static_cast<Eigen::Index>(idx[c]));
                const Eigen::VectorXd coef = a.colPivHouseholderQr().solve(y);
                if ((a * coef - y).cwiseAbs().maxCoeff() <= tol) {
                    Eigen::VectorXd beta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
                    for (std::size_t c = 0; c < s; ++c)
                        beta(static_cast<Eigen::Index>(idx[c])) = coef(static_cast<Eigen::Index>(c));
                    return beta;
                }
            } while (next_subset(idx, n));
        }
        throw NoConsistentSupport("decode_sparse: no support of size <= k fits the column");
    }

    Vector<Rational> decode_sparse(const AlphaGrid& grid, std::span<const Rational> values, std::size_t n,
                                   std::size_t k)
    {
        check_decode_args(grid, values.size(), n, k);
        if (std::all_of(values.begin(), values.end(), [](const Rational& v) { return v == 0; }))
            return Vector<Rational>::Zero(static_cast<Eigen::Index>(n));

        const std::size_t rows = values.size();
        std::vector<std::uint64_t> m(rows * n), y(rows);
        for (std::size_t r = 0; r < rows; ++r) {
            const auto a = modp::from_rational(grid.exact[r]);
            const auto v = modp::from_rational(values[r]);
            if (!a || !v)
                throw NoConsistentSupport("decode_sparse: value not representable mod p");
            std::uint64_t p = 1;
            for (std::size_t c = 0; c < n; ++c) {
                m[r * n + c] = p;
                p = modp::mul(p, *a);
            }
            y[r] = *v;
        }

        // Any support of the true vector extends to a k-subset, so searching
        // size exactly k suffices.
        std::optional<Vector<Rational>> result;
        ModSearch search(std::move(m), std::move(y), rows, n, k);
        search.run([&](const std::vector<std::size_t>& support) {
            result = exact_solve(grid, values, support, n);
            return result.has_value();
        });
        if (!result)
            throw NoConsistentSupport("decode_sparse: no support of size <= k fits the column");
        return *result;
    }

    std::size_t noiseless_batch_size(std::size_t k, std::size_t L, double multiplier)
    {
        if (k < 1 || L < 1 || !(multiplier > 0.0))
            throw std::invalid_argument("noiseless_batch_size: bad arguments");
        const double Ld = static_cast<double>(L);
        const double raw = multiplier * Ld * std::log(Ld * static_cast<double>(k * k));
        return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(raw - 1e-12)));
    }

    template <typename Scalar>
    NoiselessRun<Scalar> run_noiseless(Oracle<Scalar>& oracle, std::size_t n, std::size_t k, std::size_t L,
                                       Rng& rng, const NoiselessOptions& options)
    {
        NoiselessRun<Scalar> run;
        run.grid = make_alpha_grid(k, L, rng);
        run.batch_size = noiseless_batch_size(k, L, options.batch_multiplier);
        const QueryDesign design{DesignKind::fixed, 0, 0};

        std::vector<std::vector<Scalar>> raw;
        for (std::size_t j = 0; j < 2 * k; ++j)
            raw.push_back(oracle.query_batch(vandermonde_row(run.grid.template alpha<Scalar>(j), n),
                                             run.batch_size, design));
        for (const auto& b : raw)
            run.batches.push_back(process_batch<Scalar>(b, L, options.dedupe_rel_tol));

        for (std::size_t l = 0; l < L; ++l) {
            std::vector<Scalar> column;
            for (const auto& b : run.batches)
                column.push_back(b.values[l]);
            run.estimates.push_back(decode_sparse(run.grid, std::span<const Scalar>(column), n, k));
        }
        return run;
    }

    template <typename Scalar>
    RecoveryReport recover_noiseless(Oracle<Scalar>& oracle, std::size_t n, std::size_t k, std::size_t L,
                                     Rng& rng, const NoiselessOptions& options)
    {
        const NoiselessRun<Scalar> run = run_noiseless(oracle, n, k, L, rng, options);
        std::vector<Eigen::VectorXd> est;
        for (const auto& e : run.estimates) {
            if constexpr (std::is_same_v<Scalar, Rational>) {
                Eigen::VectorXd d(e.size());
                for (Eigen::Index i = 0; i < e.size(); ++i)
                    d(i) = to_double(e(i));
                est.push_back(std::move(d));
            } else {
                est.push_back(e);
            }
        }
        return match_and_score(oracle.signals(), std::move(est), oracle.query_count());
    }

    template NoiselessRun<double> run_noiseless(Oracle<double>&, std::size_t, std::size_t, std::size_t, Rng&,
                                                const NoiselessOptions&);
    template NoiselessRun<Rational> run_noiseless(Oracle<Rational>&, std::size_t, std::size_t, std::size_t,
                                                  Rng&, const NoiselessOptions&);
    template RecoveryReport recover_noiseless(Oracle<double>&, std::size_t, std::size_t, std::size_t, Rng&,
                                              const NoiselessOptions&);
    template RecoveryReport recover_noiseless(Oracle<Rational>&, std::size_t, std::size_t, std::size_t, Rng&,
                                              const NoiselessOptions&);
} // namespace mslr
