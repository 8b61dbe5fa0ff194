#include "mslr/model.hpp"

#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "mslr/rng.hpp"

namespace mslr
{
    bool on_grid(double x, double epsilon)
    {
        const double ratio = x / epsilon;
        return std::abs(ratio - std::round(ratio)) <= kGridTolerance;
    }

    SignalSet::SignalSet(std::size_t n, std::size_t k, std::vector<Eigen::VectorXd> vectors,
                         std::optional<double> epsilon, bool exactly_sparse)
        : n_(n), k_(k), vectors_(std::move(vectors)), epsilon_(epsilon), exactly_sparse_(exactly_sparse)
    {
        if (n_ == 0 || k_ == 0 || k_ > n_)
            throw ModelError("SignalSet: need 1 <= k <= n");
        if (vectors_.empty())
            throw ModelError("SignalSet: need at least one vector");
        if (epsilon_ && !(*epsilon_ > 0.0))
            throw ModelError("SignalSet: epsilon must be positive");
        for (const auto& v : vectors_) {
            if (static_cast<std::size_t>(v.size()) != n_)
                throw ModelError("SignalSet: vector length differs from n");
            if (exactly_sparse_ && static_cast<std::size_t>((v.array() != 0.0).count()) > k_)
                throw ModelError("SignalSet: vector has more than k nonzeros");
            if (epsilon_) {
                for (Eigen::Index i = 0; i < v.size(); ++i)
                    if (!on_grid(v(i), *epsilon_))
                        throw ModelError("SignalSet: entry is not a multiple of epsilon");
            }
        }
        for (std::size_t a = 0; a < vectors_.size(); ++a)
            for (std::size_t b = a + 1; b < vectors_.size(); ++b)
                if ((vectors_[a] - vectors_[b]).cwiseAbs().maxCoeff() <= kGridTolerance)
                    throw ModelError("SignalSet: vectors are not pairwise distinct");
    }

    std::int64_t SignalSet::units(std::size_t component, std::size_t coordinate) const
    {
        if (!epsilon_)
            throw ModelError("SignalSet::units: no grid pitch");
        return static_cast<std::int64_t>(
            std::llround(vectors_[component](static_cast<Eigen::Index>(coordinate)) / *epsilon_));
    }

    namespace
    {
        // log of the number of distinct exactly-k-sparse grid vectors
        double log_vector_count(std::size_t n, std::size_t k, double levels)
        {
            return std::lgamma(static_cast<double>(n) + 1) - std::lgamma(static_cast<double>(k) + 1) -
                   std::lgamma(static_cast<double>(n - k) + 1) + static_cast<double>(k) * std::log(levels);
        }
    } // namespace

    SignalSet generate_signal_set(std::size_t n, std::size_t k, std::size_t L,
                                  std::optional<double> epsilon, double amp_max, std::uint64_t seed)
    {
        if (k < 1 || k > n)
            throw ModelError("generate_signal_set: need 1 <= k <= n");
        if (L < 1)
            throw ModelError("generate_signal_set: need L >= 1");
        std::int64_t max_units = 0;
        if (epsilon) {
            if (!(*epsilon > 0.0))
                throw ModelError("generate_signal_set: epsilon must be positive");
            max_units = static_cast<std::int64_t>(std::floor(amp_max / *epsilon + kGridTolerance));
            if (max_units < 1)
                throw ModelError("generate_signal_set: amp_max must be at least epsilon");
            const double log_count = log_vector_count(n, k, 2.0 * static_cast<double>(max_units));
            if (std::log(static_cast<double>(L)) > log_count + 1e-9)
                throw ModelError("generate_signal_set: fewer than L distinct vectors exist");
        } else if (!(amp_max > 0.0)) {
            throw ModelError("generate_signal_set: amp_max must be positive");
        }

        Rng rng(seed);
        std::vector<Eigen::VectorXd> out;
        constexpr int kMaxDraws = 1000;
        int draws = 0;
        while (out.size() < L) {
            if (++draws > kMaxDraws)
                throw ModelError("generate_signal_set: could not draw L distinct vectors");
            Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
            // partial Fisher-Yates for a uniform k-subset
            std::vector<std::size_t> idx(n);
            std::iota(idx.begin(), idx.end(), std::size_t{0});
            for (std::size_t i = 0; i < k; ++i) {
                const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
                std::swap(idx[i], idx[j]);
            }
            for (std::size_t i = 0; i < k; ++i) {
                double value;
                if (epsilon) {
                    const std::int64_t mag = rng.between(1, max_units);
                    value = static_cast<double>(rng.sign() * mag) * *epsilon;
                } else {
                    value = rng.sign() * amp_max * (0.1 + 0.9 * rng.uniform());
                }
                v(static_cast<Eigen::Index>(idx[i])) = value;
            }
            const bool duplicate = std::any_of(out.begin(), out.end(), [&](const Eigen::VectorXd& w) {
                return (w - v).cwiseAbs().maxCoeff() <= kGridTolerance;
            });
            if (!duplicate)
                out.push_back(std::move(v));
        }
        return SignalSet(n, k, std::move(out), epsilon, true);
    }

    RecoveryReport match_and_score(const SignalSet& truth, std::vector<Eigen::VectorXd> estimates,
                                   std::size_t queries_used)
    {
        const std::size_t L = truth.L();
        if (estimates.size() != L)
            throw std::invalid_argument("match_and_score: estimate count differs from L");
        for (const auto& e : estimates)
            if (static_cast<std::size_t>(e.size()) != truth.n())
                throw std::invalid_argument("match_and_score: estimate length differs from n");

        Eigen::MatrixXd cost(L, L);
        for (std::size_t i = 0; i < L; ++i)
            for (std::size_t j = 0; j < L; ++j)
                cost(i, j) = (truth[i] - estimates[j]).lpNorm<1>();

        std::vector<std::size_t> perm(L);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        std::vector<std::size_t> best = perm;
        double best_cost = std::numeric_limits<double>::infinity();
        do {
            double c = 0.0;
            for (std::size_t i = 0; i < L; ++i)
                c += cost(i, perm[i]);
            if (c < best_cost) {
                best_cost = c;
                best = perm;
            }
        } while (std::next_permutation(perm.begin(), perm.end()));

        RecoveryReport report;
        report.matching = best;
        report.queries_used = queries_used;
        for (std::size_t i = 0; i < L; ++i) {
            const Eigen::VectorXd& b = truth[i];
            const Eigen::VectorXd& est = estimates[best[i]];
            const double num = (b - est).lpNorm<1>();
            const double den = (b - best_k_approx(b, static_cast<Eigen::Index>(truth.k()))).lpNorm<1>();
            double ratio;
            if (den == 0.0)
                ratio = num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
            else
                ratio = num / den;
            report.per_signal_l1_ratio.push_back(ratio);
            report.exact.push_back((b - est).cwiseAbs().maxCoeff() <= kGridTolerance);
        }
        report.estimates = std::move(estimates);
        return report;
    }

    void write_signal_set(std::ostream& os, const SignalSet& set)
    {
        os << set.n() << ' ' << set.k() << ' ' << set.L() << ' ';
        if (set.epsilon())
            os << std::setprecision(17) << *set.epsilon();
        else
            os << "none";
        os << '\n';
        os << std::setprecision(17);
        for (const auto& v : set.vectors()) {
            for (Eigen::Index i = 0; i < v.size(); ++i)
                os << (i ? " " : "") << v(i);
            os << '\n';
        }
    }

    SignalSet read_signal_set(std::istream& is)
    {
        std::size_t n = 0, k = 0, L = 0;
        std::string eps_token;
        if (!(is >> n >> k >> L >> eps_token))
            throw ModelError("read_signal_set: malformed header");
        std::optional<double> epsilon;
        if (eps_token != "none") {
            std::istringstream es(eps_token);
            double e;
            if (!(es >> e))
                throw ModelError("read_signal_set: malformed epsilon");
            epsilon = e;
        }
        std::vector<Eigen::VectorXd> vectors;
        bool sparse = true;
        for (std::size_t l = 0; l < L; ++l) {
            Eigen::VectorXd v(static_cast<Eigen::Index>(n));
            for (std::size_t i = 0; i < n; ++i)
                if (!(is >> v(static_cast<Eigen::Index>(i))))
                    throw ModelError("read_signal_set: truncated row");
            if (static_cast<std::size_t>((v.array() != 0.0).count()) > k)
                sparse = false;
            vectors.push_back(std::move(v));
        }
        return SignalSet(n, k, std::move(vectors), epsilon, sparse);
    }
} // namespace mslr
