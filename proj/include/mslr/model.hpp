#ifndef MSLR_MODEL_HPP
#define MSLR_MODEL_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace mslr
{
    template <typename Scalar>
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    /// Absolute tolerance for entry equality and grid membership.
    inline constexpr double kGridTolerance = 1e-9;

    class ModelError : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    /// True when x / epsilon is an integer to within kGridTolerance.
    bool on_grid(double x, double epsilon);

    /// The hidden collection of L distinct signal vectors in R^n.
    ///
    /// Immutable after construction; the constructor checks every invariant
    /// (pairwise distinctness, sparsity when declared exact, grid membership
    /// when epsilon is given) and throws ModelError on violation.
    class SignalSet
    {
    public:
        SignalSet(std::size_t n, std::size_t k, std::vector<Eigen::VectorXd> vectors,
                  std::optional<double> epsilon, bool exactly_sparse = true);

        std::size_t n() const { return n_; }
        std::size_t k() const { return k_; }
        std::size_t L() const { return vectors_.size(); }
        const std::vector<Eigen::VectorXd>& vectors() const { return vectors_; }
        const Eigen::VectorXd& operator[](std::size_t i) const { return vectors_[i]; }
        std::optional<double> epsilon() const { return epsilon_; }
        bool exactly_sparse() const { return exactly_sparse_; }

        /// Entry (component, coordinate) in units of epsilon. Requires epsilon.
        std::int64_t units(std::size_t component, std::size_t coordinate) const;

    private:
        std::size_t n_;
        std::size_t k_;
        std::vector<Eigen::VectorXd> vectors_;
        std::optional<double> epsilon_;
        bool exactly_sparse_;
    };

    /// L pairwise-distinct vectors with exactly k nonzeros each. Nonzeros are
    /// nonzero multiples of epsilon in [-amp_max, amp_max]; with no epsilon
    /// they are continuous uniform magnitudes in [amp_max / 10, amp_max] with
    /// random sign. Supports are uniform k-subsets.
    SignalSet generate_signal_set(std::size_t n, std::size_t k, std::size_t L,
                                  std::optional<double> epsilon, double amp_max,
                                  std::uint64_t seed);

    /// Keeps the k largest-magnitude coordinates of v, ties to the lower index.
    template <typename Derived>
    Vector<typename Derived::Scalar> best_k_approx(const Eigen::MatrixBase<Derived>& v,
                                                   Eigen::Index k)
    {
        using std::abs;
        using Scalar = typename Derived::Scalar;
        const Eigen::Index len = v.size();
        if (k < 0 || k > len)
            throw std::invalid_argument("best_k_approx: k out of range");
        std::vector<Eigen::Index> order(static_cast<std::size_t>(len));
        std::iota(order.begin(), order.end(), Eigen::Index{0});
        std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
            return abs(v(a)) > abs(v(b));
        });
        Vector<Scalar> out = Vector<Scalar>::Zero(len);
        for (Eigen::Index i = 0; i < k; ++i)
            out(order[static_cast<std::size_t>(i)]) = v(order[static_cast<std::size_t>(i)]);
        return out;
    }

    struct RecoveryReport
    {
        std::vector<Eigen::VectorXd> estimates;
        /// matching[i] is the estimate index assigned to truth vector i.
        std::vector<std::size_t> matching;
        std::vector<double> per_signal_l1_ratio;
        std::vector<bool> exact;
        std::size_t queries_used = 0;

        bool all_exact() const
        {
            return !exact.empty() && std::all_of(exact.begin(), exact.end(), [](bool b) { return b; });
        }
    };

    /// Aligns an unordered estimate set to the truth by brute force over all
    /// L! permutations (minimum total l1 distance, first permutation in
    /// lexicographic order wins ties) and scores each signal against its
    /// best k-sparse approximation: ratio = |b - est|_1 / |b - b*|_1 with
    /// 0/0 = 0 and x/0 = inf.
    RecoveryReport match_and_score(const SignalSet& truth, std::vector<Eigen::VectorXd> estimates,
                                   std::size_t queries_used = 0);

    /// Plain-text table: first line "n k L epsilon" (epsilon written as
    /// "none" when absent), then L lines of n values at full precision.
    void write_signal_set(std::ostream& os, const SignalSet& set);
    SignalSet read_signal_set(std::istream& is);
} // namespace mslr

#endif
