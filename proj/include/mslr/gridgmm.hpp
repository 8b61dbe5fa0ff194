#ifndef MSLR_GRIDGMM_HPP
#define MSLR_GRIDGMM_HPP

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "mslr/rng.hpp"

namespace mslr
{
    /// Mean recovery from a batch failed.
    class DenoiseFailure : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    class WindowTooLarge : public DenoiseFailure
    {
    public:
        using DenoiseFailure::DenoiseFailure;
    };

    /// Uniform mixture of L Gaussians N(units[i] * epsilon, sigma^2).
    struct GridMixture
    {
        std::size_t L = 0;
        double sigma = 0.0;
        double epsilon = 1.0;
        /// Means in units of epsilon, sorted ascending (a multiset).
        std::vector<std::int64_t> units;

        std::vector<double> means() const;
    };

    /// Contiguous block of grid points lo..hi (units of epsilon).
    struct CandidateWindow
    {
        std::int64_t lo = 0;
        std::int64_t hi = 0;
        double epsilon = 1.0;

        std::size_t size() const { return static_cast<std::size_t>(hi - lo + 1); }
        std::vector<std::int64_t> points() const;
    };

    /// ceil(c L^2 ln(n) exp((sigma / epsilon)^(2/3))).
    std::size_t required_batch_size(double sigma, double epsilon, std::size_t L, double n, double c);

    /// [floor((min - 4 sigma) / eps), ceil((max + 4 sigma) / eps)].
    CandidateWindow make_window(std::span<const double> samples, double sigma, double epsilon);

    /// Grid points within 4 sigma + eps of at least one sample, sorted. Covers
    /// the same plausible means as make_window without the empty gaps between
    /// far-apart clusters.
    std::vector<std::int64_t> neighbourhood_points(std::span<const double> samples, double sigma, double epsilon);

    /// C(W + L - 1, L) as a double (saturates instead of overflowing).
    double multiset_count(std::size_t W, std::size_t L);

    /// sup_x |F_candidate(x) - F_empirical(x)|.
    double ks_distance(std::span<const double> samples, std::span<const std::int64_t> units, double sigma,
                       double epsilon);

    inline constexpr double kMinDistanceCap = 2e6;
    inline constexpr double kBruteLikelihoodCap = 1e5;

    /// Kolmogorov-Smirnov minimum-distance fit over every multiset of L
    /// candidate points. Ties go to the lexicographically smallest multiset.
    GridMixture min_distance_estimate(std::span<const double> samples, std::size_t L, double sigma,
                                      double epsilon, std::span<const std::int64_t> points,
                                      double cap = kMinDistanceCap);
    GridMixture min_distance_estimate(std::span<const double> samples, std::size_t L, double sigma,
                                      double epsilon, const CandidateWindow& window, double cap = kMinDistanceCap);

    /// Maximum log-likelihood over the same candidate set. Needs sigma > 0.
    GridMixture brute_likelihood_estimate(std::span<const double> samples, std::size_t L, double sigma,
                                          double epsilon, std::span<const std::int64_t> points,
                                          double cap = kBruteLikelihoodCap);
    GridMixture brute_likelihood_estimate(std::span<const double> samples, std::size_t L, double sigma,
                                          double epsilon, const CandidateWindow& window,
                                          double cap = kBruteLikelihoodCap);

    /// 1-D k-means (10 restarts, at most 100 iterations, stop once centers move
    /// less than eps / 100), centers rounded to the grid.
    GridMixture lloyd_snap(std::span<const double> samples, std::size_t L, double epsilon, Rng& rng,
                           double sigma = 0.0);

    enum class Estimator
    {
        min_distance,
        lloyd_snap,
        /// min_distance on the neighbourhood points when under the cap,
        /// lloyd_snap otherwise.
        automatic,
    };

    std::string_view to_string(Estimator e);
    Estimator parse_estimator(std::string_view name);

    /// Dispatches on the estimator. min_distance searches the contiguous
    /// window and throws WindowTooLarge past the cap.
    GridMixture estimate_means(std::span<const double> samples, std::size_t L, double sigma, double epsilon,
                               Estimator estimator, Rng& rng, double cap = kMinDistanceCap);
} // namespace mslr

#endif
