#ifndef MSLR_ALIGN_HPP
#define MSLR_ALIGN_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "mslr/gridgmm.hpp"

namespace mslr
{
    class AlignError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    class NotGood : public AlignError
    {
    public:
        using AlignError::AlignError;
    };

    class NotMatchingGood : public AlignError
    {
    public:
        using AlignError::AlignError;
    };

    class AmbiguousPairing : public AlignError
    {
    public:
        using AlignError::AlignError;
    };

    class NoPairing : public AlignError
    {
    public:
        using AlignError::AlignError;
    };

    class InfeasibleDelta : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    struct AlignConstants
    {
        double delta = 0.0;
        double c_prime = 0.0;
        double alpha_star = 0.0;
        std::int64_t z_star = 0;
        bool alpha_overridden = false;
    };

    /// delta^2 / 16 - delta^3 / 48.
    double rip_margin(double delta);

    /// ln(a^a / (a - 1)^(a - 1)); increasing on [1, inf) with value 0 at 1.
    double alpha_exponent(double alpha);

    /// Smallest z >= 1 with 1 - L^3 (3/u - 1/u^2) >= 1/sqrt(alpha), u = 4z + 1.
    std::int64_t smallest_z_star(std::size_t L, double alpha_star);

    /// c' = smallest integer with rip_margin(delta) - 1/c' > 0; alpha* = root
    /// of alpha_exponent(alpha) = rip_margin(delta) - 1/c' unless overridden;
    /// z* from smallest_z_star. Throws InfeasibleDelta unless
    /// 0 < delta < sqrt(2) - 1.
    AlignConstants compute_constants(double delta, std::size_t L,
                                     std::optional<double> alpha_override = std::nullopt);

    /// Two component means differ (beyond tol).
    bool is_good_pair(std::span<const double> means_v, double tol = 1e-9);

    struct PairAlignment
    {
        /// means of the reference vector, ascending
        std::array<double, 2> reference;
        /// partner[i] is the other vector's mean from the same component as
        /// reference[i]
        std::array<double, 2> partner;
    };

    /// Matches the two means of a good reference vector v to the two means of
    /// another vector b using the means of (v + b) / 2 and (v - b) / 2.
    /// Throws AmbiguousPairing or NoPairing.
    PairAlignment align_pair_L2(std::span<const double> mv, std::span<const double> mb,
                                std::span<const double> msum, std::span<const double> mdiff, double tol = 1e-9);

    /// White-box goodness: mA[i] is the mean of hidden component i, and the
    /// triplet is good when mA[i] + mB[j] != mC[l] for every (i, j, l) that
    /// is not of the form (i, i, i).
    bool is_good_triplet(std::span<const double> mA, std::span<const double> mB, std::span<const double> mC,
                         double tol = 1e-9);

    /// Queries v + r, (q - 1) r and v + q r with their denoised means.
    struct TripletRecord
    {
        Eigen::VectorXd v;
        Eigen::VectorXd r;
        std::int64_t q = 2;
        GridMixture a; // v + r
        GridMixture b; // (q - 1) r
        GridMixture c; // v + q r
    };

    /// One component's means in a triplet, in grid units.
    struct TripletComponent
    {
        std::int64_t a = 0;    // <v + r, beta>
        std::int64_t b = 0;    // <(q - 1) r, beta>
        std::int64_t base = 0; // <v, beta>
        std::int64_t r = 0;    // <r, beta>
    };

    /// For each mean x of v + r, the unique mean y of (q - 1) r with x + y a
    /// mean of v + q r. Sorted by x. Throws NotGood when the match is missing
    /// or not unique, or the multisets have repeats (which a good triplet
    /// cannot produce).
    std::vector<TripletComponent> derive_components(const TripletRecord& triplet);

    /// <v, beta_i> for every component, ascending.
    std::vector<double> derive_base_means(const TripletRecord& triplet);

    struct LabeledMean
    {
        /// <r*, beta> of the reference triplet, in grid units
        std::int64_t label = 0;
        /// <v', beta> of the candidate triplet, in grid units
        std::int64_t value = 0;
    };

    /// Tags each base mean of cand with the component's reference label using
    /// the means of r' + r*. Sorted by label. Throws NotGood when either
    /// triplet fails derive_components and NotMatchingGood when the join is
    /// ambiguous.
    std::vector<LabeledMean> label_with_reference(const TripletRecord& ref, const TripletRecord& cand,
                                                  const GridMixture& mr_sum);
} // namespace mslr

#endif
