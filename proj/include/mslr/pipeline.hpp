#ifndef MSLR_PIPELINE_HPP
#define MSLR_PIPELINE_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "mslr/align.hpp"
#include "mslr/gridgmm.hpp"
#include "mslr/model.hpp"
#include "mslr/oracle.hpp"

namespace mslr
{
    class NoGoodReference : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    class InsufficientMatchingGood : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    inline constexpr double kDefaultC2TwoVector = 20.0;
    inline constexpr double kDefaultC2General = 4.0;

    struct NoisyRunConfig
    {
        std::size_t n = 0;
        std::size_t k = 0;
        std::size_t L = 2;
        double sigma = 0.0;
        double epsilon = 0.0;
        /// rows m = ceil(c_s k ln(n/k)) for the two-vector pipeline
        double c_s = 6.0;
        /// batch-size constant; unset picks the pipeline default
        std::optional<double> c2;
        double delta = 0.4;
        std::optional<double> alpha_override = 4.0;
        Estimator estimator = Estimator::automatic;
        double gmm_cap = kMinDistanceCap;
        std::uint64_t seed = 0;

        /// Throws std::invalid_argument.
        void validate() const;
    };

    /// Query plan implied by a config; sizes are fixed before any query.
    struct Schedule
    {
        std::size_t rows = 0;       // m: measurements per component
        std::size_t references = 0; // reference candidates
        std::size_t candidates = 0; // triplet candidates (general L only)
        std::size_t batch_size = 0; // T
        std::size_t batches = 0;
        std::size_t queries = 0;
        AlignConstants constants; // general L only
    };

    /// m = ceil(c_s k ln(n/k)), R = min(ceil(ln n), m),
    /// T = ceil(c2 ln(n) exp((sigma/eps)^(2/3))), batches = m + 2 R (m - 1).
    Schedule noisy_L2_schedule(const NoisyRunConfig& config);

    /// R = ceil(sqrt(a*) ln n), M = ceil(c' a* k ln(n/k)), m = ceil(c' k ln(n/k)),
    /// T = required_batch_size(sigma, eps, L, n, c2), batches = 3 (R + M) + R M.
    Schedule noisy_generalL_schedule(const NoisyRunConfig& config);

    /// Aggregated (query, denoised response) pairs per component.
    struct AggregatedSystem
    {
        Eigen::MatrixXd queries;                // m x n, +-1 rows
        std::vector<Eigen::VectorXd> responses; // one length-m column per component
        double scale = 1.0;                     // 1/sqrt(m)
    };

    /// White-box: for each cluster the fraction of rows whose response equals
    /// <row, beta> for the cluster's best-matching hidden component.
    std::vector<double> cluster_purity(const AggregatedSystem& system, const SignalSet& truth);

    struct NoisyRun
    {
        RecoveryReport report;
        AggregatedSystem system;
        Schedule schedule;
        std::size_t reference = 0;
        std::size_t attempts = 1;
        double snr = 0.0;
        std::vector<bool> converged;
    };

    /// Two-vector pipeline: +-1 base vectors, (v_j +- v_i)/2 alignment
    /// queries against each of the first R base vectors, denoising, pairing
    /// against a good reference, then basis pursuit per cluster.
    /// Throws NoGoodReference, DenoiseFailure or AlignError subclasses.
    NoisyRun recover_noisy_L2(Oracle<double>& oracle, const NoisyRunConfig& config);

    /// General-L pipeline using (v + r, (q - 1) r, v + q r) triplets and
    /// r + r* cross queries. Throws NoGoodReference or
    /// InsufficientMatchingGood (after one full redraw).
    NoisyRun recover_noisy_generalL(Oracle<double>& oracle, const NoisyRunConfig& config);
} // namespace mslr

#endif
