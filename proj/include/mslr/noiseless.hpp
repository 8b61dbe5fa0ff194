#ifndef MSLR_NOISELESS_HPP
#define MSLR_NOISELESS_HPP

#include <cstdint>
#include <span>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include "mslr/exact.hpp"
#include "mslr/model.hpp"
#include "mslr/oracle.hpp"
#include "mslr/rng.hpp"

namespace mslr
{
    class NoiselessError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    /// A batch showed fewer distinct responses than there are components.
    class MissedComponent : public NoiselessError
    {
    public:
        using NoiselessError::NoiselessError;
    };

    /// A batch showed more distinct responses than components (noise or a
    /// dedupe tolerance that is too tight).
    class ExtraResponses : public NoiselessError
    {
    public:
        using NoiselessError::NoiselessError;
    };

    class NoConsistentSupport : public NoiselessError
    {
    public:
        using NoiselessError::NoiselessError;
    };

    /// 2k evaluation points packed into one short interval
    /// (t*gamma, (t+1)*gamma], gamma = 1/(k^2 L^2).
    struct AlphaGrid
    {
        std::size_t t = 0;
        std::size_t k = 0;
        std::size_t L = 0;
        std::vector<Rational> exact;
        std::vector<double> alphas;
        double gamma = 0.0;

        template <typename Scalar>
        Scalar alpha(std::size_t j) const
        {
            if constexpr (std::is_same_v<Scalar, Rational>)
                return exact[j];
            else
                return static_cast<Scalar>(alphas[j]);
        }
    };

    AlphaGrid alpha_grid_at(std::size_t k, std::size_t L, std::size_t t);
    /// t drawn uniformly from {0, ..., k^2 L^2 - 1}.
    AlphaGrid make_alpha_grid(std::size_t k, std::size_t L, Rng& rng);

    /// (1, a, a^2, ..., a^(n-1)), powers built by repeated multiplication.
    template <typename Scalar>
    Vector<Scalar> vandermonde_row(const Scalar& alpha, std::size_t n)
    {
        Vector<Scalar> row(static_cast<Eigen::Index>(n));
        Scalar p(1);
        for (std::size_t i = 0; i < n; ++i) {
            row(static_cast<Eigen::Index>(i)) = p;
            p *= alpha;
        }
        return row;
    }

    template <typename Scalar>
    struct ProcessedBatch
    {
        std::vector<Scalar> values;
    };

    /// Sorted distinct responses. Two doubles are merged when
    /// |a - b| <= rel_tol * max(|a|, |b|); rel_tol is ignored for Rational.
    /// Throws MissedComponent below L values and ExtraResponses above.
    template <typename Scalar>
    ProcessedBatch<Scalar> process_batch(std::span<const Scalar> samples, std::size_t L, double rel_tol = 0.0);

    /// The k-sparse b with <vandermonde_row(alpha_j), b> = values[j] for all
    /// 2k rows. The double overload solves each candidate support by
    /// column-pivoted QR and accepts a residual of 1e-7 (1 + max|value|).
    /// The Rational overload screens supports mod 2^61 - 1 and confirms the
    /// survivor exactly. Throws NoConsistentSupport.
    Vector<double> decode_sparse(const AlphaGrid& grid, std::span<const double> values,
                                 std::size_t n, std::size_t k);
    Vector<Rational> decode_sparse(const AlphaGrid& grid, std::span<const Rational> values,
                                   std::size_t n, std::size_t k);

    /// ceil(multiplier * L * ln(L k^2)), at least 1.
    std::size_t noiseless_batch_size(std::size_t k, std::size_t L, double multiplier = 1.0);

    struct NoiselessOptions
    {
        double batch_multiplier = 1.0;
        double dedupe_rel_tol = 0.0;
    };

    template <typename Scalar>
    struct NoiselessRun
    {
        AlphaGrid grid;
        std::size_t batch_size = 0;
        std::vector<ProcessedBatch<Scalar>> batches;
        /// estimates[l] decodes column l of the 2k x L response matrix.
        std::vector<Vector<Scalar>> estimates;
    };

    /// Issues all 2k batches, then sorts each batch and decodes the columns.
    /// Errors from process_batch or decode_sparse propagate.
    template <typename Scalar>
    NoiselessRun<Scalar> run_noiseless(Oracle<Scalar>& oracle, std::size_t n, std::size_t k, std::size_t L,
                                       Rng& rng, const NoiselessOptions& options = {});

    /// run_noiseless scored against the oracle's hidden signals.
    template <typename Scalar>
    RecoveryReport recover_noiseless(Oracle<Scalar>& oracle, std::size_t n, std::size_t k, std::size_t L,
                                     Rng& rng, const NoiselessOptions& options = {});
} // namespace mslr

#endif
