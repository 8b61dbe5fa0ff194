#ifndef MSLR_CS_HPP
#define MSLR_CS_HPP

#include <stdexcept>

#include <Eigen/Dense>

#include "mslr/rng.hpp"

namespace mslr
{
    class TooLarge : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    /// Measurement matrix with a decode-time scale (1/sqrt(m) for +-1 rows).
    class SensingSystem
    {
    public:
        /// Any matrix; sample_pm1 is the usual source.
        SensingSystem(Eigen::MatrixXd entries, double scale);

        Eigen::Index rows() const { return entries_.rows(); }
        Eigen::Index cols() const { return entries_.cols(); }
        const Eigen::MatrixXd& entries() const { return entries_; }
        double scale() const { return scale_; }
        Eigen::MatrixXd normalized() const { return scale_ * entries_; }

    private:
        Eigen::MatrixXd entries_;
        double scale_;
    };

    /// m x n iid uniform +-1 entries, scale 1/sqrt(m). Row-major draw order.
    SensingSystem sample_pm1(Eigen::Index m, Eigen::Index n, Rng& rng);

    /// max over k-column supports S of max(1 - lambda_min, lambda_max - 1)
    /// for the Gram matrix of the normalized columns in S.
    /// Throws TooLarge when C(n, k) exceeds cap.
    double empirical_rip_delta(const SensingSystem& system, Eigen::Index k, double cap = 1e6);

    struct BasisPursuitOptions
    {
        int max_iterations = 50000;
        double stop_tolerance = 1e-8;
        double rho = 1.0;
        bool debias = true;
    };

    struct BasisPursuitResult
    {
        Eigen::VectorXd beta;
        bool converged = false;
        int iterations = 0;
        /// |normalized * beta - y|_2
        double residual = 0.0;
    };

    /// argmin |b|_1 subject to |normalized * b - y|_2 <= tol. tol <= 1e-9 is
    /// treated as the equality constraint and solved by ADMM; larger tol by a
    /// primal-dual (Chambolle-Pock) iteration. Afterwards coordinates above
    /// 10 tol form the support and are refit by least squares.
    /// On hitting the iteration cap the best iterate is returned with
    /// converged = false.
    BasisPursuitResult basis_pursuit(const SensingSystem& system, const Eigen::VectorXd& y, double tol = 1e-9,
                                     const BasisPursuitOptions& options = {});
} // namespace mslr

#endif
