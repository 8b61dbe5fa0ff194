#include "mslr/cs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

namespace mslr
{
    SensingSystem::SensingSystem(Eigen::MatrixXd entries, double scale) : entries_(std::move(entries)), scale_(scale)
    {
        if (entries_.rows() < 1 || entries_.cols() < 1)
            throw std::invalid_argument("SensingSystem: empty matrix");
        if (!(scale_ > 0.0))
            throw std::invalid_argument("SensingSystem: scale must be positive");
    }

    SensingSystem sample_pm1(Eigen::Index m, Eigen::Index n, Rng& rng)
    {
        if (m < 1 || n < 1)
            throw std::invalid_argument("sample_pm1: need m, n >= 1");
        Eigen::MatrixXd a(m, n);
        for (Eigen::Index i = 0; i < m; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                a(i, j) = rng.sign();
        return SensingSystem(std::move(a), 1.0 / std::sqrt(static_cast<double>(m)));
    }

    double empirical_rip_delta(const SensingSystem& system, Eigen::Index k, double cap)
    {
        const Eigen::Index n = system.cols();
        if (k < 1 || k > n)
            throw std::invalid_argument("empirical_rip_delta: need 1 <= k <= n");
        const double count = std::exp(std::lgamma(static_cast<double>(n) + 1) - std::lgamma(static_cast<double>(k) + 1) -
                                      std::lgamma(static_cast<double>(n - k) + 1));
        if (count > cap * (1 + 1e-9))
            throw TooLarge("empirical_rip_delta: " + std::to_string(count) + " supports");

        const Eigen::MatrixXd a = system.normalized();
        const Eigen::MatrixXd gram = a.transpose() * a;
        std::vector<Eigen::Index> idx(static_cast<std::size_t>(k));
        std::iota(idx.begin(), idx.end(), Eigen::Index{0});
        Eigen::MatrixXd g(k, k);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
        double delta = 0.0;
        while (true) {
            for (Eigen::Index i = 0; i < k; ++i)
                for (Eigen::Index j = 0; j < k; ++j)
                    g(i, j) = gram(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
            es.compute(g, Eigen::EigenvaluesOnly);
            const auto& ev = es.eigenvalues();
            delta = std::max({delta, 1.0 - ev.minCoeff(), ev.maxCoeff() - 1.0});

            Eigen::Index i = k;
            while (i > 0 && idx[static_cast<std::size_t>(i - 1)] == n - k + i - 1)
                --i;
            if (i == 0)
                break;
            ++idx[static_cast<std::size_t>(i - 1)];
            for (Eigen::Index j = i; j < k; ++j)
                idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
        }
        return delta;
    }

    namespace
    {
        Eigen::VectorXd soft(const Eigen::VectorXd& v, double t)
        {
            return v.unaryExpr([t](double x) { return x > t ? x - t : (x < -t ? x + t : 0.0); });
        }

        // ADMM on min |z|_1 s.t. x = z, A x = y (least-squares affine set).
        BasisPursuitResult admm(const Eigen::MatrixXd& a, const Eigen::VectorXd& y, const BasisPursuitOptions& opt)
        {
            const Eigen::Index n = a.cols();
            const Eigen::MatrixXd pinv = a.completeOrthogonalDecomposition().pseudoInverse();
            const Eigen::MatrixXd proj = Eigen::MatrixXd::Identity(n, n) - pinv * a;
            const Eigen::VectorXd x0 = pinv * y;

            Eigen::VectorXd x = x0, z = x0, u = Eigen::VectorXd::Zero(n);
            BasisPursuitResult res;
            for (int it = 1; it <= opt.max_iterations; ++it) {
                x = proj * (z - u) + x0;
                const Eigen::VectorXd z_old = z;
                z = soft(x + u, 1.0 / opt.rho);
                u += x - z;
                res.iterations = it;
                const double scale = std::max(1.0, z.norm());
                if ((x - z).norm() <= opt.stop_tolerance * scale &&
                    opt.rho * (z - z_old).norm() <= opt.stop_tolerance * scale) {
                    res.converged = true;
                    break;
                }
            }
            // z is sparse but only approximately feasible; x is feasible
            res.beta = z;
            return res;
        }

        // Chambolle-Pock on min |x|_1 + indicator(|A x - y| <= tol).
        BasisPursuitResult primal_dual(const Eigen::MatrixXd& a, const Eigen::VectorXd& y, double tol,
                                       const BasisPursuitOptions& opt)
        {
            const Eigen::Index n = a.cols();
            const double L = Eigen::JacobiSVD<Eigen::MatrixXd>(a).singularValues()(0);
            const double tau = 0.99 / L, sigma = 0.99 / L;
            Eigen::VectorXd x = Eigen::VectorXd::Zero(n), xbar = x, p = Eigen::VectorXd::Zero(a.rows());
            BasisPursuitResult res;
            for (int it = 1; it <= opt.max_iterations; ++it) {
                // prox of sigma f*, f = indicator of the ball around y
                const Eigen::VectorXd w = p + sigma * (a * xbar);
                Eigen::VectorXd d = w / sigma - y;
                const double dn = d.norm();
                if (dn > tol)
                    d *= tol / dn;
                p = w - sigma * (y + d);
                const Eigen::VectorXd x_old = x;
                x = soft(x - tau * (a.transpose() * p), tau);
                xbar = 2.0 * x - x_old;
                res.iterations = it;
                const double change = (x - x_old).norm();
                const double infeas = std::max(0.0, (a * x - y).norm() - tol);
                if (change <= opt.stop_tolerance * std::max(1.0, x.norm()) &&
                    infeas <= opt.stop_tolerance * std::max(1.0, y.norm())) {
                    res.converged = true;
                    break;
                }
            }
            res.beta = x;
            return res;
        }
    } // namespace

    BasisPursuitResult basis_pursuit(const SensingSystem& system, const Eigen::VectorXd& y, double tol,
                                     const BasisPursuitOptions& options)
    {
        if (y.size() != system.rows())
            throw std::invalid_argument("basis_pursuit: y length differs from row count");
        if (tol < 0.0)
            throw std::invalid_argument("basis_pursuit: negative tolerance");
        const Eigen::MatrixXd a = system.normalized();
        const Eigen::Index n = a.cols();

        BasisPursuitResult res;
        if (y.norm() <= tol) {
            res.beta = Eigen::VectorXd::Zero(n);
            res.converged = true;
            return res;
        }
        res = tol <= 1e-9 ? admm(a, y, options) : primal_dual(a, y, tol, options);

        if (options.debias) {
            const double threshold = 10.0 * std::max(tol, 1e-9);
            std::vector<Eigen::Index> support;
            for (Eigen::Index i = 0; i < n; ++i)
                if (std::abs(res.beta(i)) > threshold)
                    support.push_back(i);
            if (!support.empty() && static_cast<Eigen::Index>(support.size()) <= a.rows()) {
                Eigen::MatrixXd as(a.rows(), static_cast<Eigen::Index>(support.size()));
                for (std::size_t c = 0; c < support.size(); ++c)
                    as.col(static_cast<Eigen::Index>(c)) = a.col(support[c]);
                const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(as);
                if (qr.rank() == as.cols()) {
                    const Eigen::VectorXd coef = qr.solve(y);
                    Eigen::VectorXd beta = Eigen::VectorXd::Zero(n);
                    for (std::size_t c = 0; c < support.size(); ++c)
                        beta(support[c]) = coef(static_cast<Eigen::Index>(c));
                    res.beta = std::move(beta);
                }
            } else if (support.empty()) {
                res.beta.setZero();
            }
        }
        res.residual = (a * res.beta - y).norm();
        return res;
    }
} // namespace mslr
