#ifndef MSLR_ORACLE_HPP
#define MSLR_ORACLE_HPP

#include <algorithm>
#include <cstdint>
#include <functional>
#include <iterator>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "mslr/model.hpp"
#include "mslr/rng.hpp"

namespace mslr
{
    /// Distribution a query vector was drawn from; determines E|<x, b>|^2.
    enum class DesignKind
    {
        pm1,          // v uniform on {+1,-1}^n
        pm1_halfsum,  // (v + v') / 2
        pm1_halfdiff, // (v - v') / 2
        grid_r,       // s * r, r uniform on {-2z*, ..., 2z*}^n, s = scale
        grid_r_sum,   // r + r'
        composite,    // v + s * r
        fixed,        // deterministic vector (no SNR closed form)
    };

    std::string_view to_string(DesignKind kind);

    struct QueryDesign
    {
        DesignKind kind = DesignKind::fixed;
        int z_star = 0;
        /// Multiplier on r for grid_r / composite.
        int scale = 0;

        friend bool operator==(const QueryDesign&, const QueryDesign&) = default;
    };

    /// E|<x, b>|^2 / |b|_2^2 for x drawn from the design.
    double design_energy_factor(const QueryDesign& design);

    /// max over designs of min over components of E|<x, b_l>|^2 / sigma^2.
    /// Throws std::invalid_argument when sigma <= 0 or a design has no
    /// closed form.
    double analytic_snr(std::span<const QueryDesign> designs, const SignalSet& signals, double sigma);

    /// Single-design convenience overload.
    inline double analytic_snr(const QueryDesign& design, const SignalSet& signals, double sigma)
    {
        return analytic_snr(std::span<const QueryDesign>(&design, 1), signals, sigma);
    }

    /// Simulated query oracle: each query picks a hidden component J uniformly
    /// and returns <x, b_J> + eta, eta ~ N(0, sigma^2).
    ///
    /// Draw order per query is fixed: one Rng::below(L) for J, then one
    /// Rng::normal() when sigma > 0. Inner products are summed left to right,
    /// so identical queries give bit-identical noiseless responses.
    /// Scalar = Rational gives exact noiseless responses.
    template <typename Scalar>
    class Oracle
    {
    public:
        using VectorType = Vector<Scalar>;
        using TraceSink = std::function<void(std::size_t query_index, const QueryDesign&, const Scalar&)>;

        Oracle(SignalSet signals, double sigma, std::uint64_t seed)
            : signals_(std::move(signals)), sigma_(sigma), rng_(seed)
        {
            if (sigma_ < 0.0)
                throw std::invalid_argument("Oracle: sigma must be non-negative");
            for (const auto& v : signals_.vectors())
                hidden_.push_back(v.template cast<Scalar>());
        }

        Scalar query(const VectorType& x, const QueryDesign& design = {})
        {
            check_dimension(x);
            note_design(design);
            const std::size_t j = static_cast<std::size_t>(rng_.below(signals_.L()));
            return respond(inner(x, j), j, design);
        }

        /// T independent responses to the same x; equivalent to T calls of
        /// query(x) but each component's inner product is evaluated once.
        std::vector<Scalar> query_batch(const VectorType& x, std::size_t T, const QueryDesign& design = {})
        {
            if (T < 1)
                throw std::invalid_argument("Oracle::query_batch: T must be >= 1");
            check_dimension(x);
            note_design(design);
            std::vector<Scalar> means;
            means.reserve(signals_.L());
            for (std::size_t l = 0; l < signals_.L(); ++l)
                means.push_back(inner(x, l));
            std::vector<Scalar> out;
            out.reserve(T);
            for (std::size_t t = 0; t < T; ++t) {
                const std::size_t j = static_cast<std::size_t>(rng_.below(signals_.L()));
                out.push_back(respond(means[j], j, design));
            }
            return out;
        }

        std::size_t query_count() const { return query_count_; }
        const SignalSet& signals() const { return signals_; }
        double sigma() const { return sigma_; }

        /// Distinct designs issued so far, in first-use order.
        const std::vector<QueryDesign>& designs() const { return designs_; }

        /// analytic_snr over every issued design with a closed form.
        double reported_snr() const
        {
            std::vector<QueryDesign> known;
            std::copy_if(designs_.begin(), designs_.end(), std::back_inserter(known),
                         [](const QueryDesign& d) { return d.kind != DesignKind::fixed; });
            if (known.empty() || sigma_ <= 0.0)
                return 0.0;
            return analytic_snr(known, signals_, sigma_);
        }

        /// White-box: record the hidden component index of every query.
        void enable_component_log(bool on = true) { log_components_ = on; }
        const std::vector<std::size_t>& component_log() const { return component_log_; }

        void set_trace(TraceSink sink) { trace_ = std::move(sink); }

    private:
        void check_dimension(const VectorType& x) const
        {
            if (static_cast<std::size_t>(x.size()) != signals_.n())
                throw std::invalid_argument("Oracle: query dimension differs from n");
        }

        void note_design(const QueryDesign& design)
        {
            if (std::find(designs_.begin(), designs_.end(), design) == designs_.end())
                designs_.push_back(design);
        }

        Scalar inner(const VectorType& x, std::size_t component) const
        {
            const VectorType& b = hidden_[component];
            Scalar acc(0);
            for (Eigen::Index i = 0; i < x.size(); ++i)
                acc += x(i) * b(i);
            return acc;
        }

        Scalar respond(const Scalar& mean, std::size_t component, const QueryDesign& design)
        {
            Scalar y = mean;
            if (sigma_ > 0.0)
                y += Scalar(sigma_ * rng_.normal());
            if (log_components_)
                component_log_.push_back(component);
            if (trace_)
                trace_(query_count_, design, y);
            ++query_count_;
            return y;
        }

        SignalSet signals_;
        std::vector<VectorType> hidden_;
        double sigma_;
        Rng rng_;
        std::size_t query_count_ = 0;
        std::vector<QueryDesign> designs_;
        bool log_components_ = false;
        std::vector<std::size_t> component_log_;
        TraceSink trace_;
    };
} // namespace mslr

#endif
