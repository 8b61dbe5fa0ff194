#include "mslr/oracle.hpp"

#include <limits>

namespace mslr
{
    std::string_view to_string(DesignKind kind)
    {
        switch (kind) {
        case DesignKind::pm1: return "pm1";
        case DesignKind::pm1_halfsum: return "pm1_halfsum";
        case DesignKind::pm1_halfdiff: return "pm1_halfdiff";
        case DesignKind::grid_r: return "grid_r";
        case DesignKind::grid_r_sum: return "grid_r_sum";
        case DesignKind::composite: return "composite";
        case DesignKind::fixed: return "fixed";
        }
        return "unknown";
    }

    double design_energy_factor(const QueryDesign& design)
    {
        // second moment of one entry of r uniform on {-2z, ..., 2z}
        const double z = design.z_star;
        const double r2 = 2.0 * z * (2.0 * z + 1.0) / 3.0;
        const double s = design.scale;
        switch (design.kind) {
        case DesignKind::pm1: return 1.0;
        case DesignKind::pm1_halfsum:
        case DesignKind::pm1_halfdiff: return 0.5;
        case DesignKind::grid_r: return s * s * r2;
        case DesignKind::grid_r_sum: return 2.0 * r2;
        case DesignKind::composite: return 1.0 + s * s * r2;
        case DesignKind::fixed: break;
        }
        throw std::invalid_argument("design_energy_factor: design has no closed form");
    }

    double analytic_snr(std::span<const QueryDesign> designs, const SignalSet& signals, double sigma)
    {
        if (!(sigma > 0.0))
            throw std::invalid_argument("analytic_snr: sigma must be positive");
        if (designs.empty())
            throw std::invalid_argument("analytic_snr: no designs");
        double min_norm2 = std::numeric_limits<double>::infinity();
        for (const auto& b : signals.vectors())
            min_norm2 = std::min(min_norm2, b.squaredNorm());
        double best = 0.0;
        for (const auto& d : designs)
            best = std::max(best, design_energy_factor(d) * min_norm2 / (sigma * sigma));
        return best;
    }
} // namespace mslr
