#include "mslr/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mslr/cs.hpp"
#include "mslr/rng.hpp"

namespace mslr
{
    void NoisyRunConfig::validate() const
    {
        if (n < 2 || k < 1 || k > n)
            throw std::invalid_argument("NoisyRunConfig: need 1 <= k <= n and n >= 2");
        if (L < 2)
            throw std::invalid_argument("NoisyRunConfig: need L >= 2");
        if (!(sigma > 0.0) || !(epsilon > 0.0))
            throw std::invalid_argument("NoisyRunConfig: sigma and epsilon must be positive");
        if (c_s < 1.0 || (c2 && !(*c2 > 0.0)))
            throw std::invalid_argument("NoisyRunConfig: need c_s >= 1 and c2 > 0");
    }

    namespace
    {
        std::size_t ceil_pos(double x)
        {
            return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(x - 1e-12)));
        }

        double log_n_over_k(const NoisyRunConfig& c)
        {
            // ln(n/k) vanishes at k = n; keep at least one row per unknown
            return std::max(std::log(static_cast<double>(c.n) / static_cast<double>(c.k)), 1.0);
        }
    } // namespace

    Schedule noisy_L2_schedule(const NoisyRunConfig& config)
    {
        config.validate();
        Schedule s;
        const double ln_n = std::log(static_cast<double>(config.n));
        s.rows = ceil_pos(config.c_s * static_cast<double>(config.k) * log_n_over_k(config));
        s.references = std::min(ceil_pos(ln_n), s.rows);
        const double c2 = config.c2.value_or(kDefaultC2TwoVector);
        s.batch_size = ceil_pos(c2 * ln_n * std::exp(std::pow(config.sigma / config.epsilon, 2.0 / 3.0)));
        s.batches = s.rows + 2 * s.references * (s.rows - 1);
        s.queries = s.batches * s.batch_size;
        return s;
    }

    Schedule noisy_generalL_schedule(const NoisyRunConfig& config)
    {
        config.validate();
        Schedule s;
        s.constants = compute_constants(config.delta, config.L, config.alpha_override);
        const double ln_n = std::log(static_cast<double>(config.n));
        const double a = s.constants.alpha_star;
        const double ck = s.constants.c_prime * static_cast<double>(config.k) * log_n_over_k(config);
        s.references = ceil_pos(std::sqrt(a) * ln_n);
        s.candidates = ceil_pos(a * ck);
        s.rows = ceil_pos(ck);
        s.batch_size = required_batch_size(config.sigma, config.epsilon, config.L, static_cast<double>(config.n),
                                           config.c2.value_or(kDefaultC2General));
        s.batches = 3 * (s.references + s.candidates) + s.references * s.candidates;
        s.queries = s.batches * s.batch_size;
        return s;
    }

    std::vector<double> cluster_purity(const AggregatedSystem& system, const SignalSet& truth)
    {
        std::vector<double> out;
        const Eigen::Index m = system.queries.rows();
        for (const auto& resp : system.responses) {
            std::size_t best = 0;
            for (std::size_t l = 0; l < truth.L(); ++l) {
                const Eigen::VectorXd inner = system.queries * truth[l];
                std::size_t hits = 0;
                for (Eigen::Index i = 0; i < m; ++i)
                    if (std::abs(resp(i) - inner(i)) <= 1e-9 * (1.0 + std::abs(inner(i))))
                        ++hits;
                best = std::max(best, hits);
            }
            out.push_back(m ? static_cast<double>(best) / static_cast<double>(m) : 0.0);
        }
        return out;
    }

    namespace
    {
        Eigen::VectorXd random_pm1(std::size_t n, Rng& rng)
        {
            Eigen::VectorXd v(static_cast<Eigen::Index>(n));
            for (Eigen::Index i = 0; i < v.size(); ++i)
                v(i) = rng.sign();
            return v;
        }

        struct Denoiser
        {
            const NoisyRunConfig& config;
            Rng rng;

            GridMixture operator()(const std::vector<double>& samples)
            {
                return estimate_means(samples, config.L, config.sigma, config.epsilon, config.estimator, rng,
                                      config.gmm_cap);
            }
        };

        std::vector<double> values(const GridMixture& g)
        {
            return g.means();
        }

        void decode(NoisyRun& run, Oracle<double>& oracle, std::size_t queries_before)
        {
            const SensingSystem sys(run.system.queries, run.system.scale);
            std::vector<Eigen::VectorXd> est;
            for (const auto& resp : run.system.responses) {
                const BasisPursuitResult bp = basis_pursuit(sys, run.system.scale * resp, 1e-9);
                run.converged.push_back(bp.converged);
                est.push_back(bp.beta);
            }
            run.report = match_and_score(oracle.signals(), std::move(est), oracle.query_count() - queries_before);
            run.snr = oracle.reported_snr();
        }
    } // namespace

    NoisyRun recover_noisy_L2(Oracle<double>& oracle, const NoisyRunConfig& config)
    {
        if (config.L != 2 || oracle.signals().L() != 2)
            throw std::invalid_argument("recover_noisy_L2: needs L = 2");
        if (oracle.signals().n() != config.n)
            throw std::invalid_argument("recover_noisy_L2: oracle dimension differs from config");
        NoisyRun run;
        run.schedule = noisy_L2_schedule(config);
        const Schedule& s = run.schedule;
        const std::size_t before = oracle.query_count();

        Rng rng(derive_seed(config.seed, 0));
        Denoiser denoise{config, Rng(derive_seed(config.seed, 1))};

        std::vector<Eigen::VectorXd> v;
        for (std::size_t i = 0; i < s.rows; ++i)
            v.push_back(random_pm1(config.n, rng));

        // issue every batch up front, in schedule order
        const QueryDesign pm1{DesignKind::pm1, 0, 0};
        const QueryDesign half_sum{DesignKind::pm1_halfsum, 0, 0};
        const QueryDesign half_diff{DesignKind::pm1_halfdiff, 0, 0};
        std::vector<std::vector<double>> base;
        for (std::size_t i = 0; i < s.rows; ++i)
            base.push_back(oracle.query_batch(v[i], s.batch_size, pm1));
        // sums[j][i], diffs[j][i] for reference candidate j and base vector i != j
        std::vector<std::vector<std::vector<double>>> sums(s.references), diffs(s.references);
        for (std::size_t j = 0; j < s.references; ++j) {
            sums[j].resize(s.rows);
            diffs[j].resize(s.rows);
            for (std::size_t i = 0; i < s.rows; ++i) {
                if (i == j)
                    continue;
                sums[j][i] = oracle.query_batch((v[j] + v[i]) / 2.0, s.batch_size, half_sum);
                diffs[j][i] = oracle.query_batch((v[j] - v[i]) / 2.0, s.batch_size, half_diff);
            }
        }

        std::vector<std::optional<GridMixture>> base_means(s.rows);
        auto means_of = [&](std::size_t i) -> const GridMixture& {
            if (!base_means[i])
                base_means[i] = denoise(base[i]);
            return *base_means[i];
        };

        std::size_t ref = s.references;
        for (std::size_t j = 0; j < s.references; ++j) {
            const GridMixture& g = means_of(j);
            if (g.units[0] != g.units[1]) {
                ref = j;
                break;
            }
        }
        if (ref == s.references)
            throw NoGoodReference("recover_noisy_L2: no reference candidate separates the two components");
        run.reference = ref;

        const double tol = config.epsilon / 4.0;
        const std::vector<double> mv = values(means_of(ref));
        AggregatedSystem& agg = run.system;
        agg.queries.resize(static_cast<Eigen::Index>(s.rows), static_cast<Eigen::Index>(config.n));
        agg.responses.assign(2, Eigen::VectorXd(static_cast<Eigen::Index>(s.rows)));
        agg.scale = 1.0 / std::sqrt(static_cast<double>(s.rows));
        for (std::size_t i = 0; i < s.rows; ++i) {
            const Eigen::Index row = static_cast<Eigen::Index>(i);
            agg.queries.row(row) = v[i].transpose();
            if (i == ref) {
                agg.responses[0](row) = mv[0];
                agg.responses[1](row) = mv[1];
                continue;
            }
            const std::vector<double> mb = values(means_of(i));
            const std::vector<double> ms = values(denoise(sums[ref][i]));
            const std::vector<double> md = values(denoise(diffs[ref][i]));
            const PairAlignment p = align_pair_L2(mv, mb, ms, md, tol);
            agg.responses[0](row) = p.partner[0];
            agg.responses[1](row) = p.partner[1];
        }

        decode(run, oracle, before);
        return run;
    }

    NoisyRun recover_noisy_generalL(Oracle<double>& oracle, const NoisyRunConfig& config)
    {
        if (oracle.signals().L() != config.L)
            throw std::invalid_argument("recover_noisy_generalL: oracle L differs from config");
        if (oracle.signals().n() != config.n)
            throw std::invalid_argument("recover_noisy_generalL: oracle dimension differs from config");
        NoisyRun run;
        run.schedule = noisy_generalL_schedule(config);
        const Schedule& s = run.schedule;
        const std::int64_t z = s.constants.z_star;
        const std::size_t before = oracle.query_count();

        Rng rng(derive_seed(config.seed, 0));
        Denoiser denoise{config, Rng(derive_seed(config.seed, 1))};
        const std::size_t total = s.references + s.candidates;

        constexpr std::size_t kAttempts = 2;
        for (std::size_t attempt = 1; attempt <= kAttempts; ++attempt) {
            run.attempts = attempt;
            std::vector<TripletRecord> trip(total);
            for (auto& t : trip) {
                t.v = random_pm1(config.n, rng);
                t.r.resize(static_cast<Eigen::Index>(config.n));
                for (Eigen::Index i = 0; i < t.r.size(); ++i)
                    t.r(i) = static_cast<double>(rng.between(-2 * z, 2 * z));
                // q = 1 would zero out the middle query
                t.q = rng.between(2, 4 * z + 1);
            }

            const int zi = static_cast<int>(z);
            std::vector<std::array<std::vector<double>, 3>> raw(total);
            for (std::size_t t = 0; t < total; ++t) {
                const auto& tr = trip[t];
                const int q = static_cast<int>(tr.q);
                raw[t][0] = oracle.query_batch(tr.v + tr.r, s.batch_size, {DesignKind::composite, zi, 1});
                raw[t][1] = oracle.query_batch(static_cast<double>(tr.q - 1) * tr.r, s.batch_size,
                                               {DesignKind::grid_r, zi, q - 1});
                raw[t][2] = oracle.query_batch(tr.v + static_cast<double>(tr.q) * tr.r, s.batch_size,
                                               {DesignKind::composite, zi, q});
            }
            // cross[j][t]: r_j + r_{R + t}
            std::vector<std::vector<std::vector<double>>> cross(s.references);
            for (std::size_t j = 0; j < s.references; ++j)
                for (std::size_t t = 0; t < s.candidates; ++t)
                    cross[j].push_back(oracle.query_batch(trip[j].r + trip[s.references + t].r, s.batch_size,
                                                          {DesignKind::grid_r_sum, zi, 1}));

            auto fill = [&](std::size_t t) {
                TripletRecord& tr = trip[t];
                tr.a = denoise(raw[t][0]);
                tr.b = denoise(raw[t][1]);
                tr.c = denoise(raw[t][2]);
            };

            std::size_t ref = s.references;
            for (std::size_t j = 0; j < s.references; ++j) {
                fill(j);
                try {
                    derive_components(trip[j]);
                    ref = j;
                    break;
                } catch (const NotGood&) {
                }
            }
            if (ref == s.references)
                throw NoGoodReference("recover_noisy_generalL: no good reference triplet");
            run.reference = ref;

            std::vector<Eigen::VectorXd> rows;
            std::vector<std::vector<std::int64_t>> labeled;
            for (std::size_t t = 0; t < s.candidates && rows.size() < s.rows; ++t) {
                const std::size_t idx = s.references + t;
                fill(idx);
                try {
                    const auto lab = label_with_reference(trip[ref], trip[idx], denoise(cross[ref][t]));
                    std::vector<std::int64_t> vals;
                    for (const auto& m : lab)
                        vals.push_back(m.value);
                    rows.push_back(trip[idx].v);
                    labeled.push_back(std::move(vals));
                } catch (const AlignError&) {
                }
            }
            if (rows.size() < s.rows)
                continue;

            AggregatedSystem& agg = run.system;
            agg.queries.resize(static_cast<Eigen::Index>(s.rows), static_cast<Eigen::Index>(config.n));
            agg.responses.assign(config.L, Eigen::VectorXd(static_cast<Eigen::Index>(s.rows)));
            agg.scale = 1.0 / std::sqrt(static_cast<double>(s.rows));
            for (std::size_t i = 0; i < s.rows; ++i) {
                agg.queries.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
                for (std::size_t l = 0; l < config.L; ++l)
                    agg.responses[l](static_cast<Eigen::Index>(i)) = static_cast<double>(labeled[i][l]) * config.epsilon;
            }
            decode(run, oracle, before);
            return run;
        }
        throw InsufficientMatchingGood("recover_noisy_generalL: fewer than " + std::to_string(s.rows) +
                                       " matching-good triplets after a redraw");
    }
} // namespace mslr
