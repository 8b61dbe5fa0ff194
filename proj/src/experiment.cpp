#include "mslr/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "mslr/cs.hpp"
#include "mslr/model.hpp"
#include "mslr/noiseless.hpp"
#include "mslr/oracle.hpp"
#include "mslr/pipeline.hpp"

namespace mslr
{
    std::vector<std::string> experiment_commands()
    {
        return {"gen", "noiseless", "noisy2", "noisyL", "gmm-bench", "rip-check", "lowerbound"};
    }

    ExperimentConfig ExperimentConfig::resolve() const
    {
        ExperimentConfig c = *this;
        const auto cmds = experiment_commands();
        if (std::find(cmds.begin(), cmds.end(), c.command) == cmds.end())
            throw ConfigError("unknown command: " + c.command);
        if (!c.seed)
            throw ConfigError("a seed is required");
        if (c.trials && *c.trials == 0)
            throw ConfigError("trials must be at least 1");

        auto set = [](auto& opt, auto value) {
            if (!opt)
                opt = value;
        };
        if (c.command == "gen") {
            set(c.n, 20u), set(c.k, 3u), set(c.L, 3u), set(c.epsilon, 0.25), set(c.trials, 1u);
        } else if (c.command == "noiseless") {
            set(c.n, 40u), set(c.k, 4u), set(c.L, 3u), set(c.epsilon, 0.25), set(c.trials, 1u);
            if (c.sigma && *c.sigma != 0.0)
                throw ConfigError("noiseless: sigma must be 0");
            c.sigma = 0.0;
            set(c.min_success, std::max(0.0, 1.0 - 3.0 / static_cast<double>(*c.k)));
        } else if (c.command == "noisy2") {
            set(c.n, 64u), set(c.k, 4u), set(c.L, 2u), set(c.sigma, 0.25), set(c.epsilon, 0.5), set(c.trials, 1u);
            set(c.estimator, Estimator::automatic), set(c.min_success, 0.9);
            if (*c.L != 2)
                throw ConfigError("noisy2: L must be 2");
        } else if (c.command == "noisyL") {
            set(c.n, 48u), set(c.k, 3u), set(c.L, 3u), set(c.sigma, 0.25), set(c.epsilon, 0.5), set(c.trials, 1u);
            set(c.estimator, Estimator::automatic), set(c.min_success, 0.8);
            if (*c.L < 2)
                throw ConfigError("noisyL: L must be at least 2");
        } else if (c.command == "gmm-bench") {
            set(c.n, 64u), set(c.k, 1u), set(c.L, 3u), set(c.sigma, 0.5), set(c.epsilon, 1.0), set(c.trials, 100u);
            set(c.estimator, Estimator::min_distance), set(c.min_success, 0.95);
            if (c.ratios.empty()) {
                if (c.sweep)
                    c.ratios = {0.5, 1.0, 1.5, 2.0};
                else
                    c.ratios = {*c.sigma / *c.epsilon};
            }
            if (c.sweep && c.T.empty())
                for (int j = 0; j <= 16; ++j)
                    c.T.push_back(static_cast<std::size_t>(std::llround(16.0 * std::pow(2.0, j / 2.0))));
            if (c.mean_range < 0)
                throw ConfigError("gmm-bench: mean_range must be non-negative");
            for (double r : c.ratios)
                if (!(r > 0.0))
                    throw ConfigError("gmm-bench: ratios must be positive");
        } else if (c.command == "rip-check") {
            set(c.n, 24u), set(c.k, 2u), set(c.trials, 50u), set(c.min_success, 0.9);
            set(c.L, 1u), set(c.epsilon, 1.0);
            const double lnk = std::log(static_cast<double>(*c.n) / static_cast<double>(*c.k));
            set(c.m, static_cast<std::size_t>(std::ceil(c.c_s * static_cast<double>(*c.k) * std::max(lnk, 1.0))));
            if (*c.m == 0)
                throw ConfigError("rip-check: m must be at least 1");
        } else if (c.command == "lowerbound") {
            set(c.n, 1u), set(c.L, 3u), set(c.k, 10u), set(c.trials, 10000u), set(c.epsilon, 1.0);
        }
        set(c.sigma, 0.0);
        if (*c.n < 1 || *c.k < 1 || (*c.k > *c.n && c.command != "lowerbound"))
            throw ConfigError("need 1 <= k <= n");
        if (*c.L < 1)
            throw ConfigError("need L >= 1");
        if (*c.sigma < 0.0 || !(*c.epsilon > 0.0))
            throw ConfigError("need sigma >= 0 and epsilon > 0");
        if (!(c.amp > 0.0) || c.threads < 1 || !(c.multiplier > 0.0))
            throw ConfigError("amp, threads and multiplier must be positive");
        if (c.c2 && !(*c.c2 > 0.0))
            throw ConfigError("c2 must be positive");
        return c;
    }

    namespace
    {
        std::string num(double x)
        {
            if (std::isnan(x))
                return "nan";
            if (std::isinf(x))
                return x > 0 ? "inf" : "-inf";
            std::ostringstream os;
            os << std::setprecision(10) << x;
            return os.str();
        }

        std::string join(const std::vector<std::string>& parts, char sep)
        {
            std::string s;
            for (std::size_t i = 0; i < parts.size(); ++i) {
                if (i)
                    s += sep;
                s += parts[i];
            }
            return s;
        }

        struct TrialRow
        {
            std::string line;
            bool success = false;
            double queries = 0.0;
            double snr = 0.0;
            double metric = 0.0; // plotted per trial
            std::string trace;
        };

        using Clock = std::chrono::steady_clock;

        double elapsed_ms(Clock::time_point t0)
        {
            return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
        }

        template <typename Scalar>
        void attach_trace(Oracle<Scalar>& oracle, std::string& sink, std::size_t trial)
        {
            oracle.set_trace([&sink, trial](std::size_t idx, const QueryDesign& d, const Scalar& y) {
                double v;
                if constexpr (std::is_same_v<Scalar, Rational>)
                    v = to_double(y);
                else
                    v = y;
                std::ostringstream os;
                os << trial << ',' << idx << ',' << to_string(d.kind) << ',' << std::setprecision(17) << v << '\n';
                sink += os.str();
            });
        }

        double max_abs_error(const SignalSet& truth, const RecoveryReport& r)
        {
            double e = 0.0;
            for (std::size_t i = 0; i < truth.L(); ++i)
                e = std::max(e, (truth[i] - r.estimates[r.matching[i]]).cwiseAbs().maxCoeff());
            return e;
        }

        template <typename Scalar>
        TrialRow noiseless_trial(const ExperimentConfig& c, std::size_t trial)
        {
            const std::uint64_t s = derive_seed(*c.seed, trial);
            const SignalSet set = generate_signal_set(*c.n, *c.k, *c.L, c.epsilon, c.amp, derive_seed(s, 0));
            Oracle<Scalar> oracle(set, 0.0, derive_seed(s, 1));
            TrialRow row;
            if (!c.trace.empty())
                attach_trace(oracle, row.trace, trial);
            Rng rng(derive_seed(s, 2));
            double err = std::numeric_limits<double>::quiet_NaN();
            try {
                const RecoveryReport rep = recover_noiseless(oracle, *c.n, *c.k, *c.L, rng, {c.multiplier, 0.0});
                row.success = rep.all_exact();
                err = max_abs_error(set, rep);
            } catch (const NoiselessError&) {
                row.success = false;
            }
            row.queries = static_cast<double>(oracle.query_count());
            row.metric = row.success ? 1.0 : 0.0;
            std::ostringstream os;
            os << s << ',' << *c.n << ',' << *c.k << ',' << *c.L << ',' << oracle.query_count() << ','
               << (row.success ? 1 : 0) << ',' << num(err);
            row.line = os.str();
            return row;
        }

        TrialRow noisy_trial(const ExperimentConfig& c, std::size_t trial)
        {
            const auto t0 = Clock::now();
            const std::uint64_t s = derive_seed(*c.seed, trial);
            const SignalSet set = generate_signal_set(*c.n, *c.k, *c.L, c.epsilon, c.amp, derive_seed(s, 0));
            Oracle<double> oracle(set, *c.sigma, derive_seed(s, 1));
            TrialRow row;
            if (!c.trace.empty())
                attach_trace(oracle, row.trace, trial);
            NoisyRunConfig cfg;
            cfg.n = *c.n;
            cfg.k = *c.k;
            cfg.L = *c.L;
            cfg.sigma = *c.sigma;
            cfg.epsilon = *c.epsilon;
            cfg.c_s = c.c_s;
            cfg.c2 = c.c2;
            cfg.delta = c.delta;
            cfg.alpha_override = c.alpha;
            cfg.estimator = *c.estimator;
            cfg.seed = derive_seed(s, 2);
            const bool two = c.command == "noisy2";
            const Schedule sched = two ? noisy_L2_schedule(cfg) : noisy_generalL_schedule(cfg);

            std::vector<std::string> ok(*c.L, "0"), ratio(*c.L, "nan");
            try {
                const NoisyRun run = two ? recover_noisy_L2(oracle, cfg) : recover_noisy_generalL(oracle, cfg);
                for (std::size_t l = 0; l < *c.L; ++l) {
                    ok[l] = run.report.exact[l] ? "1" : "0";
                    ratio[l] = num(run.report.per_signal_l1_ratio[l]);
                }
                row.success = run.report.all_exact();
            } catch (const std::runtime_error&) {
                row.success = false;
            }
            row.queries = static_cast<double>(oracle.query_count());
            row.snr = oracle.reported_snr();
            row.metric = row.queries;
            std::ostringstream os;
            os << s << ',' << *c.n << ',' << *c.k << ',' << *c.L << ',' << num(*c.sigma) << ',' << num(*c.epsilon)
               << ',' << sched.batch_size << ',' << oracle.query_count() << ',' << num(row.snr) << ','
               << join(ok, ';') << ',' << join(ratio, ';') << ',' << (c.timing ? num(elapsed_ms(t0)) : "NA");
            row.line = os.str();
            return row;
        }

        TrialRow rip_trial(const ExperimentConfig& c, std::size_t trial)
        {
            const std::uint64_t s = derive_seed(*c.seed, trial);
            Rng rng(s);
            const SensingSystem sys = sample_pm1(static_cast<Eigen::Index>(*c.m), static_cast<Eigen::Index>(*c.n), rng);
            const double d = empirical_rip_delta(sys, static_cast<Eigen::Index>(*c.k));
            TrialRow row;
            row.success = d < std::sqrt(2.0) - 1.0;
            row.metric = d;
            row.line = std::to_string(s) + ',' + num(d);
            return row;
        }

        std::string svg_lines(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                              const std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>>& series)
        {
            double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
            for (const auto& [name, pts] : series)
                for (const auto& [x, y] : pts) {
                    if (!std::isfinite(x) || !std::isfinite(y))
                        continue;
                    x0 = std::min(x0, x), x1 = std::max(x1, x), y0 = std::min(y0, y), y1 = std::max(y1, y);
                }
            if (!std::isfinite(x0)) {
                x0 = y0 = 0.0;
                x1 = y1 = 1.0;
            }
            if (x1 == x0)
                x1 = x0 + 1.0;
            if (y1 == y0)
                y1 = y0 + 1.0;
            const double W = 640, H = 400, pad = 50;
            auto px = [&](double x) { return pad + (x - x0) / (x1 - x0) * (W - 2 * pad); };
            auto py = [&](double y) { return H - pad - (y - y0) / (y1 - y0) * (H - 2 * pad); };
            static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
            std::ostringstream os;
            os << std::setprecision(6);
            os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
            os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
            os << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\">" << title << "</text>\n";
            os << "<line x1=\"" << pad << "\" y1=\"" << H - pad << "\" x2=\"" << W - pad << "\" y2=\"" << H - pad
               << "\" stroke=\"black\"/>\n";
            os << "<line x1=\"" << pad << "\" y1=\"" << pad << "\" x2=\"" << pad << "\" y2=\"" << H - pad
               << "\" stroke=\"black\"/>\n";
            os << "<text x=\"" << W / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\">" << xlabel << " ["
               << x0 << ", " << x1 << "]</text>\n";
            os << "<text x=\"12\" y=\"" << H / 2 << "\" transform=\"rotate(-90 12 " << H / 2
               << ")\" text-anchor=\"middle\">" << ylabel << " [" << y0 << ", " << y1 << "]</text>\n";
            for (std::size_t i = 0; i < series.size(); ++i) {
                const char* col = colors[i % 6];
                os << "<polyline fill=\"none\" stroke=\"" << col << "\" points=\"";
                for (const auto& [x, y] : series[i].second)
                    if (std::isfinite(x) && std::isfinite(y))
                        os << px(x) << ',' << py(y) << ' ';
                os << "\"/>\n";
                for (const auto& [x, y] : series[i].second)
                    if (std::isfinite(x) && std::isfinite(y))
                        os << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"3\" fill=\"" << col
                           << "\"/>\n";
                os << "<text x=\"" << W - pad << "\" y=\"" << pad + 16.0 * static_cast<double>(i)
                   << "\" text-anchor=\"end\" fill=\"" << col << "\">" << series[i].first << "</text>\n";
            }
            os << "</svg>\n";
            return os.str();
        }

        ExperimentResult run_trials(const ExperimentConfig& c, const std::string& header,
                                    const std::function<TrialRow(std::size_t)>& fn, const std::string& metric_name)
        {
            ExperimentResult res;
            const auto rows = parallel_map<TrialRow>(*c.trials, c.threads, fn);
            std::ostringstream csv;
            csv << header << '\n';
            std::size_t ok = 0;
            double q = 0.0, snr = 0.0;
            std::vector<std::pair<double, double>> pts;
            for (std::size_t i = 0; i < rows.size(); ++i) {
                csv << rows[i].line << '\n';
                ok += rows[i].success ? 1 : 0;
                q += rows[i].queries;
                snr += rows[i].snr;
                res.trace_csv += rows[i].trace;
                pts.emplace_back(static_cast<double>(i), rows[i].metric);
            }
            if (!c.trace.empty())
                res.trace_csv = "trial,query_index,design_kind,response\n" + res.trace_csv;
            res.csv = csv.str();
            auto& s = res.summary;
            s.trials = rows.size();
            s.success_rate = static_cast<double>(ok) / static_cast<double>(rows.size());
            s.mean_queries = q / static_cast<double>(rows.size());
            s.mean_snr = snr / static_cast<double>(rows.size());
            s.threshold = c.min_success.value_or(0.0);
            s.passed = s.success_rate >= s.threshold;
            res.svg = svg_lines(c.command, "trial", metric_name, {{metric_name, pts}});
            return res;
        }

        ExperimentResult run_gmm_bench(const ExperimentConfig& c)
        {
            ExperimentResult res;
            std::ostringstream csv;
            csv << "sigma_over_eps,T,trials,exact_rate,estimator\n";
            const double eps = *c.epsilon;
            const std::size_t L = *c.L;
            std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>> series;
            std::vector<double> fit_x, fit_y;
            bool all_reached = true;
            double total_rate = 0.0;
            std::size_t cells = 0;
            for (std::size_t ri = 0; ri < c.ratios.size(); ++ri) {
                const double ratio = c.ratios[ri];
                const double sigma = ratio * eps;
                std::vector<std::size_t> Ts = c.T;
                if (Ts.empty())
                    Ts = {required_batch_size(sigma, eps, L, static_cast<double>(*c.n), c.gmm_c)};
                std::vector<std::pair<double, double>> pts;
                std::optional<std::size_t> reached;
                for (std::size_t ti = 0; ti < Ts.size(); ++ti) {
                    const std::size_t T = Ts[ti];
                    const std::uint64_t cell = derive_seed(derive_seed(*c.seed, ri), ti);
                    const auto hits = parallel_map<int>(*c.trials, c.threads, [&](std::size_t trial) {
                        Rng rng(derive_seed(cell, trial));
                        std::vector<std::int64_t> mu(L);
                        for (auto& m : mu)
                            m = rng.between(-c.mean_range, c.mean_range);
                        std::sort(mu.begin(), mu.end());
                        std::vector<double> x(T);
                        for (auto& v : x)
                            v = static_cast<double>(mu[rng.below(L)]) * eps + sigma * rng.normal();
                        try {
                            return estimate_means(x, L, sigma, eps, *c.estimator, rng).units == mu ? 1 : 0;
                        } catch (const DenoiseFailure&) {
                            return 0;
                        }
                    });
                    const double rate = static_cast<double>(std::accumulate(hits.begin(), hits.end(), 0)) /
                                        static_cast<double>(*c.trials);
                    csv << num(ratio) << ',' << T << ',' << *c.trials << ',' << num(rate) << ','
                        << to_string(*c.estimator) << '\n';
                    pts.emplace_back(std::log(static_cast<double>(T)), rate);
                    total_rate += rate;
                    ++cells;
                    if (rate >= *c.min_success) {
                        reached = T;
                        if (c.sweep)
                            break;
                    }
                }
                series.emplace_back("s/e=" + num(ratio), pts);
                if (reached) {
                    fit_x.push_back(std::pow(ratio, 2.0 / 3.0));
                    fit_y.push_back(std::log(static_cast<double>(*reached)));
                    res.summary.extra.emplace_back("min_T[" + num(ratio) + "]", std::to_string(*reached));
                } else {
                    all_reached = false;
                    res.summary.extra.emplace_back("min_T[" + num(ratio) + "]", "none");
                }
            }
            if (fit_x.size() >= 2)
                res.summary.extra.emplace_back("fit_r2", num(linear_fit_r2(fit_x, fit_y)));
            res.csv = csv.str();
            res.summary.trials = *c.trials;
            res.summary.success_rate = cells ? total_rate / static_cast<double>(cells) : 0.0;
            res.summary.threshold = *c.min_success;
            res.summary.passed = all_reached;
            res.svg = svg_lines("gmm-bench", "ln T", "exact rate", series);
            return res;
        }

        ExperimentResult run_lowerbound(const ExperimentConfig& c)
        {
            ExperimentResult res;
            Rng rng(*c.seed);
            const LowerBoundStats st = lowerbound_sim(*c.L, *c.k, *c.trials, rng);
            std::ostringstream csv;
            csv << "trial,queries\n";
            std::map<std::size_t, std::size_t> hist;
            for (std::size_t i = 0; i < st.samples.size(); ++i) {
                csv << i << ',' << st.samples[i] << '\n';
                ++hist[st.samples[i]];
            }
            res.csv = csv.str();
            const double L = static_cast<double>(*c.L), k = static_cast<double>(*c.k);
            const double mean_ref = 2.0 * L * k, var_ref = 2.0 * k * (L * L - L);
            const double mean_err = std::abs(st.mean - mean_ref) / mean_ref;
            const bool var_ok = var_ref == 0.0 ? st.variance == 0.0 : std::abs(st.variance - var_ref) / var_ref <= 0.15;
            auto& s = res.summary;
            s.trials = *c.trials;
            s.mean_queries = st.mean;
            s.success_rate = 1.0;
            s.passed = mean_err <= 0.05 && var_ok;
            s.extra = {{"mean", num(st.mean)}, {"expected_mean", num(mean_ref)}, {"variance", num(st.variance)},
                       {"expected_variance", num(var_ref)}};
            std::vector<std::pair<double, double>> pts;
            for (const auto& [x, n] : hist)
                pts.emplace_back(static_cast<double>(x), static_cast<double>(n));
            res.svg = svg_lines("lowerbound", "queries", "count", {{"X", pts}});
            return res;
        }
    } // namespace

    ExperimentResult run_experiment(const ExperimentConfig& config)
    {
        const ExperimentConfig c = config.resolve();
        const auto t0 = Clock::now();
        ExperimentResult res;
        if (c.command == "gen") {
            const SignalSet set = generate_signal_set(*c.n, *c.k, *c.L, c.epsilon, c.amp, *c.seed);
            std::ostringstream os;
            write_signal_set(os, set);
            res.csv = os.str();
            res.summary.trials = 1;
            res.summary.success_rate = 1.0;
            res.summary.passed = true;
        } else if (c.command == "noiseless") {
            std::function<TrialRow(std::size_t)> fn;
            if (c.exact_arithmetic)
                fn = [&](std::size_t i) { return noiseless_trial<Rational>(c, i); };
            else
                fn = [&](std::size_t i) { return noiseless_trial<double>(c, i); };
            res = run_trials(c, "seed,n,k,L,queries,success,max_abs_error", fn, "success");
            res.summary.extra.emplace_back("expected_queries",
                                           std::to_string(2 * *c.k * noiseless_batch_size(*c.k, *c.L, c.multiplier)));
        } else if (c.command == "noisy2" || c.command == "noisyL") {
            res = run_trials(c,
                             "seed,n,k,L,sigma,epsilon,T,queries,snr,success_per_component,"
                             "l1_ratio_per_component,wall_time_ms",
                             [&](std::size_t i) { return noisy_trial(c, i); }, "queries");
        } else if (c.command == "rip-check") {
            res = run_trials(c, "seed,delta_hat", [&](std::size_t i) { return rip_trial(c, i); }, "delta_hat");
            res.summary.extra.emplace_back("m", std::to_string(*c.m));
        } else if (c.command == "gmm-bench") {
            res = run_gmm_bench(c);
        } else {
            res = run_lowerbound(c);
        }
        res.summary.runtime_s = std::chrono::duration<double>(Clock::now() - t0).count();
        return res;
    }

    namespace
    {
        void write_file(const std::string& path, const std::string& text)
        {
            std::ofstream f(path, std::ios::binary);
            if (!f)
                throw std::runtime_error("cannot open " + path + " for writing");
            f << text;
            if (!f)
                throw std::runtime_error("write to " + path + " failed");
        }
    } // namespace

    int run_and_write(const ExperimentConfig& config, std::ostream& out, std::ostream& log)
    {
        const ExperimentResult res = run_experiment(config);
        if (config.out.empty() || config.out == "-")
            out << res.csv;
        else
            write_file(config.out, res.csv);
        if (!config.trace.empty())
            write_file(config.trace, res.trace_csv);
        if (!config.plot.empty())
            write_file(config.plot, res.svg);

        const auto& s = res.summary;
        std::ostringstream sum;
        sum << "command=" << config.command << '\n'
            << "trials=" << s.trials << '\n'
            << "success_rate=" << num(s.success_rate) << '\n'
            << "mean_queries=" << num(s.mean_queries) << '\n'
            << "mean_snr=" << num(s.mean_snr) << '\n'
            << "runtime_s=" << num(s.runtime_s) << '\n';
        for (const auto& [k, v] : s.extra)
            sum << k << '=' << v << '\n';
        sum << "threshold=" << num(s.threshold) << '\n' << "passed=" << (s.passed ? "yes" : "no") << '\n';
        log << sum.str();
        if (!config.summary.empty())
            write_file(config.summary, sum.str());
        return s.passed ? 0 : 1;
    }

    LowerBoundStats lowerbound_sim(std::size_t L, std::size_t k, std::size_t trials, Rng& rng)
    {
        if (L < 1 || k < 1 || trials < 1)
            throw std::invalid_argument("lowerbound_sim: need L, k, trials >= 1");
        LowerBoundStats st;
        st.samples.reserve(trials);
        for (std::size_t t = 0; t < trials; ++t) {
            std::size_t draws = 0, hits = 0;
            while (hits < 2 * k) {
                ++draws;
                if (rng.below(L) == 0)
                    ++hits;
            }
            st.samples.push_back(draws);
        }
        double sum = 0.0;
        for (auto x : st.samples)
            sum += static_cast<double>(x);
        st.mean = sum / static_cast<double>(trials);
        double ss = 0.0;
        for (auto x : st.samples)
            ss += (static_cast<double>(x) - st.mean) * (static_cast<double>(x) - st.mean);
        st.variance = trials > 1 ? ss / static_cast<double>(trials - 1) : 0.0;
        return st;
    }

    double linear_fit_r2(const std::vector<double>& x, const std::vector<double>& y)
    {
        if (x.size() != y.size() || x.size() < 2)
            throw std::invalid_argument("linear_fit_r2: need at least two paired points");
        const Eigen::Map<const Eigen::VectorXd> X(x.data(), static_cast<Eigen::Index>(x.size()));
        const Eigen::Map<const Eigen::VectorXd> Y(y.data(), static_cast<Eigen::Index>(y.size()));
        const Eigen::VectorXd xc = X.array() - X.mean();
        const Eigen::VectorXd yc = Y.array() - Y.mean();
        const double sxx = xc.squaredNorm(), syy = yc.squaredNorm(), sxy = xc.dot(yc);
        if (syy == 0.0)
            return 1.0;
        if (sxx == 0.0)
            return 0.0;
        return sxy * sxy / (sxx * syy);
    }
} // namespace mslr
