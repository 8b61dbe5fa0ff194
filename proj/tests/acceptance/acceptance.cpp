// Acceptance runs. One PASS/FAIL line per criterion; exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "mslr/align.hpp"
#include "mslr/cs.hpp"
#include "mslr/experiment.hpp"
#include "mslr/gridgmm.hpp"
#include "mslr/pipeline.hpp"

using namespace mslr;

namespace
{
    using Clock = std::chrono::steady_clock;

    struct Outcome
    {
        bool pass = false;
        std::string detail;
        // every table the criterion produced, compared on the rerun
        std::string csv;
    };

    std::string fmt(double x)
    {
        std::ostringstream os;
        os.precision(6);
        os << x;
        return os.str();
    }

    std::string extra(const ExperimentSummary& s, const std::string& key)
    {
        for (const auto& [k, v] : s.extra)
            if (k == key)
                return v;
        return "";
    }

    std::vector<std::vector<std::string>> rows(const std::string& csv)
    {
        std::vector<std::vector<std::string>> out;
        std::istringstream is(csv);
        std::string line;
        std::getline(is, line);
        while (std::getline(is, line)) {
            std::vector<std::string> cells;
            std::istringstream ls(line);
            std::string cell;
            while (std::getline(ls, cell, ','))
                cells.push_back(cell);
            out.push_back(cells);
        }
        return out;
    }

    ExperimentConfig base(const std::string& command, std::uint64_t seed)
    {
        ExperimentConfig c;
        c.command = command;
        c.seed = seed;
        return c;
    }

    Outcome noiseless_exact()
    {
        ExperimentConfig c = base("noiseless", 101);
        c.n = 40, c.k = 4, c.L = 3, c.trials = 200;
        const ExperimentResult r = run_experiment(c);
        const std::size_t per = 2 * 4 * static_cast<std::size_t>(std::ceil(3 * std::log(3.0 * 16)));
        bool counts = true;
        for (const auto& row : rows(r.csv))
            counts &= std::stoul(row[4]) == per;
        const double fail = 1 - r.summary.success_rate;
        Outcome o;
        o.pass = counts && fail <= 0.75 && r.summary.success_rate >= 0.90 && r.summary.runtime_s <= 120;
        o.detail = "success=" + fmt(r.summary.success_rate) + " (bound failure<=0.75, target success>=0.90)" +
                   " queries/trial=" + std::to_string(per) + (counts ? " exact" : " MISMATCH") +
                   " runtime=" + fmt(r.summary.runtime_s) + "s";
        o.csv = r.csv;
        return o;
    }

    Outcome lower_bound()
    {
        ExperimentConfig c = base("lowerbound", 102);
        c.L = 3, c.k = 10, c.trials = 10000;
        const ExperimentResult r = run_experiment(c);
        Outcome o;
        o.pass = r.summary.passed && r.summary.runtime_s <= 10;
        o.detail = "mean=" + extra(r.summary, "mean") + " (60) variance=" + extra(r.summary, "variance") +
                   " (120) runtime=" + fmt(r.summary.runtime_s) + "s";
        o.csv = r.csv;
        return o;
    }

    Outcome gmm_exact()
    {
        ExperimentConfig c = base("gmm-bench", 103);
        c.L = 3, c.epsilon = 1.0, c.sigma = 0.5, c.mean_range = 5, c.gmm_c = 4, c.trials = 100;
        const ExperimentResult r = run_experiment(c);
        Outcome o;
        o.pass = r.summary.success_rate >= 0.95 && r.summary.runtime_s <= 120;
        o.detail = "exact_rate=" + fmt(r.summary.success_rate) + " T=" + rows(r.csv).at(0).at(1) +
                   " runtime=" + fmt(r.summary.runtime_s) + "s";
        o.csv = r.csv;
        return o;
    }

    Outcome estimator_agreement()
    {
        Rng rng(104);
        int agree = 0, biggest = 0;
        std::ostringstream log, csv;
        csv << "instance,window,min_distance,brute_likelihood\n";
        for (int i = 0; i < 50; ++i) {
            const double eps = 1.0, sigma = 0.4;
            std::vector<std::int64_t> mu = {rng.between(-1, 1), rng.between(-1, 1)};
            std::sort(mu.begin(), mu.end());
            std::vector<double> x(200);
            for (auto& v : x)
                v = static_cast<double>(mu[rng.below(2)]) * eps + sigma * rng.normal();
            const CandidateWindow w = make_window(x, sigma, eps);
            biggest = std::max(biggest, static_cast<int>(w.size()));
            const GridMixture a = min_distance_estimate(x, 2, sigma, eps, w);
            const GridMixture b = brute_likelihood_estimate(x, 2, sigma, eps, w);
            csv << i << ',' << w.size() << ',' << a.units[0] << ';' << a.units[1] << ',' << b.units[0] << ';'
                << b.units[1] << '\n';
            if (a.units == b.units)
                ++agree;
            else
                log << "  disagreement at instance " << i << ": min_distance {" << a.units[0] << "," << a.units[1]
                    << "} brute {" << b.units[0] << "," << b.units[1] << "} truth {" << mu[0] << "," << mu[1]
                    << "}\n";
        }
        Outcome o;
        o.pass = agree >= 48 && biggest <= 11;
        o.detail = "agree=" + std::to_string(agree) + "/50 largest window=" + std::to_string(biggest);
        if (!log.str().empty())
            o.detail += "\n" + log.str().substr(0, log.str().size() - 1);
        o.csv = csv.str();
        return o;
    }

    Outcome sample_law()
    {
        ExperimentConfig c = base("gmm-bench", 105);
        c.L = 2, c.epsilon = 1.0, c.mean_range = 3, c.trials = 100, c.sweep = true;
        const ExperimentResult r = run_experiment(c);
        const std::string r2 = extra(r.summary, "fit_r2");
        Outcome o;
        o.pass = r.summary.passed && !r2.empty() && std::stod(r2) >= 0.9 && r.summary.runtime_s <= 600;
        o.detail = "min_T";
        for (const char* k : {"0.5", "1", "1.5", "2"})
            o.detail += std::string(" ") + k + ":" + extra(r.summary, std::string("min_T[") + k + "]");
        o.detail += " fit_r2=" + r2 + " runtime=" + fmt(r.summary.runtime_s) + "s";
        o.csv = r.csv;
        return o;
    }

    // Same seed derivation as the noisy trials in run_experiment.
    struct Replay
    {
        SignalSet set;
        NoisyRunConfig cfg;
        std::uint64_t oracle_seed;
    };

    Replay replay(const ExperimentConfig& raw, std::size_t trial)
    {
        const ExperimentConfig c = raw.resolve();
        const std::uint64_t s = derive_seed(*c.seed, trial);
        NoisyRunConfig cfg;
        cfg.n = *c.n, cfg.k = *c.k, cfg.L = *c.L, cfg.sigma = *c.sigma, cfg.epsilon = *c.epsilon;
        cfg.c_s = c.c_s, cfg.c2 = c.c2, cfg.delta = c.delta, cfg.alpha_override = c.alpha;
        cfg.estimator = *c.estimator;
        cfg.seed = derive_seed(s, 2);
        return {generate_signal_set(*c.n, *c.k, *c.L, c.epsilon, c.amp, derive_seed(s, 0)), cfg, derive_seed(s, 1)};
    }

    Outcome noisy_two()
    {
        ExperimentConfig c = base("noisy2", 106);
        c.n = 64, c.k = 4, c.L = 2, c.epsilon = 0.5, c.sigma = 0.25, c.trials = 20;
        const ExperimentResult r = run_experiment(c);
        const auto rs = rows(r.csv);
        bool snr_ok = true, count_ok = true;
        double worst_snr = 0;
        for (std::size_t i = 0; i < rs.size(); ++i) {
            const Replay rp = replay(c, i);
            const double want = std::min(rp.set[0].squaredNorm(), rp.set[1].squaredNorm()) / (0.25 * 0.25);
            const double rel = std::abs(std::stod(rs[i][8]) - want) / want;
            worst_snr = std::max(worst_snr, rel);
            snr_ok &= rel <= 0.10;
            count_ok &= std::stoul(rs[i][7]) == noisy_L2_schedule(rp.cfg).queries;
        }
        Outcome o;
        o.pass = r.summary.success_rate >= 0.90 && snr_ok && count_ok && r.summary.runtime_s <= 600;
        o.detail = "exact=" + fmt(r.summary.success_rate) + " snr_rel_err<=" + fmt(worst_snr) +
                   " query_count " + (count_ok ? "matches schedule" : "MISMATCH") +
                   " runtime=" + fmt(r.summary.runtime_s) + "s";
        o.csv = r.csv;
        return o;
    }

    Outcome noisy_general()
    {
        ExperimentConfig c = base("noisyL", 107);
        c.n = 48, c.k = 3, c.L = 3, c.epsilon = 0.5, c.sigma = 0.25, c.alpha = 4.0, c.trials = 10;
        const ExperimentResult r = run_experiment(c);
        const auto rs = rows(r.csv);
        bool pure = true;
        int checked = 0;
        for (std::size_t i = 0; i < rs.size(); ++i) {
            if (rs[i][9] != "1;1;1")
                continue;
            const Replay rp = replay(c, i);
            Oracle<double> oracle(rp.set, rp.cfg.sigma, rp.oracle_seed);
            const NoisyRun run = recover_noisy_generalL(oracle, rp.cfg);
            for (double p : cluster_purity(run.system, rp.set))
                pure &= p == 1.0;
            ++checked;
        }
        Outcome o;
        o.pass = r.summary.success_rate >= 0.80 && pure && r.summary.runtime_s <= 1200;
        o.detail = "exact=" + fmt(r.summary.success_rate) + " purity " + (pure ? "1" : "<1") + " on " +
                   std::to_string(checked) + " successful trials runtime=" + fmt(r.summary.runtime_s) + "s";
        o.csv = r.csv;
        return o;
    }

    Outcome alignment_rates()
    {
        std::ifstream f(MSLR_FIXTURES "/signals_n20_k3_L3.txt");
        const SignalSet set = read_signal_set(f);
        const double eps = *set.epsilon();
        const AlignConstants k = compute_constants(0.4, set.L(), 4.0);
        const Eigen::Index n = static_cast<Eigen::Index>(set.n());
        Rng rng(108);

        auto units = [&](const Eigen::VectorXd& x) {
            std::vector<std::int64_t> u;
            for (const auto& b : set.vectors())
                u.push_back(std::llround(x.dot(b) / eps));
            return u;
        };
        auto mixture = [&](std::vector<std::int64_t> u) {
            std::sort(u.begin(), u.end());
            return GridMixture{u.size(), 0.0, eps, u};
        };
        struct Draw
        {
            TripletRecord t;
            std::vector<std::int64_t> r_units;
            bool good;
        };
        auto draw = [&]() {
            Draw d;
            d.t.v.resize(n);
            d.t.r.resize(n);
            for (Eigen::Index i = 0; i < n; ++i) {
                d.t.v(i) = rng.sign();
                d.t.r(i) = static_cast<double>(rng.between(-2 * k.z_star, 2 * k.z_star));
            }
            d.t.q = rng.between(2, 4 * k.z_star + 1);
            const double q = static_cast<double>(d.t.q);
            const auto A = units(d.t.v + d.t.r), B = units((q - 1) * d.t.r), C = units(d.t.v + q * d.t.r);
            d.t.a = mixture(A), d.t.b = mixture(B), d.t.c = mixture(C);
            d.r_units = units(d.t.r);
            std::vector<double> a(A.begin(), A.end()), b(B.begin(), B.end()), c(C.begin(), C.end());
            d.good = is_good_triplet(a, b, c, 0.5);
            return d;
        };

        const int N = 2000;
        int good = 0;
        std::ostringstream csv;
        csv << "draw,good,matching_good\n";
        Draw ref = draw();
        while (!ref.good)
            ref = draw();
        int matching = 0;
        for (int i = 0; i < N; ++i) {
            const Draw d = draw();
            good += d.good;
            bool ok = false;
            if (d.good) {
                std::vector<std::int64_t> cross(set.L());
                for (std::size_t l = 0; l < set.L(); ++l)
                    cross[l] = d.r_units[l] + ref.r_units[l];
                try {
                    const auto lab = label_with_reference(ref.t, d.t, mixture(cross));
                    // labels must pair each component with itself
                    ok = true;
                    for (const auto& m : lab) {
                        const auto it = std::find(ref.r_units.begin(), ref.r_units.end(), m.label);
                        const std::size_t l = static_cast<std::size_t>(it - ref.r_units.begin());
                        ok &= std::llround(d.t.v.dot(set[l]) / eps) == m.value;
                    }
                } catch (const AlignError&) {
                    ok = false;
                }
            }
            matching += ok;
            csv << i << ',' << d.good << ',' << ok << '\n';
        }
        const double p0 = 1 / std::sqrt(k.alpha_star);
        const double se = std::sqrt(p0 * (1 - p0) / N);
        const double g = static_cast<double>(good) / N, m = static_cast<double>(matching) / N;
        Outcome o;
        o.pass = g >= p0 - 3 * se && m >= p0 - 3 * se;
        o.detail = "z*=" + std::to_string(k.z_star) + " good=" + fmt(g) + " matching_good=" + fmt(m) +
                   " floor=" + fmt(p0 - 3 * se);
        o.csv = csv.str();
        return o;
    }

    Outcome rip_and_bp()
    {
        // (a)
        ExperimentConfig c = base("rip-check", 109);
        c.n = 24, c.k = 2, c.trials = 50;
        const ExperimentResult a = run_experiment(c);

        // (b)
        std::ostringstream csv;
        csv << "seed,max_abs_error\n";
        int exact = 0;
        for (std::uint64_t s = 0; s < 100; ++s) {
            Rng r(derive_seed(110, s));
            const SensingSystem sys = sample_pm1(32, 128, r);
            Eigen::VectorXd b = Eigen::VectorXd::Zero(128);
            for (int placed = 0; placed < 4;) {
                const auto i = static_cast<Eigen::Index>(r.below(128));
                if (b(i) == 0.0) {
                    b(i) = r.sign() * (1 + r.uniform());
                    ++placed;
                }
            }
            const BasisPursuitResult res = basis_pursuit(sys, sys.normalized() * b);
            const double err = (res.beta - b).cwiseAbs().maxCoeff();
            exact += err <= 1e-6;
            csv << s << ',' << fmt(err) << '\n';
        }

        // (c) k-sparse head plus a small Gaussian tail, noiseless measurements
        csv << "seed,l1_ratio\n";
        double worst = 0;
        for (std::uint64_t s = 0; s < 30; ++s) {
            Rng r(derive_seed(111, s));
            const SensingSystem sys = sample_pm1(64, 128, r);
            Eigen::VectorXd b(128);
            for (Eigen::Index i = 0; i < 128; ++i)
                b(i) = 0.01 * r.normal();
            for (int i = 0; i < 4; ++i)
                b(static_cast<Eigen::Index>(r.below(128))) = r.sign() * (1 + r.uniform());
            const BasisPursuitResult res = basis_pursuit(sys, sys.normalized() * b);
            const double ratio = (b - res.beta).lpNorm<1>() / (b - best_k_approx(b, 4)).lpNorm<1>();
            worst = std::max(worst, ratio);
            csv << s << ',' << fmt(ratio) << '\n';
        }

        const bool pa = a.summary.success_rate >= 0.9, pb = exact >= 95, pc = worst <= 10;
        Outcome o;
        o.pass = pa && pb && pc;
        o.detail = std::string("(a) m=") + extra(a.summary, "m") + " delta<sqrt2-1 in " +
                   fmt(a.summary.success_rate) + (pa ? " ok" : " FAIL") + "; (b) exact " + std::to_string(exact) +
                   "/100" + (pb ? " ok" : " FAIL") + "; (c) worst l1 ratio " + fmt(worst) + (pc ? " ok" : " FAIL");
        o.csv = a.csv + csv.str();
        return o;
    }
} // namespace

int main()
{
    const std::vector<std::pair<int, std::function<Outcome()>>> criteria = {
        {1, noiseless_exact}, {2, lower_bound},  {3, gmm_exact},       {4, estimator_agreement},
        {5, sample_law},      {6, noisy_two},    {7, noisy_general},   {8, alignment_rates},
        {9, rip_and_bp},
    };
    int failed = 0;
    std::map<int, std::string> tables;
    for (const auto& [id, fn] : criteria) {
        const auto t0 = Clock::now();
        const Outcome o = fn();
        const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
        std::cout << "criterion " << id << ": " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail << "  ["
                  << fmt(secs) << "s]" << std::endl;
        failed += !o.pass;
        tables[id] = o.csv;
    }

    // 10: everything again from the same seeds
    std::vector<int> differ;
    for (const auto& [id, fn] : criteria)
        if (fn().csv != tables[id])
            differ.push_back(id);
    std::string which;
    for (int id : differ)
        which += " " + std::to_string(id);
    std::cout << "criterion 10: " << (differ.empty() ? "PASS" : "FAIL") << "  rerun CSVs "
              << (differ.empty() ? "byte-identical for 1-9" : "differ for" + which) << std::endl;
    failed += !differ.empty();

    std::cout << (failed ? std::to_string(failed) + " criteria failed" : "all criteria passed") << std::endl;
    return failed ? 1 : 0;
}
