#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "mslr/experiment.hpp"

namespace
{
    // Copies an option into an optional only when it was given on the command
    // line or in the config file.
    template <typename T>
    struct Slot
    {
        T value{};
        CLI::Option* opt = nullptr;

        void into(std::optional<T>& target) const
        {
            if (opt->count() > 0)
                target = value;
        }
    };
} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Simulate and recover mixtures of sparse linear regressions."};
    app.set_config("--config", "", "key=value file; command-line flags take precedence");
    app.allow_config_extras(false);
    app.require_subcommand(1);

    const char* help[][2] = {
        {"gen", "write a random signal set"},
        {"noiseless", "exact recovery from noiseless queries"},
        {"noisy2", "noisy recovery of two vectors"},
        {"noisyL", "noisy recovery of L vectors"},
        {"gmm-bench", "grid Gaussian-mixture mean recovery rates"},
        {"rip-check", "empirical RIP constant of random sign matrices"},
        {"lowerbound", "coupon-collector query count simulation"},
    };
    for (const auto& h : help)
        app.add_subcommand(h[0], h[1])->fallthrough();

    mslr::ExperimentConfig cfg;
    Slot<std::size_t> n, k, L, trials, m;
    Slot<double> sigma, epsilon, c2, min_success, alpha;
    Slot<std::uint64_t> seed;
    std::string estimator, arith = "exact";
    double alpha_value = 4.0;
    bool literal_alpha = false;

    n.opt = app.add_option("--n", n.value, "ambient dimension");
    k.opt = app.add_option("--k", k.value, "sparsity");
    L.opt = app.add_option("--L", L.value, "number of vectors");
    sigma.opt = app.add_option("--sigma", sigma.value, "noise standard deviation");
    epsilon.opt = app.add_option("--epsilon", epsilon.value, "grid pitch");
    trials.opt = app.add_option("--trials", trials.value, "number of seeded trials");
    seed.opt = app.add_option("--seed", seed.value, "master seed");
    app.add_option("--out", cfg.out, "CSV output path (default stdout)");
    app.add_option("--amp", cfg.amp, "largest signal magnitude");
    app.add_option("--threads", cfg.threads, "worker threads");
    c2.opt = app.add_option("--c2", c2.value, "batch-size constant");
    app.add_option("--c_s", cfg.c_s, "row-count constant");
    app.add_option("--delta", cfg.delta, "RIP target for the alignment constants");
    app.add_option("--alpha", alpha_value, "alpha* override (default 4)");
    app.add_flag("--literal-alpha", literal_alpha, "solve for alpha* instead of overriding it");
    app.add_option("--estimator", estimator, "min_distance | lloyd_snap | auto");
    app.add_option("--multiplier", cfg.multiplier, "noiseless batch-size multiplier");
    app.add_option("--arith", arith, "noiseless arithmetic: exact | double")->check(CLI::IsMember({"exact", "double"}));
    min_success.opt = app.add_option("--min-success", min_success.value, "pass threshold on the success rate");
    m.opt = app.add_option("--m", m.value, "rows for rip-check");
    app.add_option("--T", cfg.T, "batch sizes for gmm-bench")->delimiter(',');
    app.add_option("--ratios", cfg.ratios, "sigma/epsilon values for gmm-bench")->delimiter(',');
    app.add_option("--gmm-c", cfg.gmm_c, "batch-size constant for gmm-bench");
    app.add_option("--mean-range", cfg.mean_range, "gmm-bench means are drawn from [-range, range]");
    app.add_flag("--sweep", cfg.sweep, "gmm-bench: find the smallest T per ratio");
    app.add_option("--trace", cfg.trace, "query trace CSV path");
    app.add_option("--plot", cfg.plot, "SVG plot path");
    app.add_option("--summary", cfg.summary, "summary file path");
    app.add_flag("--timing", cfg.timing, "record wall time per trial");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    cfg.command = app.get_subcommands().front()->get_name();
    n.into(cfg.n), k.into(cfg.k), L.into(cfg.L), trials.into(cfg.trials), m.into(cfg.m);
    sigma.into(cfg.sigma), epsilon.into(cfg.epsilon), c2.into(cfg.c2), min_success.into(cfg.min_success);
    seed.into(cfg.seed);
    cfg.alpha = literal_alpha ? std::nullopt : std::optional<double>(alpha_value);
    cfg.exact_arithmetic = arith == "exact";

    try {
        if (!estimator.empty())
            cfg.estimator = mslr::parse_estimator(estimator);
        cfg.resolve();
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    }

    try {
        return mslr::run_and_write(cfg, std::cout, std::cerr);
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
