#ifndef MSLR_EXPERIMENT_HPP
#define MSLR_EXPERIMENT_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "mslr/gridgmm.hpp"
#include "mslr/rng.hpp"

namespace mslr
{
    class ConfigError : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    /// Parameters of one CLI run. Unset optionals take per-command defaults
    /// (see resolve()).
    struct ExperimentConfig
    {
        std::string command;
        std::optional<std::size_t> n, k, L;
        std::optional<double> sigma, epsilon;
        double amp = 2.0;
        std::optional<std::size_t> trials;
        std::optional<std::uint64_t> seed;
        std::string out;
        std::size_t threads = 1;

        // pipeline constants
        std::optional<double> c2;
        double c_s = 6.0;
        double delta = 0.4;
        std::optional<double> alpha = 4.0;
        std::optional<Estimator> estimator;
        double multiplier = 1.0;
        bool exact_arithmetic = true;

        std::optional<double> min_success;

        // rip-check
        std::optional<std::size_t> m;
        // gmm-bench
        std::vector<std::size_t> T;
        std::vector<double> ratios;
        double gmm_c = 4.0;
        std::int64_t mean_range = 5;
        bool sweep = false;

        std::string trace;
        std::string plot;
        std::string summary;
        bool timing = false;

        /// Fills per-command defaults and validates. Throws ConfigError.
        ExperimentConfig resolve() const;
    };

    std::vector<std::string> experiment_commands();

    struct ExperimentSummary
    {
        std::size_t trials = 0;
        double success_rate = 0.0;
        double mean_queries = 0.0;
        double mean_snr = 0.0;
        double runtime_s = 0.0;
        double threshold = 0.0;
        bool passed = false;
        /// Command-specific extras in insertion order.
        std::vector<std::pair<std::string, std::string>> extra;
    };

    struct ExperimentResult
    {
        std::string csv;
        std::string trace_csv;
        std::string svg;
        ExperimentSummary summary;
    };

    /// Runs the configured command over `trials` seeds derived from the
    /// master seed. CSV rows are merged in seed order, so the text does not
    /// depend on the worker count. Does not touch the file system.
    ExperimentResult run_experiment(const ExperimentConfig& config);

    /// run_experiment plus writing csv/trace/plot/summary files named in the
    /// config ("-" or empty out means the stream). Returns the process exit
    /// code: 0 when thresholds pass, 1 otherwise.
    int run_and_write(const ExperimentConfig& config, std::ostream& out, std::ostream& log);

    struct LowerBoundStats
    {
        std::vector<std::size_t> samples;
        double mean = 0.0;
        double variance = 0.0;
    };

    /// Number of uniform draws from [L] until component 0 has appeared 2k times.
    LowerBoundStats lowerbound_sim(std::size_t L, std::size_t k, std::size_t trials, Rng& rng);

    /// R^2 of the least-squares line through (x, y).
    double linear_fit_r2(const std::vector<double>& x, const std::vector<double>& y);

    /// Runs fn(i) for i in [0, count) on up to `threads` workers and returns
    /// the results in index order.
    template <typename Result>
    std::vector<Result> parallel_map(std::size_t count, std::size_t threads, const std::function<Result(std::size_t)>& fn);
} // namespace mslr

#include <atomic>
#include <exception>
#include <mutex>

namespace mslr
{
    template <typename Result>
    std::vector<Result> parallel_map(std::size_t count, std::size_t threads, const std::function<Result(std::size_t)>& fn)
    {
        std::vector<std::optional<Result>> slots(count);
        std::atomic<std::size_t> next{0};
        std::exception_ptr error;
        std::mutex error_mutex;
        auto worker = [&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    slots[i].emplace(fn(i));
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error)
                        error = std::current_exception();
                }
            }
        };
        const std::size_t pool = std::max<std::size_t>(1, std::min(threads, count));
        if (pool == 1) {
            worker();
        } else {
            std::vector<std::thread> ts;
            for (std::size_t t = 0; t < pool; ++t)
                ts.emplace_back(worker);
            for (auto& t : ts)
                t.join();
        }
        if (error)
            std::rethrow_exception(error);
        std::vector<Result> out;
        out.reserve(count);
        for (auto& s : slots)
            out.push_back(std::move(*s));
        return out;
    }
} // namespace mslr

#endif
