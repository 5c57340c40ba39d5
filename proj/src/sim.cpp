#include "weibrec/sim.hpp"

#include "weibrec/errors.hpp"
#include "weibrec/gpq.hpp"
#include "weibrec/records.hpp"
#include "weibrec/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <utility>

namespace weibrec {

namespace {

struct ReplicateOutcome {
    bool covered;
    double width;
};

// Steps 1-7 for one outer replicate. Called inside the outer parallel loop,
// where the nested sampler region runs on a single thread.
ReplicateOutcome run_replicate(const SimConfig& c, std::size_t l, std::vector<double>& scratch, bool reference) {
    const std::uint64_t replicate_seed = derive_seed(c.seed, l);
    const std::uint64_t data_seed = derive_seed(replicate_seed, kDataStreamTag);
    const RecordSeries r1 = gen_weibull_records(c.n1, c.alpha1, c.beta1, {data_seed, 0});
    const RecordSeries r2 = gen_weibull_records(c.n2, c.alpha2, c.beta2, {data_seed, 1});

    const PivotalDraws draws = reference
                                   ? sample_pivotal_serial(r1, r2, PivotalKind::ratio, c.M, replicate_seed)
                                   : sample_pivotal(r1, r2, PivotalKind::ratio, c.M, replicate_seed);
    scratch = draws.values;
    std::sort(scratch.begin(), scratch.end());
    const IntervalEstimate ci = gci_percentile_sorted(scratch, c.gamma, Estimand::pi);
    const double truth = c.beta1 / c.beta2;
    return {ci.lower < truth && truth < ci.upper, ci.upper - ci.lower};
}

SimReport summarize(const SimConfig& c, const std::vector<ReplicateOutcome>& outcomes) {
    double hits = 0.0;
    double width_sum = 0.0;
    for (const auto& o : outcomes) {
        hits += o.covered ? 1.0 : 0.0;
        width_sum += o.width;
    }
    const double n = static_cast<double>(outcomes.size());
    const double coverage = hits / n;
    const double mean_width = width_sum / n;
    double ss = 0.0;
    for (const auto& o : outcomes) {
        ss += (o.width - mean_width) * (o.width - mean_width);
    }
    const double se_len = outcomes.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
    return SimReport{coverage, mean_width, std::sqrt(coverage * (1.0 - coverage) / n), se_len, c};
}

}  // namespace

void validate(const SimConfig& c) {
    auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
    if (!positive(c.beta1) || !positive(c.beta2) || !positive(c.alpha1) || !positive(c.alpha2)) {
        throw InvalidInput("simulation shapes and scales must be finite and positive");
    }
    if (c.n1 < 1 || c.n2 < 1) {
        throw InvalidInput("record indices n1, n2 must be at least 1");
    }
    if (c.N < 1) {
        throw InvalidInput("outer replication count N must be at least 1");
    }
    (void)percentile_ranks(c.M, c.gamma);
}

SimReport run_cell(const SimConfig& config) {
    validate(config);
    std::vector<ReplicateOutcome> outcomes(config.N);
    std::atomic<bool> failed{false};
    std::size_t first_failure = config.N;
    std::string failure_message;

    const auto count = static_cast<std::int64_t>(config.N);
#pragma omp parallel
    {
        std::vector<double> scratch;
#pragma omp for schedule(dynamic, 8)
        for (std::int64_t i = 0; i < count; ++i) {
            if (failed.load(std::memory_order_relaxed)) {
                continue;
            }
            const auto l = static_cast<std::size_t>(i);
            try {
                outcomes[l] = run_replicate(config, l, scratch, false);
            } catch (const std::exception& ex) {
#pragma omp critical(weibrec_cell_failure)
                {
                    if (l < first_failure) {
                        first_failure = l;
                        failure_message = ex.what();
                    }
                }
                failed.store(true, std::memory_order_relaxed);
            }
        }
    }
    if (failed.load()) {
        throw ReplicateFailure("outer replicate " + std::to_string(first_failure) + ": " + failure_message,
                               first_failure);
    }
    return summarize(config, outcomes);
}

SimReport run_cell_serial(const SimConfig& config) {
    validate(config);
    std::vector<ReplicateOutcome> outcomes;
    outcomes.reserve(config.N);
    std::vector<double> scratch;
    for (std::size_t l = 0; l < config.N; ++l) {
        try {
            outcomes.push_back(run_replicate(config, l, scratch, true));
        } catch (const std::exception& ex) {
            throw ReplicateFailure("outer replicate " + std::to_string(l) + ": " + ex.what(), l);
        }
    }
    return summarize(config, outcomes);
}

std::vector<CellResult> run_grid(const std::vector<SimConfig>& grid) {
    if (grid.empty()) {
        throw InvalidInput("simulation grid is empty");
    }
    std::vector<CellResult> results;
    results.reserve(grid.size());
    for (const auto& config : grid) {
        CellResult cell{config, std::nullopt, {}};
        try {
            cell.report = run_cell(config);
        } catch (const std::exception& ex) {
            cell.error = ex.what();
        }
        results.push_back(std::move(cell));
    }
    return results;
}

const std::vector<double>& table_beta1_values() {
    static const std::vector<double> values{0.5, 1.0, 1.2, 1.5, 2.0, 3.0, 5.0};
    return values;
}

const std::vector<std::pair<std::size_t, std::size_t>>& table_row_values() {
    static const std::vector<std::pair<std::size_t, std::size_t>> rows{{3, 3},  {3, 7},  {3, 14},
                                                                        {7, 3},  {7, 7},  {7, 14},
                                                                        {14, 3}, {14, 7}, {14, 14}};
    return rows;
}

std::vector<SimConfig> table_grid(std::size_t M, std::size_t N, double gamma, std::uint64_t master_seed) {
    std::vector<SimConfig> grid;
    std::uint64_t k = 0;
    for (const auto& [n1, n2] : table_row_values()) {
        for (double b1 : table_beta1_values()) {
            SimConfig c;
            c.beta1 = b1;
            c.beta2 = 2.0;
            c.n1 = n1;
            c.n2 = n2;
            c.M = M;
            c.N = N;
            c.gamma = gamma;
            c.seed = derive_seed(master_seed, k++);
            grid.push_back(c);
        }
    }
    return grid;
}

}  // namespace weibrec
