#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace weibrec {

/// One cell of the coverage study.
struct SimConfig {
    double beta1 = 1.0;
    double beta2 = 2.0;
    double alpha1 = 1.0;
    double alpha2 = 1.0;
    std::size_t n1 = 7;  ///< record index; the series holds n1 + 1 values
    std::size_t n2 = 7;
    std::size_t M = 2000;  ///< pivotal draws per interval
    std::size_t N = 2000;  ///< outer replications
    double gamma = 0.05;
    std::uint64_t seed = 0;
};

struct SimReport {
    double coverage;
    double expected_length;
    double mc_se_coverage;  ///< sqrt(coverage (1 - coverage) / N)
    double mc_se_length;    ///< standard error of the mean width
    SimConfig config;
};

/// Throws InvalidInput for non-positive parameters, n_i < 1, N < 1 or
/// gamma M / 2 < 1.
void validate(const SimConfig& config);

/// Coverage and expected length of the percentile interval for beta1/beta2.
///
/// Replicate l draws its Weibull data from RngStream{derive_seed(r, kDataStreamTag), i - 1}
/// and its pivotal draws from sample_pivotal(..., seed = r), where
/// r = derive_seed(config.seed, l). Outer replicates run in parallel; the
/// reduction is done in replicate order.
SimReport run_cell(const SimConfig& config);

/// Serial reference for run_cell (no OpenMP); must agree bitwise.
SimReport run_cell_serial(const SimConfig& config);

inline constexpr std::uint64_t kDataStreamTag = 0x8000000000000000ULL;

struct CellResult {
    SimConfig config;
    std::optional<SimReport> report;
    std::string error;  ///< set when the cell failed
};

/// Runs each cell with its own seed. A failing cell records its error and the
/// remaining cells still run.
std::vector<CellResult> run_grid(const std::vector<SimConfig>& grid);

/// The published layout: rows (n1, n2) in {3,7,14}^2, columns
/// beta1 in {0.5, 1, 1.2, 1.5, 2, 3, 5}, beta2 = 2, alpha1 = alpha2 = 1.
/// Cell k (row-major) gets seed derive_seed(master_seed, k).
std::vector<SimConfig> table_grid(std::size_t M, std::size_t N, double gamma, std::uint64_t master_seed);

const std::vector<double>& table_beta1_values();
const std::vector<std::pair<std::size_t, std::size_t>>& table_row_values();

}  // namespace weibrec
