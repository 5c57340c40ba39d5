#pragma once

#include "weibrec/records.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace weibrec {

/// Root bracket and tolerance of the pivotal equation solver.
inline constexpr double kShapeLowerBound = 1e-8;
inline constexpr double kShapeUpperCap = 1e6;
inline constexpr double kShapeRelTol = 1e-10;

/// W(beta) = sum_j r_j^beta / ((n+1) * (prod_j r_j)^(beta/(n+1))), evaluated in
/// log space. Increasing in beta; tends to 1 as beta -> 0.
double w_stat(const RecordSeries& series, double beta);
double log_w_stat(const RecordSeries& series, double beta);

/// W* = mean(R*) / geomean(R*), the beta = 1 value of the same functional.
double w_stat_unit(const RecordSeries& exp_records);

/// g(beta) = W_observed(beta) - W*(exp_records).
double g_fn(const RecordSeries& observed, const RecordSeries& exp_records, double beta);

/// Unique root of g in beta (bisection; relative tolerance kShapeRelTol).
/// Throws BracketFailure if g has no sign change on [kShapeLowerBound, kShapeUpperCap].
double solve_T(const RecordSeries& observed, const RecordSeries& exp_records);

/// The observed half of the pivotal equation, precomputed once per series:
/// holds log r_j minus their mean, so that log W(beta) is a max-shifted
/// log-sum-exp of beta * d_j.
class ShapeEquation {
public:
    explicit ShapeEquation(const RecordSeries& observed);

    std::size_t n() const noexcept { return centered_logs_.size() - 1; }
    double log_w(double beta) const noexcept;
    /// Root of log W(beta) = log_w_star.
    double solve(double log_w_star) const;

private:
    std::vector<double> centered_logs_;
    double max_log_ = 0.0;
};

/// log W* of a standard exponential record sample.
double log_w_unit(std::span<const double> exp_records) noexcept;

enum class PivotalKind { ratio, difference, single_shape };

struct PivotalDraws {
    std::vector<double> values;  ///< ordered by replicate index
    PivotalKind kind;
    std::size_t M;
    std::uint64_t seed;
};

struct SamplerOptions {
    /// Draw population 2's exponential records from population 1's substream.
    /// Only meaningful for tests of the T_1 = T_2 symmetry.
    bool share_streams = false;
};

/// Monte Carlo draws of G = T_1 / T_2 or H = T_1 - T_2 with the observed series
/// held fixed. Replicate m of population i uses RngStream{seed, 2m + (i - 1)}.
/// Runs replicates in parallel with OpenMP; output is independent of the
/// thread count. A failing replicate aborts the run with ReplicateFailure.
PivotalDraws sample_pivotal(const RecordSeries& series1, const RecordSeries& series2, PivotalKind kind,
                            std::size_t M, std::uint64_t seed, SamplerOptions options = {});

/// Single-threaded reference for sample_pivotal built on the public
/// generate / solve_T path. Must agree bitwise.
PivotalDraws sample_pivotal_serial(const RecordSeries& series1, const RecordSeries& series2, PivotalKind kind,
                                   std::size_t M, std::uint64_t seed, SamplerOptions options = {});

/// Draws of T_i for one population (`population` is 1 or 2; selects the substreams).
PivotalDraws sample_shape_pivotal(const RecordSeries& series, std::size_t M, std::uint64_t seed,
                                  int population = 1);

enum class Estimand { pi, delta, beta_i };

struct IntervalEstimate {
    double lower;
    double upper;
    double level;
    std::size_t M;
    Estimand estimand;
};

/// Percentile interval [X_(ceil(gamma M / 2)), X_(floor((1 - gamma/2) M))]
/// using exact order statistics (1-based ranks).
/// Throws InsufficientDraws if gamma M / 2 < 1.
IntervalEstimate gci_percentile(const PivotalDraws& draws, double gamma);

/// 1-based ranks used by gci_percentile.
struct PercentileRanks {
    std::size_t lower;
    std::size_t upper;
};
PercentileRanks percentile_ranks(std::size_t M, double gamma);

/// Same order statistics on an already sorted sample.
IntervalEstimate gci_percentile_sorted(std::span<const double> sorted, double gamma, Estimand estimand);

enum class Sidedness { one_sided_greater, two_sided };

struct TestResult {
    double p_value;
    double pi0;
    Sidedness sidedness;
    std::size_t M;
};

/// p = #{draw < pi0} / M, for H0: pi <= pi0 vs H1: pi > pi0.
TestResult gpv_one_sided(const PivotalDraws& draws, double pi0);

/// p = 2 min(#{draw < pi0}, #{draw > pi0}) / M, capped at 1. Ties count to neither side.
TestResult gpv_two_sided(const PivotalDraws& draws, double pi0);

}  // namespace weibrec
