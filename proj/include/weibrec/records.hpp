#pragma once

#include "weibrec/rng.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace weibrec {

/// Upper record values r_0 < r_1 < ... < r_n from one population.
///
/// The constructor enforces the invariants: at least one value, every value
/// finite and strictly positive, strictly increasing order.
class RecordSeries {
public:
    explicit RecordSeries(std::vector<double> values);

    std::span<const double> values() const noexcept { return values_; }
    /// Record index of the last value; the series holds n() + 1 values.
    std::size_t n() const noexcept { return values_.size() - 1; }
    std::size_t size() const noexcept { return values_.size(); }
    double last() const noexcept { return values_.back(); }
    double operator[](std::size_t j) const noexcept { return values_[j]; }

    friend bool operator==(const RecordSeries&, const RecordSeries&) = default;

private:
    std::vector<double> values_;
};

/// Strict running maxima of `sequence`. The first element is always a record;
/// a value equal to the current maximum is not.
RecordSeries extract_upper_records(std::span<const double> sequence);

/// Record values R*_0..R*_n of the standard exponential distribution, built
/// as cumulative sums of n + 1 unit exponentials drawn from `rng`.
RecordSeries gen_std_exp_records(std::size_t n, const RngStream& rng);

/// Weibull(alpha, beta) records alpha * S_j^(1/beta), with S the standard
/// exponential records of the same stream.
RecordSeries gen_weibull_records(std::size_t n, double alpha, double beta, const RngStream& rng);

/// Fills `out` with standard exponential records drawn from `engine`.
/// Shared by the public generators and the Monte Carlo kernels.
void fill_std_exp_records(std::span<double> out, Engine& engine);

}  // namespace weibrec
