#include "weibrec/gpq.hpp"

#include "weibrec/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace weibrec {

namespace {

void check_beta(double beta) {
    if (!(beta > 0.0) || !std::isfinite(beta)) {
        throw InvalidInput("shape argument must be finite and positive");
    }
}

void check_informative(const RecordSeries& series) {
    if (series.n() < 1) {
        throw DegenerateData("the pivotal equation needs at least two record values");
    }
}

double combine(PivotalKind kind, double t1, double t2) {
    return kind == PivotalKind::ratio ? t1 / t2 : t1 - t2;
}

void check_pair_kind(PivotalKind kind) {
    if (kind == PivotalKind::single_shape) {
        throw InvalidInput("use sample_shape_pivotal for single-shape draws");
    }
}

std::uint64_t stream_of(std::size_t m, int population) {
    return 2 * static_cast<std::uint64_t>(m) + static_cast<std::uint64_t>(population - 1);
}

}  // namespace

ShapeEquation::ShapeEquation(const RecordSeries& observed) {
    check_informative(observed);
    centered_logs_.reserve(observed.size());
    double mean = 0.0;
    for (double r : observed.values()) {
        centered_logs_.push_back(std::log(r));
        mean += centered_logs_.back();
    }
    mean /= static_cast<double>(centered_logs_.size());
    for (double& d : centered_logs_) {
        d -= mean;
    }
    max_log_ = *std::max_element(centered_logs_.begin(), centered_logs_.end());
}

double ShapeEquation::log_w(double beta) const noexcept {
    const double count = static_cast<double>(centered_logs_.size());
    if (beta * max_log_ < 1.0) {
        // Near beta = 0, log W ~ beta^2 var(d) / 2; the shifted form below
        // would lose it to cancellation.
        double sum = 0.0;
        for (double d : centered_logs_) {
            sum += std::expm1(beta * d);
        }
        return std::log1p(sum / count);
    }
    // The largest centered log belongs to the last record, so the shifted
    // exponents are all <= 0.
    double sum = 0.0;
    for (double d : centered_logs_) {
        sum += std::exp(beta * (d - max_log_));
    }
    return beta * max_log_ + std::log(sum / count);
}

double ShapeEquation::solve(double log_w_star) const {
    auto f = [&](double beta) { return log_w(beta) - log_w_star; };
    auto g_at = [&](double beta) { return std::exp(log_w(beta)) - std::exp(log_w_star); };

    double lo = kShapeLowerBound;
    if (!(f(lo) < 0.0)) {
        std::ostringstream msg;
        msg << "pivotal equation is not negative at the lower bracket " << lo;
        throw BracketFailure(msg.str(), g_at(lo), g_at(kShapeUpperCap));
    }
    double hi = 1.0;
    while (!(f(hi) > 0.0)) {
        if (hi >= kShapeUpperCap) {
            std::ostringstream msg;
            msg << "no sign change of the pivotal equation on [" << kShapeLowerBound << ", " << kShapeUpperCap
                << "]";
            throw BracketFailure(msg.str(), g_at(kShapeLowerBound), g_at(kShapeUpperCap));
        }
        lo = hi;
        hi = std::min(2.0 * hi, kShapeUpperCap);
    }

    while (hi - lo > kShapeRelTol * lo) {
        const double mid = std::sqrt(lo * hi);
        if (f(mid) > 0.0) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return std::sqrt(lo * hi);
}

double log_w_unit(std::span<const double> exp_records) noexcept {
    double sum = 0.0;
    double sum_log = 0.0;
    for (double s : exp_records) {
        sum += s;
        sum_log += std::log(s);
    }
    const double count = static_cast<double>(exp_records.size());
    return std::log(sum / count) - sum_log / count;
}

double log_w_stat(const RecordSeries& series, double beta) {
    check_beta(beta);
    if (series.n() == 0) {
        return 0.0;
    }
    return ShapeEquation(series).log_w(beta);
}

double w_stat(const RecordSeries& series, double beta) {
    return std::exp(log_w_stat(series, beta));
}

double w_stat_unit(const RecordSeries& exp_records) {
    return std::exp(log_w_unit(exp_records.values()));
}

double g_fn(const RecordSeries& observed, const RecordSeries& exp_records, double beta) {
    if (observed.n() != exp_records.n()) {
        throw InvalidInput("observed and exponential record series differ in length");
    }
    return w_stat(observed, beta) - w_stat_unit(exp_records);
}

double solve_T(const RecordSeries& observed, const RecordSeries& exp_records) {
    if (observed.n() != exp_records.n()) {
        throw InvalidInput("observed and exponential record series differ in length");
    }
    return ShapeEquation(observed).solve(log_w_unit(exp_records.values()));
}

PivotalDraws sample_pivotal(const RecordSeries& series1, const RecordSeries& series2, PivotalKind kind,
                            std::size_t M, std::uint64_t seed, SamplerOptions options) {
    check_pair_kind(kind);
    if (M == 0) {
        throw InvalidInput("draw count M must be at least 1");
    }
    const ShapeEquation eq1(series1);
    const ShapeEquation eq2(series2);
    const int pop2 = options.share_streams ? 1 : 2;

    std::vector<double> values(M);
    std::atomic<bool> failed{false};
    std::size_t first_failure = M;
    std::string failure_message;

    const auto count = static_cast<std::int64_t>(M);
#pragma omp parallel
    {
        std::vector<double> s1(series1.size());
        std::vector<double> s2(series2.size());
#pragma omp for schedule(static)
        for (std::int64_t i = 0; i < count; ++i) {
            if (failed.load(std::memory_order_relaxed)) {
                continue;
            }
            const auto m = static_cast<std::size_t>(i);
            try {
                auto e1 = RngStream{seed, stream_of(m, 1)}.engine();
                fill_std_exp_records(s1, e1);
                auto e2 = RngStream{seed, stream_of(m, pop2)}.engine();
                fill_std_exp_records(s2, e2);
                values[m] = combine(kind, eq1.solve(log_w_unit(s1)), eq2.solve(log_w_unit(s2)));
            } catch (const std::exception& ex) {
#pragma omp critical(weibrec_sample_failure)
                {
                    if (m < first_failure) {
                        first_failure = m;
                        failure_message = ex.what();
                    }
                }
                failed.store(true, std::memory_order_relaxed);
            }
        }
    }
    if (failed.load()) {
        throw ReplicateFailure("replicate " + std::to_string(first_failure) + ": " + failure_message, first_failure);
    }
    return PivotalDraws{std::move(values), kind, M, seed};
}

PivotalDraws sample_pivotal_serial(const RecordSeries& series1, const RecordSeries& series2, PivotalKind kind,
                                   std::size_t M, std::uint64_t seed, SamplerOptions options) {
    check_pair_kind(kind);
    if (M == 0) {
        throw InvalidInput("draw count M must be at least 1");
    }
    const int pop2 = options.share_streams ? 1 : 2;
    std::vector<double> values;
    values.reserve(M);
    for (std::size_t m = 0; m < M; ++m) {
        try {
            const double t1 = solve_T(series1, gen_std_exp_records(series1.n(), {seed, stream_of(m, 1)}));
            const double t2 = solve_T(series2, gen_std_exp_records(series2.n(), {seed, stream_of(m, pop2)}));
            values.push_back(combine(kind, t1, t2));
        } catch (const std::exception& ex) {
            throw ReplicateFailure("replicate " + std::to_string(m) + ": " + ex.what(), m);
        }
    }
    return PivotalDraws{std::move(values), kind, M, seed};
}

PivotalDraws sample_shape_pivotal(const RecordSeries& series, std::size_t M, std::uint64_t seed, int population) {
    if (M == 0) {
        throw InvalidInput("draw count M must be at least 1");
    }
    if (population != 1 && population != 2) {
        throw InvalidInput("population must be 1 or 2");
    }
    const ShapeEquation eq(series);
    std::vector<double> values(M);
    std::atomic<bool> failed{false};
    std::size_t first_failure = M;
    std::string failure_message;

    const auto count = static_cast<std::int64_t>(M);
#pragma omp parallel
    {
        std::vector<double> s(series.size());
#pragma omp for schedule(static)
        for (std::int64_t i = 0; i < count; ++i) {
            if (failed.load(std::memory_order_relaxed)) {
                continue;
            }
            const auto m = static_cast<std::size_t>(i);
            try {
                auto e = RngStream{seed, stream_of(m, population)}.engine();
                fill_std_exp_records(s, e);
                values[m] = eq.solve(log_w_unit(s));
            } catch (const std::exception& ex) {
#pragma omp critical(weibrec_sample_failure)
                {
                    if (m < first_failure) {
                        first_failure = m;
                        failure_message = ex.what();
                    }
                }
                failed.store(true, std::memory_order_relaxed);
            }
        }
    }
    if (failed.load()) {
        throw ReplicateFailure("replicate " + std::to_string(first_failure) + ": " + failure_message, first_failure);
    }
    return PivotalDraws{std::move(values), PivotalKind::single_shape, M, seed};
}

PercentileRanks percentile_ranks(std::size_t M, double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0)) {
        throw InvalidInput("gamma must lie in (0, 1)");
    }
    const double m = static_cast<double>(M);
    // Snap products that are integral up to rounding (0.05 * 2000 / 2 etc.).
    auto snap = [](double x) {
        const double r = std::round(x);
        return std::abs(x - r) < 1e-9 * std::max(1.0, std::abs(x)) ? r : x;
    };
    const double low = snap(gamma * m / 2.0);
    if (low < 1.0) {
        std::ostringstream msg;
        msg << "gamma * M / 2 = " << low << " < 1; increase M";
        throw InsufficientDraws(msg.str());
    }
    const double high = snap((1.0 - gamma / 2.0) * m);
    return {static_cast<std::size_t>(std::ceil(low)), static_cast<std::size_t>(std::floor(high))};
}

namespace {

Estimand estimand_of(PivotalKind kind) {
    switch (kind) {
        case PivotalKind::ratio:
            return Estimand::pi;
        case PivotalKind::difference:
            return Estimand::delta;
        case PivotalKind::single_shape:
            break;
    }
    return Estimand::beta_i;
}

}  // namespace

IntervalEstimate gci_percentile_sorted(std::span<const double> sorted, double gamma, Estimand estimand) {
    const auto ranks = percentile_ranks(sorted.size(), gamma);
    return IntervalEstimate{sorted[ranks.lower - 1], sorted[ranks.upper - 1], 1.0 - gamma, sorted.size(), estimand};
}

IntervalEstimate gci_percentile(const PivotalDraws& draws, double gamma) {
    std::vector<double> sorted = draws.values;
    std::sort(sorted.begin(), sorted.end());
    return gci_percentile_sorted(sorted, gamma, estimand_of(draws.kind));
}

TestResult gpv_one_sided(const PivotalDraws& draws, double pi0) {
    const auto below = std::count_if(draws.values.begin(), draws.values.end(), [pi0](double v) { return v < pi0; });
    const double m = static_cast<double>(draws.values.size());
    return TestResult{static_cast<double>(below) / m, pi0, Sidedness::one_sided_greater, draws.values.size()};
}

TestResult gpv_two_sided(const PivotalDraws& draws, double pi0) {
    std::size_t below = 0;
    std::size_t above = 0;
    for (double v : draws.values) {
        below += v < pi0 ? 1 : 0;
        above += v > pi0 ? 1 : 0;
    }
    const double m = static_cast<double>(draws.values.size());
    const double p = std::min(1.0, 2.0 * static_cast<double>(std::min(below, above)) / m);
    return TestResult{p, pi0, Sidedness::two_sided, draws.values.size()};
}

}  // namespace weibrec
