#include "weibrec/records.hpp"

#include "weibrec/errors.hpp"

#include <cmath>
#include <random>
#include <string>

namespace weibrec {

RecordSeries::RecordSeries(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) {
        throw InvalidInput("record series is empty");
    }
    for (std::size_t j = 0; j < values_.size(); ++j) {
        const double v = values_[j];
        if (!std::isfinite(v) || v <= 0.0) {
            throw InvalidInput("record " + std::to_string(j) + " is not a finite positive value");
        }
        if (j > 0 && !(values_[j - 1] < v)) {
            throw InvalidInput("record values must be strictly increasing (index " + std::to_string(j) + ")");
        }
    }
}

RecordSeries extract_upper_records(std::span<const double> sequence) {
    if (sequence.empty()) {
        throw InvalidInput("cannot extract records from an empty sequence");
    }
    std::vector<double> records;
    for (std::size_t i = 0; i < sequence.size(); ++i) {
        const double x = sequence[i];
        if (!std::isfinite(x) || x <= 0.0) {
            throw InvalidInput("observation " + std::to_string(i) + " is not a finite positive value");
        }
        if (records.empty() || x > records.back()) {
            records.push_back(x);
        }
    }
    return RecordSeries(std::move(records));
}

void fill_std_exp_records(std::span<double> out, Engine& engine) {
    std::exponential_distribution<double> unit(1.0);
    double sum = 0.0;
    for (double& v : out) {
        sum += unit(engine);
        v = sum;
    }
}

RecordSeries gen_std_exp_records(std::size_t n, const RngStream& rng) {
    std::vector<double> values(n + 1);
    auto engine = rng.engine();
    fill_std_exp_records(values, engine);
    return RecordSeries(std::move(values));
}

RecordSeries gen_weibull_records(std::size_t n, double alpha, double beta, const RngStream& rng) {
    if (!(alpha > 0.0) || !std::isfinite(alpha) || !(beta > 0.0) || !std::isfinite(beta)) {
        throw InvalidInput("Weibull parameters must be finite and positive");
    }
    std::vector<double> values(n + 1);
    auto engine = rng.engine();
    fill_std_exp_records(values, engine);
    const double inv_beta = 1.0 / beta;
    for (double& v : values) {
        v = alpha * std::pow(v, inv_beta);
    }
    return RecordSeries(std::move(values));
}

}  // namespace weibrec
