#include "weibrec/weibull.hpp"

#include "weibrec/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace weibrec {

namespace {

void check_params(const WeibullParams& p) {
    if (!(p.alpha > 0.0) || !(p.beta > 0.0) || !std::isfinite(p.alpha) || !std::isfinite(p.beta)) {
        throw InvalidInput("Weibull parameters must be finite and positive");
    }
}

// sum_j log(r_n / r_j), accumulated as differences of logs.
double log_ratio_sum(const RecordSeries& series) {
    const double log_last = std::log(series.last());
    double s = 0.0;
    for (double r : series.values()) {
        s += log_last - std::log(r);
    }
    return s;
}

void require_informative(const RecordSeries& series) {
    if (series.n() < 1) {
        throw DegenerateData("at least two record values are required for estimation");
    }
}

}  // namespace

double weibull_cdf(double x, const WeibullParams& params) {
    check_params(params);
    if (x <= 0.0) {
        return 0.0;
    }
    return -std::expm1(-std::pow(x / params.alpha, params.beta));
}

double record_loglik(const RecordSeries& series, const WeibullParams& params) {
    check_params(params);
    const double count = static_cast<double>(series.size());
    double sum_log = 0.0;
    for (double r : series.values()) {
        sum_log += std::log(r);
    }
    const double b = params.beta;
    return count * std::log(b) - b * count * std::log(params.alpha) + (b - 1.0) * sum_log -
           std::pow(series.last() / params.alpha, b);
}

Eigen::MatrixXd observed_information(const LogLikelihood& loglik, std::span<const double> at) {
    const auto k = static_cast<Eigen::Index>(at.size());
    std::vector<double> theta(at.begin(), at.end());
    std::vector<double> step(at.size());
    for (std::size_t i = 0; i < at.size(); ++i) {
        step[i] = 1e-4 * std::max(std::abs(at[i]), 1.0);
    }

    auto eval = [&](std::size_t i, double di, std::size_t j, double dj) {
        theta[i] += di;
        theta[j] += dj;
        const double v = loglik(theta);
        theta[i] -= di;
        theta[j] -= dj;
        return v;
    };

    Eigen::MatrixXd hess(k, k);
    const double f0 = loglik(theta);
    for (std::size_t i = 0; i < at.size(); ++i) {
        const double h = step[i];
        const double fp = eval(i, h, i, 0.0);
        const double fm = eval(i, -h, i, 0.0);
        hess(i, i) = (fp - 2.0 * f0 + fm) / (h * h);
        for (std::size_t j = i + 1; j < at.size(); ++j) {
            const double hj = step[j];
            const double v = (eval(i, h, j, hj) - eval(i, h, j, -hj) - eval(i, -h, j, hj) + eval(i, -h, j, -hj)) /
                             (4.0 * h * hj);
            hess(i, j) = v;
            hess(j, i) = v;
        }
    }
    return -hess;
}

std::vector<double> se_from_hessian(const LogLikelihood& loglik, std::span<const double> at) {
    const Eigen::MatrixXd info = observed_information(loglik, at);
    if (!info.allFinite()) {
        throw SingularInformation("observed information is not finite");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(info);
    if (llt.info() != Eigen::Success) {
        throw SingularInformation("observed information is not positive definite");
    }
    const Eigen::MatrixXd cov = llt.solve(Eigen::MatrixXd::Identity(info.rows(), info.cols()));
    std::vector<double> se(at.size());
    for (std::size_t i = 0; i < at.size(); ++i) {
        const double v = cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw SingularInformation("inverse information has a non-positive variance");
        }
        se[i] = std::sqrt(v);
    }
    return se;
}

WeibullFit mle_records(const RecordSeries& series) {
    require_informative(series);
    const double count = static_cast<double>(series.size());
    const double beta = count / log_ratio_sum(series);
    const double alpha = series.last() / std::pow(count, 1.0 / beta);

    // Parameter order (alpha, beta).
    const LogLikelihood surface = [&series](std::span<const double> t) {
        if (t[0] <= 0.0 || t[1] <= 0.0) {
            return -HUGE_VAL;
        }
        return record_loglik(series, {t[0], t[1]});
    };
    const std::array<double, 2> at{alpha, beta};
    const auto se = se_from_hessian(surface, at);

    return WeibullFit{{alpha, beta}, se[0], se[1], record_loglik(series, {alpha, beta}), ModelTag::separate};
}

PooledFit pooled_mle(const RecordSeries& series1, const RecordSeries& series2) {
    require_informative(series1);
    require_informative(series2);
    const double c1 = static_cast<double>(series1.size());
    const double c2 = static_cast<double>(series2.size());
    const double beta = (c1 + c2) / (log_ratio_sum(series1) + log_ratio_sum(series2));
    const double alpha1 = series1.last() / std::pow(c1, 1.0 / beta);
    const double alpha2 = series2.last() / std::pow(c2, 1.0 / beta);

    // Parameter order (beta, alpha1, alpha2).
    const LogLikelihood surface = [&](std::span<const double> t) {
        if (t[0] <= 0.0 || t[1] <= 0.0 || t[2] <= 0.0) {
            return -HUGE_VAL;
        }
        return record_loglik(series1, {t[1], t[0]}) + record_loglik(series2, {t[2], t[0]});
    };
    const std::array<double, 3> at{beta, alpha1, alpha2};
    const auto se = se_from_hessian(surface, at);

    return PooledFit{beta,  alpha1, alpha2, se[0], se[1], se[2],
                     record_loglik(series1, {alpha1, beta}) + record_loglik(series2, {alpha2, beta})};
}

}  // namespace weibrec
