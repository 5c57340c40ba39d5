#pragma once

#include "weibrec/records.hpp"

#include <Eigen/Dense>

#include <functional>
#include <span>
#include <vector>

namespace weibrec {

struct WeibullParams {
    double alpha;  ///< scale, same units as the data
    double beta;   ///< shape
};

enum class ModelTag { separate, pooled };

struct WeibullFit {
    WeibullParams params;
    double se_alpha;
    double se_beta;
    double loglik;
    ModelTag model_tag = ModelTag::separate;
};

/// Equal-shape fit of two populations.
struct PooledFit {
    double beta;
    double alpha1;
    double alpha2;
    double se_beta;
    double se_alpha1;
    double se_alpha2;
    double loglik;
};

/// 1 - exp(-(x/alpha)^beta).
double weibull_cdf(double x, const WeibullParams& params);

/// Log of the joint density of the first n+1 upper records:
///   (n+1) log b - b (n+1) log a + (b-1) sum log r_j - (r_n / a)^b
double record_loglik(const RecordSeries& series, const WeibullParams& params);

/// Closed-form MLE with standard errors from the observed information.
/// Throws DegenerateData when the series holds a single record.
WeibullFit mle_records(const RecordSeries& series);

/// MLE of (beta, alpha1, alpha2) under beta1 = beta2.
PooledFit pooled_mle(const RecordSeries& series1, const RecordSeries& series2);

using LogLikelihood = std::function<double(std::span<const double>)>;

/// Observed information -H at `at`, with H the Hessian of `loglik` from
/// central differences (step 1e-4 * max(|theta_k|, 1)), symmetrized.
Eigen::MatrixXd observed_information(const LogLikelihood& loglik, std::span<const double> at);

/// Square roots of the diagonal of the inverse observed information.
/// Throws SingularInformation if the information is not positive definite.
std::vector<double> se_from_hessian(const LogLikelihood& loglik, std::span<const double> at);

}  // namespace weibrec
