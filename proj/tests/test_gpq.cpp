#include "weibrec/errors.hpp"
#include "weibrec/gpq.hpp"
#include "weibrec/records.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

using namespace weibrec;
using Catch::Approx;

namespace {

const RecordSeries kRec34({0.96, 4.15, 8.01, 31.75, 33.91, 36.71, 72.89});
const RecordSeries kRec36({1.97, 2.58, 2.71, 25.50});
const RecordSeries kOneE({1.0, std::numbers::e});

// Observed records c * s_j^(1/beta0) built from exponential records s.
RecordSeries paired_observed(const RecordSeries& s, double c, double beta0) {
    std::vector<double> v;
    for (double x : s.values()) v.push_back(c * std::pow(x, 1.0 / beta0));
    return RecordSeries(v);
}

// Direct (non-log-space) W, valid for moderate beta.
double direct_w(const RecordSeries& r, double beta) {
    double num = 0.0;
    double prod_log = 0.0;
    for (double x : r.values()) {
        num += std::pow(x, beta);
        prod_log += std::log(x);
    }
    const double c = static_cast<double>(r.size());
    return num / (c * std::exp(beta * prod_log / c));
}

// Straight-line draws of T_1 / T_2: one std::mt19937_64, no substreams,
// exponential records via inverse cdf, root by plain bisection on the direct W.
std::vector<double> straight_line_ratio(const RecordSeries& r1, const RecordSeries& r2, std::size_t M,
                                        unsigned seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto exp_records = [&](std::size_t count) {
        std::vector<double> s(count);
        double acc = 0.0;
        for (auto& x : s) {
            acc += -std::log1p(-u(gen));
            x = acc;
        }
        return s;
    };
    auto root = [](const RecordSeries& r, const std::vector<double>& s) {
        const double c = static_cast<double>(s.size());
        const double mean = std::accumulate(s.begin(), s.end(), 0.0) / c;
        double lg = 0.0;
        for (double x : s) lg += std::log(x);
        const double w_star = mean / std::exp(lg / c);
        double lo = 1e-6;
        double hi = 50.0;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (direct_w(r, mid) > w_star ? hi : lo) = mid;
        }
        return 0.5 * (lo + hi);
    };
    std::vector<double> out;
    for (std::size_t m = 0; m < M; ++m) {
        const auto s1 = exp_records(r1.size());
        const auto s2 = exp_records(r2.size());
        out.push_back(root(r1, s1) / root(r2, s2));
    }
    return out;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size();
    return m % 2 ? v[m / 2] : 0.5 * (v[m / 2 - 1] + v[m / 2]);
}

// Distribution-free standard error of the sample median from the spread of
// order statistics around it.
double median_se(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const double m = static_cast<double>(v.size());
    const auto k = static_cast<std::size_t>(std::sqrt(m) / 2.0);
    return (v[v.size() / 2 + k] - v[v.size() / 2 - k]) / 2.0;
}

PivotalDraws make_draws(std::vector<double> values, PivotalKind kind = PivotalKind::ratio) {
    const auto M = values.size();
    return PivotalDraws{std::move(values), kind, M, 0};
}

}  // namespace

TEST_CASE("w_stat", "[gpq]") {
    CHECK(w_stat(kOneE, 1.0) == Approx((1.0 + std::numbers::e) / (2.0 * std::exp(0.5))).epsilon(1e-14));
    CHECK(w_stat(kOneE, 2.0) == Approx(std::cosh(1.0)).epsilon(1e-14));
    const double tiny = w_stat(kOneE, 1e-8);
    CHECK(tiny >= 1.0);
    CHECK(tiny - 1.0 < 1e-7);
    // Near zero log W = log cosh(beta / 2) ~ beta^2 / 8 must survive cancellation.
    CHECK(log_w_stat(kOneE, 1e-6) == Approx(1e-12 / 8.0).epsilon(1e-6));
    CHECK(log_w_stat(kOneE, 1e-4) == Approx(std::log(std::cosh(5e-5))).epsilon(1e-6));
    CHECK(log_w_stat(kRec34, 1e6) > 1e5);  // finite where the direct form overflows
    CHECK(std::isfinite(log_w_stat(kRec34, 1e6)));
    CHECK(w_stat(kRec34, 0.7) == Approx(direct_w(kRec34, 0.7)).epsilon(1e-13));
    CHECK_THROWS_AS(w_stat(kOneE, 0.0), InvalidInput);
    CHECK_THROWS_AS(w_stat(kOneE, -1.0), InvalidInput);
}

TEST_CASE("w_stat is strictly increasing in beta", "[gpq][property]") {
    std::mt19937_64 gen(31);
    std::uniform_real_distribution<double> logb(-6.0, 4.0);
    for (int trial = 0; trial < 200; ++trial) {
        const auto r = gen_weibull_records(1 + trial % 15, 2.0, 1.3, {77, static_cast<std::uint64_t>(trial)});
        std::vector<double> betas(50);
        for (auto& b : betas) b = std::exp(logb(gen));
        std::sort(betas.begin(), betas.end());
        betas.erase(std::unique(betas.begin(), betas.end()), betas.end());
        for (std::size_t k = 1; k < betas.size(); ++k) {
            REQUIRE(log_w_stat(r, betas[k]) > log_w_stat(r, betas[k - 1]));
        }
    }
}

TEST_CASE("g_fn", "[gpq]") {
    const auto s = gen_std_exp_records(6, {5, 0});
    SECTION("limit at small beta is 1 - W*") {
        const double g = g_fn(kRec34, s, 1e-8);
        CHECK(g < 0.0);
        CHECK(g == Approx(1.0 - w_stat_unit(s)).margin(1e-6));
    }
    SECTION("zero at the generating shape for paired records") {
        const auto obs = paired_observed(s, 3.0, 1.7);
        CHECK(std::abs(g_fn(obs, s, 1.7)) < 1e-13);
    }
    SECTION("exactly one sign change on a 10^4-point log grid") {
        int changes = 0;
        double prev = g_fn(kRec34, s, std::exp(-8.0));
        for (int i = 1; i < 10000; ++i) {
            const double beta = std::exp(-8.0 + 14.0 * i / 9999.0);
            const double g = g_fn(kRec34, s, beta);
            changes += (g > 0.0) != (prev > 0.0) ? 1 : 0;
            prev = g;
        }
        CHECK(changes == 1);
    }
    SECTION("length mismatch") {
        CHECK_THROWS_AS(g_fn(kRec36, s, 1.0), InvalidInput);
        CHECK_THROWS_AS(solve_T(kRec36, s), InvalidInput);
    }
}

TEST_CASE("solve_T", "[gpq]") {
    SECTION("pairing oracle recovers beta0 = 2") {
        const auto s = gen_std_exp_records(5, {9, 4});
        CHECK(std::abs(solve_T(paired_observed(s, 1.0, 2.0), s) - 2.0) < 1e-9);
    }
    SECTION("scale invariance") {
        const auto s = gen_std_exp_records(6, {9, 5});
        std::vector<double> scaled(kRec34.values().begin(), kRec34.values().end());
        for (auto& x : scaled) x *= 10.0;
        const double t = solve_T(kRec34, s);
        CHECK(std::abs(solve_T(RecordSeries(scaled), s) - t) <= 1e-12 * t);
    }
    SECTION("matches a grid scan of |g|") {
        const auto s = gen_std_exp_records(3, {9, 6});
        const double t = solve_T(kRec36, s);
        constexpr int points = 1000000;
        const double lo = std::log(1e-3);
        const double hi = std::log(1e2);
        const double step = (hi - lo) / (points - 1);
        double best = 0.0;
        double best_abs = HUGE_VAL;
        for (int i = 0; i < points; ++i) {
            const double beta = std::exp(lo + step * i);
            const double a = std::abs(g_fn(kRec36, s, beta));
            if (a < best_abs) {
                best_abs = a;
                best = beta;
            }
        }
        CHECK(std::abs(std::log(t) - std::log(best)) <= step);
    }
    SECTION("bracket failure when g never turns positive") {
        // Nearly tied observed records: W(beta) stays below W* up to the cap.
        const RecordSeries flat({1.0, 1.0 + 1e-15 * 4});
        const RecordSeries s({0.1, 5.0});
        CHECK_THROWS_AS(solve_T(flat, s), BracketFailure);
        try {
            solve_T(flat, s);
        } catch (const BracketFailure& ex) {
            CHECK(ex.g_low() < 0.0);
            CHECK(ex.g_high() <= 0.0);
        }
    }
    SECTION("a single record cannot be solved") {
        CHECK_THROWS_AS(solve_T(RecordSeries({2.0}), RecordSeries({1.0})), DegenerateData);
    }
}

TEST_CASE("pairing exactness across random configurations", "[gpq][property]") {
    std::mt19937_64 gen(99);
    std::uniform_real_distribution<double> logb(std::log(0.1), std::log(20.0));
    std::uniform_real_distribution<double> loga(std::log(1e-3), std::log(1e3));
    for (int trial = 0; trial < 200; ++trial) {
        const auto n = static_cast<std::size_t>(1 + trial % 20);
        const double b0 = std::exp(logb(gen));
        const auto s = gen_std_exp_records(n, {123, static_cast<std::uint64_t>(trial)});
        const double t = solve_T(paired_observed(s, std::exp(loga(gen)), b0), s);
        REQUIRE(std::abs(t - b0) < 1e-9 * std::max(1.0, b0));
    }
}

TEST_CASE("sample_pivotal", "[gpq]") {
    SECTION("identical series with shared streams give G = 1 and H = 0") {
        const auto g = sample_pivotal(kRec34, kRec34, PivotalKind::ratio, 500, 3, {.share_streams = true});
        const auto h = sample_pivotal(kRec34, kRec34, PivotalKind::difference, 500, 3, {.share_streams = true});
        CHECK(std::all_of(g.values.begin(), g.values.end(), [](double v) { return v == 1.0; }));
        CHECK(std::all_of(h.values.begin(), h.values.end(), [](double v) { return v == 0.0; }));
    }
    SECTION("draws are finite and ratio draws positive") {
        const auto g = sample_pivotal(kRec34, kRec36, PivotalKind::ratio, 2000, 4);
        CHECK(g.M == 2000);
        CHECK(g.values.size() == 2000);
        CHECK(std::all_of(g.values.begin(), g.values.end(), [](double v) { return std::isfinite(v) && v > 0.0; }));
    }
    SECTION("parallel kernel equals the serial reference for any thread count") {
        const auto reference = sample_pivotal_serial(kRec34, kRec36, PivotalKind::ratio, 3000, 17);
        const int saved = omp_get_max_threads();
        for (int threads : {1, 2, 3, 8}) {
            omp_set_num_threads(threads);
            const auto draws = sample_pivotal(kRec34, kRec36, PivotalKind::ratio, 3000, 17);
            REQUIRE(draws.values == reference.values);
        }
        omp_set_num_threads(saved);
    }
    SECTION("difference draws pair with ratio draws") {
        const auto g = sample_pivotal(kRec34, kRec36, PivotalKind::ratio, 100, 5);
        const auto h = sample_pivotal(kRec34, kRec36, PivotalKind::difference, 100, 5);
        const auto t1 = sample_shape_pivotal(kRec34, 100, 5, 1);
        const auto t2 = sample_shape_pivotal(kRec36, 100, 5, 2);
        for (std::size_t m = 0; m < 100; ++m) {
            REQUIRE(g.values[m] == t1.values[m] / t2.values[m]);
            REQUIRE(h.values[m] == t1.values[m] - t2.values[m]);
        }
    }
    SECTION("median agrees with a straight-line implementation") {
        const auto r1 = gen_weibull_records(7, 1.0, 2.0, {2024, 0});
        const auto r2 = gen_weibull_records(7, 1.0, 2.0, {2024, 1});
        const auto draws = sample_pivotal(r1, r2, PivotalKind::ratio, 20000, 8);
        const auto oracle = straight_line_ratio(r1, r2, 20000, 12345);
        const double se = std::hypot(median_se(draws.values), median_se(oracle));
        CHECK(std::abs(median(draws.values) - median(oracle)) < 3.0 * se);
    }
    SECTION("replicate failure aborts the run") {
        const RecordSeries flat({1.0, 1.0 + 4e-15});
        CHECK_THROWS_AS(sample_pivotal(flat, kRec36, PivotalKind::ratio, 50, 1), ReplicateFailure);
        CHECK_THROWS_AS(sample_pivotal_serial(flat, kRec36, PivotalKind::ratio, 50, 1), ReplicateFailure);
        try {
            sample_pivotal(flat, kRec36, PivotalKind::ratio, 50, 1);
        } catch (const ReplicateFailure& ex) {
            CHECK(ex.replicate() == 0);
        }
    }
    SECTION("invalid requests") {
        CHECK_THROWS_AS(sample_pivotal(kRec34, kRec36, PivotalKind::ratio, 0, 1), InvalidInput);
        CHECK_THROWS_AS(sample_pivotal(kRec34, kRec36, PivotalKind::single_shape, 10, 1), InvalidInput);
    }
}

TEST_CASE("T is pivotal in the scale parameter", "[gpq][property]") {
    std::vector<std::vector<double>> sorted_draws;
    for (double alpha : {0.1, 1.0, 10.0}) {
        const auto r = gen_weibull_records(5, alpha, 1.5, {555, 0});
        auto t = sample_shape_pivotal(r, 4000, 21).values;
        std::sort(t.begin(), t.end());
        sorted_draws.push_back(t);
    }
    for (std::size_t q : {100u, 1000u, 2000u, 3000u, 3900u}) {
        CHECK(sorted_draws[1][q] == Approx(sorted_draws[0][q]).epsilon(1e-12));
        CHECK(sorted_draws[2][q] == Approx(sorted_draws[0][q]).epsilon(1e-12));
    }
}

TEST_CASE("gci_percentile", "[gpq]") {
    std::vector<double> v(100);
    std::iota(v.begin(), v.end(), 1.0);
    std::shuffle(v.begin(), v.end(), std::mt19937(1));
    const auto ci = gci_percentile(make_draws(v), 0.10);
    CHECK(ci.lower == 5.0);
    CHECK(ci.upper == 95.0);
    CHECK(ci.level == Approx(0.90));
    CHECK(ci.M == 100);
    CHECK(ci.estimand == Estimand::pi);

    CHECK(percentile_ranks(2000, 0.05).lower == 50);
    CHECK(percentile_ranks(2000, 0.05).upper == 1950);
    CHECK(percentile_ranks(10000, 0.05).lower == 250);
    CHECK(percentile_ranks(10000, 0.05).upper == 9750);
    CHECK(percentile_ranks(101, 0.05).lower == 3);  // ceil(2.525)
    CHECK(percentile_ranks(101, 0.05).upper == 98);  // floor(98.475)

    CHECK_THROWS_AS(gci_percentile(make_draws({1.0, 2.0, 3.0}), 0.05), InsufficientDraws);
    CHECK_THROWS_AS(percentile_ranks(100, 0.0), InvalidInput);
    CHECK(gci_percentile(make_draws(v, PivotalKind::difference), 0.1).estimand == Estimand::delta);
}

TEST_CASE("percentile intervals are equivariant under increasing maps", "[gpq][property]") {
    const auto draws = sample_pivotal(kRec34, kRec36, PivotalKind::ratio, 4000, 77);
    const auto ci = gci_percentile(draws, 0.05);
    for (auto phi : {+[](double x) { return std::log(x); }, +[](double x) { return x * x * x + 2.0; },
                     +[](double x) { return std::exp(x) / (1.0 + std::exp(x)); }}) {
        PivotalDraws mapped = draws;
        for (auto& x : mapped.values) x = phi(x);
        const auto m = gci_percentile(mapped, 0.05);
        REQUIRE(m.lower == phi(ci.lower));
        REQUIRE(m.upper == phi(ci.upper));
    }
}

TEST_CASE("generalized p-values", "[gpq]") {
    std::vector<double> v(100);
    std::iota(v.begin(), v.end(), 1.0);
    const auto d = make_draws(v);

    CHECK(gpv_one_sided(d, 0.5).p_value == 0.0);
    CHECK(gpv_one_sided(d, 100.5).p_value == 1.0);
    CHECK(gpv_one_sided(d, 50.5).p_value == 0.5);
    CHECK(gpv_one_sided(d, 50.5).sidedness == Sidedness::one_sided_greater);

    CHECK(gpv_two_sided(d, 50.5).p_value == 1.0);
    CHECK(gpv_two_sided(d, 0.5).p_value == 0.0);
    CHECK(gpv_two_sided(d, 200.0).p_value == 0.0);
    CHECK(gpv_two_sided(d, 10.5).p_value == Approx(0.2));
    // ties count to neither side
    CHECK(gpv_one_sided(d, 50.0).p_value == Approx(0.49));
    CHECK(gpv_two_sided(d, 50.0).p_value == Approx(0.98));
}

TEST_CASE("p-value consistency on pivotal draws", "[gpq][property]") {
    const auto d = sample_pivotal(kRec34, kRec36, PivotalKind::ratio, 5001, 5);
    const double med = median(d.values);
    const double p_med = gpv_two_sided(d, med).p_value;
    for (double pi0 : {0.2, 0.5, 0.9, 1.0, 1.3, 2.0, 5.0}) {
        const double below = gpv_one_sided(d, pi0).p_value;
        const auto above = std::count_if(d.values.begin(), d.values.end(), [pi0](double x) { return x > pi0; });
        CHECK(below + static_cast<double>(above) / 5001.0 == Approx(1.0).epsilon(1e-15));
        CHECK(gpv_two_sided(d, pi0).p_value <= p_med);
    }
}
