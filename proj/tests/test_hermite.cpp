#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "steinlil/error.hpp"
#include "steinlil/hermite.hpp"
#include "steinlil/sampler.hpp"

using namespace steinlil;

namespace {

double gaussian_expectation(const std::function<double(double)>& f) {
    auto integrand = [&](double x) { return f(x) * std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); };
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, -12.0, 12.0, 10, 1e-14);
}

double direct_gamma(const std::vector<double>& z, int q, std::size_t a0, std::size_t a1, std::size_t b0,
                    std::size_t b1, const CovarianceModel& m, double ga, double gb) {
    long double s = 0.0L;
    for (std::size_t k = a0; k < a1; ++k) {
        for (std::size_t l = b0; l < b1; ++l) {
            s += hermite_eval(q - 1, z[k]) * hermite_eval(q - 1, z[l]) *
                 m.rho(static_cast<std::int64_t>(k) - static_cast<std::int64_t>(l));
        }
    }
    return static_cast<double>(q * s / (ga * gb));
}

}  // namespace

TEST_CASE("hermite polynomials") {
    for (double x : {-2.5, -1.0, 0.0, 0.3, 1.7}) {
        CHECK(hermite_eval(0, x) == 1.0);
        CHECK(hermite_eval(1, x) == x);
        CHECK(hermite_eval(2, x) == doctest::Approx(x * x - 1));
        CHECK(hermite_eval(3, x) == doctest::Approx(x * x * x - 3 * x));
        CHECK(hermite_eval(4, x) == doctest::Approx(std::pow(x, 4) - 6 * x * x + 3));
    }
    CHECK_THROWS_AS(hermite_eval(-1, 0.0), DomainError);
}

TEST_CASE("hermite orthogonality under the Gaussian weight") {
    for (int p = 0; p <= 5; ++p) {
        for (int r = 0; r <= 5; ++r) {
            const double e = gaussian_expectation([&](double x) { return hermite_eval(p, x) * hermite_eval(r, x); });
            const double expected = p == r ? std::tgamma(p + 1.0) : 0.0;
            CHECK(e == doctest::Approx(expected).epsilon(1e-10).scale(1.0));
        }
    }
}

TEST_CASE("regime validation") {
    CHECK_NOTHROW(VariationSpec(CovarianceModel::fgn(0.75), ChaosOrder(2), Regime::Critical));
    CHECK_THROWS_AS(VariationSpec(CovarianceModel::fgn(0.7), ChaosOrder(2), Regime::Critical), RegimeError);
    CHECK_THROWS_AS(VariationSpec(CovarianceModel::fgn(0.5), ChaosOrder(1), Regime::Critical), RegimeError);
    CHECK_THROWS_AS(VariationSpec(CovarianceModel::fgn(0.8), ChaosOrder(2), Regime::BreuerMajor), RegimeError);
    const VariationSpec bm(CovarianceModel::fgn(0.3), ChaosOrder(2), Regime::BreuerMajor);
    REQUIRE(bm.sigma2().has_value());
    CHECK(normalizer(bm, 100) == doctest::Approx(std::sqrt(*bm.sigma2() * 100)));
    const VariationSpec crit(CovarianceModel::fgn(0.75), ChaosOrder(2), Regime::Critical);
    CHECK(normalizer(crit, 1000) == doctest::Approx(std::sqrt(0.5625 * 1000 * std::log(1000.0))));
    CHECK_THROWS_AS(lil_normalizer(crit, 15), DomainError);
    CHECK(lil_normalizer(crit, 16) == doctest::Approx(normalizer(crit, 16) * std::sqrt(2 * std::log(std::log(16.0)))));
    CHECK(regime_from_string(to_string(Regime::BreuerMajor)) == Regime::BreuerMajor);
    CHECK_THROWS_AS(regime_from_string("nope"), DomainError);
}

TEST_CASE("variation statistic") {
    const std::vector<double> z{0.5, -1.0, 2.0};
    CHECK(variation_statistic(z, ChaosOrder(2), 0, 3) == doctest::Approx(-0.75 + 0.0 + 3.0));
    CHECK(variation_statistic(z, ChaosOrder(1), 1, 3) == doctest::Approx(1.0));
    CHECK_THROWS_AS(variation_statistic(z, ChaosOrder(2), 0, 4), OutOfRangeError);
    CHECK_THROWS_AS(variation_statistic(z, ChaosOrder(2), 2, 1), OutOfRangeError);
}

TEST_CASE("carre du champ methods agree") {
    const auto m = CovarianceModel::fgn(0.75);
    const auto plan = build_plan(m, 300);
    const auto path = sample_path(plan, 3, 0).values;
    for (int q : {1, 2, 3}) {
        const double ref = direct_gamma(path, q, 10, 290, 10, 290, m, 7.0, 7.0);
        for (auto method : {GammaOptions::Method::Auto, GammaOptions::Method::Direct, GammaOptions::Method::Fft}) {
            GammaOptions o;
            o.method = method;
            CHECK(carre_du_champ(path, ChaosOrder(q), 10, 290, m, 7.0, o).value == doctest::Approx(ref).epsilon(1e-11));
        }
        GammaOptions banded;
        banded.method = GammaOptions::Method::Banded;
        banded.bandwidth = 20;
        const auto b = carre_du_champ(path, ChaosOrder(q), 10, 290, m, 7.0, banded);
        CHECK(b.truncation_bound > 0.0);
        CHECK(std::abs(b.value - ref) <= b.truncation_bound);

        const CarreDuChamp engine(m, ChaosOrder(q));
        const double cross = engine.cross(path, Block{5, 40}, Block{100, 180}, 2.0, 3.0).value;
        CHECK(cross == doctest::Approx(direct_gamma(path, q, 5, 40, 100, 180, m, 2.0, 3.0)).epsilon(1e-11));
        CHECK(cross == doctest::Approx(engine.cross(path, Block{100, 180}, Block{5, 40}, 3.0, 2.0).value).epsilon(1e-12));
    }
}

TEST_CASE("direct method cost cap") {
    const auto m = CovarianceModel::fgn(0.6);
    std::vector<double> z(5000, 0.1);
    GammaOptions o;
    o.method = GammaOptions::Method::Direct;
    o.direct_cap = 1000;
    CHECK_THROWS_AS(carre_du_champ(z, ChaosOrder(2), 0, 5000, m, 1.0, o), CostCapError);
    o.direct_cap = 5000;
    CHECK_NOTHROW(carre_du_champ(z, ChaosOrder(2), 0, 2000, m, 1.0, o));
}

TEST_CASE("gamma is deterministic 1 in the first chaos") {
    const auto m = CovarianceModel::fgn(0.3);
    const auto plan = build_plan(m, 512);
    const VariationSpec spec(m, ChaosOrder(1), Regime::Exact);
    const double g = normalizer(spec, 512);
    for (std::uint64_t r = 0; r < 5; ++r) {
        const auto path = sample_path(plan, 1, r).values;
        CHECK(carre_du_champ(path, ChaosOrder(1), 0, 512, m, g).value == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("gamma has mean one under the exact normalizer") {
    const auto m = CovarianceModel::fgn(0.75);
    const std::size_t n = 128, M = 3000;
    const auto plan = build_plan(m, n);
    const VariationSpec spec(m, ChaosOrder(2), Regime::Exact);
    const double g = normalizer(spec, n);
    const CarreDuChamp engine(m, ChaosOrder(2));
    double s = 0.0, s2 = 0.0, x2 = 0.0;
    for (std::size_t r = 0; r < M; ++r) {
        const auto path = sample_path(plan, 77, r).values;
        const double v = engine.gamma(path, Block{0, n}, g).value;
        const double x = variation_statistic(path, ChaosOrder(2), 0, n) / g;
        s += v;
        s2 += v * v;
        x2 += x * x;
    }
    const double mean = s / M;
    const double se = std::sqrt((s2 / M - mean * mean) / M);
    CHECK(std::abs(mean - 1.0) <= 4.0 * se);
    // E[X^2] = E[Gamma] for chaos variables; loose check on the second moment
    CHECK(std::abs(x2 / M - 1.0) < 0.15);
}

TEST_CASE("blocking subsequence") {
    const auto sub = blocking_subsequence(1.2, 0.3, 4, 3);
    CHECK(sub.indices == std::vector<std::uint64_t>{4, 6, 9, 15, 23, 38});
    CHECK(sub.block(1).begin == 4);
    CHECK(sub.block(1).end == 6);
    CHECK(sub.block_length(3) == 15);
    CHECK(sub.last_index() == 38);
    CHECK(blocking_subsequence(1.2, 0.3, 8, 3).indices == std::vector<std::uint64_t>{23, 38, 61, 100, 166, 279});
    CHECK_THROWS_AS(blocking_subsequence(2.0, 0.5, 40, 3), OverflowError);
    CHECK_THROWS_AS(blocking_subsequence(1.01, 0.1, 0, 2), DomainError);
    CHECK_THROWS_AS(blocking_subsequence(0.9, 0.3, 4, 2), DomainError);

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> uq(1.05, 1.3), ua(0.1, 0.5);
    for (int t = 0; t < 100; ++t) {
        const double qr = uq(rng), a = ua(rng);
        try {
            const auto s = blocking_subsequence(qr, a, 10, 3);
            for (std::size_t i = 1; i < s.indices.size(); ++i) CHECK(s.indices[i] > s.indices[i - 1]);
            CHECK(s.last_index() <= (std::uint64_t{1} << 24));
        } catch (const DomainError&) {
            // coinciding floors at small q_ratio are reported, never silently merged
        }
    }
}

TEST_CASE("increment vector") {
    const auto m = CovarianceModel::fgn(0.75);
    const auto sub = blocking_subsequence(1.2, 0.3, 4, 3);
    const auto plan = build_plan(m, sub.last_index());
    const auto path = sample_path(plan, 2, 0).values;
    const VariationSpec spec(m, ChaosOrder(2), Regime::Exact);
    const auto y = increment_vector(path, sub, spec);
    REQUIRE(y.size() == 3);
    for (int i = 1; i <= 3; ++i) {
        const auto b = sub.block(i);
        CHECK(y[i - 1] == doctest::Approx(variation_statistic(path, ChaosOrder(2), b.begin, b.end) /
                                          normalizer(spec, b.size())));
    }
    std::vector<double> short_path(10, 0.0);
    CHECK_THROWS_AS(increment_vector(short_path, sub, spec), OutOfRangeError);
}
