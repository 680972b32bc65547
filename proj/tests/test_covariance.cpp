#include <doctest.h>

#include <boost/multiprecision/cpp_dec_float.hpp>
#include <cmath>
#include <random>

#include "steinlil/covariance.hpp"
#include "steinlil/error.hpp"

using namespace steinlil;
using Big = boost::multiprecision::cpp_dec_float_50;

namespace {

double fgn_reference(double hurst, std::uint64_t k) {
    const Big two_h = Big(2) * Big(hurst);
    const Big kk(k);
    const Big lo = k == 0 ? Big(1) : Big(k - 1);
    const Big value = (pow(kk + 1, two_h) - 2 * pow(kk, two_h) + pow(lo, two_h)) / 2;
    return value.convert_to<double>();
}

double brute_partial_sum_variance(const CovarianceModel& model, int q, std::uint64_t n) {
    long double s = 0.0L;
    for (std::uint64_t k = 0; k < n; ++k) {
        for (std::uint64_t l = 0; l < n; ++l) {
            s += std::pow(static_cast<long double>(model.rho(static_cast<std::int64_t>(k) - static_cast<std::int64_t>(l))), q);
        }
    }
    return static_cast<double>(s * factorial(q));
}

}  // namespace

TEST_CASE("fgn autocovariance matches 50-digit reference") {
    for (double h : {0.05, 0.1, 0.3, 0.5, 0.6, 0.75, 0.8333333333333334, 0.9, 0.97}) {
        for (std::uint64_t k : {0ULL, 1ULL, 2ULL, 3ULL, 7ULL, 15ULL, 16ULL, 17ULL, 100ULL, 9999ULL, 10000ULL, 123456ULL,
                                10000000ULL}) {
            const double ref = fgn_reference(h, k);
            const double got = fgn_autocovariance(HurstParam(h), k);
            CHECK(got == doctest::Approx(ref).epsilon(1e-12));
        }
    }
}

TEST_CASE("fgn autocovariance frozen values") {
    CHECK(fgn_autocovariance(HurstParam(0.75), 1) == doctest::Approx(0.4142135623730950488).epsilon(1e-15));
    CHECK(fgn_autocovariance(HurstParam(0.75), 17) == doctest::Approx(0.090970548573336970682).epsilon(1e-14));
    CHECK(fgn_autocovariance(HurstParam(0.3), 10000) == doctest::Approx(-3.0142637262514345853e-7).epsilon(1e-12));
    CHECK(fgn_autocovariance(HurstParam(0.75), 1000000) == doctest::Approx(0.0003750000000000234375).epsilon(1e-12));
    CHECK(fgn_autocovariance(HurstParam(0.9), 12345) == doctest::Approx(0.10940427125603550374).epsilon(1e-13));
    CHECK(fgn_autocovariance(HurstParam(0.1), 3) == doctest::Approx(-0.01162780673055269288).epsilon(1e-13));
}

TEST_CASE("fgn properties") {
    const auto white = CovarianceModel::fgn(0.5);
    for (std::int64_t k = 1; k < 50; ++k) CHECK(std::abs(white.rho(k)) < 1e-15);

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uh(0.01, 0.99);
    std::uniform_int_distribution<std::int64_t> uk(-100000, 100000);
    for (int trial = 0; trial < 200; ++trial) {
        const auto m = CovarianceModel::fgn(uh(rng));
        const auto k = uk(rng);
        CHECK(m.rho(0) == 1.0);
        CHECK(m.rho(k) == m.rho(-k));
        CHECK(std::abs(m.rho(k)) <= 1.0);
        // sign of the memory: positive correlations above H = 1/2, negative below
        if (k != 0) CHECK((m.rho(k) > 0) == (m.hurst() > 0.5));
    }
}

TEST_CASE("tail envelope dominates fgn") {
    for (double h : {0.2, 0.4, 0.6, 0.75, 0.9}) {
        const auto m = CovarianceModel::fgn(h);
        const auto env = m.tail_envelope();
        REQUIRE(env.has_value());
        for (std::uint64_t k = env->from_lag; k < 200000; k = k * 3 / 2 + 1) {
            CHECK(std::abs(m.rho(static_cast<std::int64_t>(k))) <= env->amplitude * std::pow(double(k), -env->exponent));
        }
    }
}

TEST_CASE("critical asymptotics") {
    for (int q : {2, 3, 4}) {
        const double h = critical_hurst(ChaosOrder(q));
        CHECK(h == doctest::Approx(1.0 - 1.0 / (2.0 * q)));
        const std::uint64_t k = 5000000;
        const double exact = std::pow(fgn_autocovariance(HurstParam(h), k), q);
        CHECK(exact == doctest::Approx(fgn_autocovariance_asymptotic(ChaosOrder(q), k)).epsilon(1e-5));
    }
    CHECK(critical_variance_constant(ChaosOrder(2)) == doctest::Approx(0.5625).epsilon(1e-15));
    CHECK(critical_variance_constant(ChaosOrder(3)) ==
          doctest::Approx(2.0 * 6.0 * std::pow((5.0 / 6.0) * (2.0 / 3.0), 3)).epsilon(1e-15));
    CHECK_THROWS_AS(critical_variance_constant(ChaosOrder(1)), RegimeError);
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(HurstParam(0.0), DomainError);
    CHECK_THROWS_AS(HurstParam(1.0), DomainError);
    CHECK_THROWS_AS(HurstParam(std::nan("")), DomainError);
    CHECK_THROWS_AS(ChaosOrder(0), DomainError);
    CHECK_THROWS_AS(CovarianceModel::explicit_values({0.9, 0.1}), DomainError);
    CHECK_THROWS_AS(CovarianceModel::explicit_values({1.0, 1.5}), DomainError);
    CHECK_THROWS_AS(CovarianceModel::explicit_values({1.0, 0.5}, -1.0), DomainError);
    CHECK_THROWS_AS(CovarianceModel::explicit_values({1.0, 0.5}, 1.0, true), DomainError);
    const auto bounded = CovarianceModel::explicit_values({1.0, 0.5, 0.25});
    CHECK(bounded.rho(-2) == 0.25);
    CHECK_THROWS_AS(bounded.rho(3), OutOfRangeError);
    const auto zero = CovarianceModel::explicit_values({1.0, 0.5}, std::nullopt, true);
    CHECK(zero.rho(7) == 0.0);
    CHECK_FALSE(zero.max_lag().has_value());
    const auto tail = CovarianceModel::explicit_values({1.0, 0.5, 0.25}, 1.5);
    CHECK(tail.rho(4) == doctest::Approx(0.25 * std::pow(2.0 / 4.0, 1.5)));
}

TEST_CASE("partial sum variance against brute force") {
    const std::vector<CovarianceModel> models{CovarianceModel::fgn(0.3), CovarianceModel::fgn(0.75),
                                              CovarianceModel::fgn(0.9), CovarianceModel::white_noise(),
                                              CovarianceModel::explicit_values({1.0, -0.4, 0.1}, std::nullopt, true)};
    for (const auto& m : models) {
        for (int q : {1, 2, 3}) {
            for (std::uint64_t n : {1ULL, 2ULL, 5ULL, 33ULL, 200ULL}) {
                CHECK(partial_sum_variance(m, ChaosOrder(q), n) ==
                      doctest::Approx(brute_partial_sum_variance(m, q, n)).epsilon(1e-12));
            }
            const auto seq = partial_sum_variance_sequence(m, ChaosOrder(q), 300);
            REQUIRE(seq.size() == 300);
            for (std::uint64_t n = 1; n <= 300; n += 37) {
                CHECK(seq[n - 1] == doctest::Approx(partial_sum_variance(m, ChaosOrder(q), n)).epsilon(1e-12));
            }
        }
    }
    CHECK(partial_sum_variance(CovarianceModel::white_noise(), ChaosOrder(3), 1000) == 6000.0);
}

TEST_CASE("partial sum variance frozen values") {
    CHECK(partial_sum_variance(CovarianceModel::fgn(0.75), ChaosOrder(2), 1024) ==
          doctest::Approx(5939.3853789451133475).epsilon(1e-12));
    CHECK(partial_sum_variance(CovarianceModel::fgn(0.3), ChaosOrder(3), 500) ==
          doctest::Approx(2914.1068518371793478).epsilon(1e-12));
    CHECK(partial_sum_variance(CovarianceModel::fgn(0.3), ChaosOrder(2), 100000) / 100000.0 ==
          doctest::Approx(2.250388120863925089).epsilon(1e-11));
}

TEST_CASE("variance is superadditive for positive correlations") {
    const auto m = CovarianceModel::fgn(0.8);
    const auto seq = partial_sum_variance_sequence(m, ChaosOrder(2), 2000);
    for (std::size_t n = 1; n < seq.size(); ++n) CHECK(seq[n] > seq[n - 1]);
}

TEST_CASE("block cross covariance") {
    const auto m = CovarianceModel::fgn(0.75);
    CHECK(block_cross_covariance(m, ChaosOrder(2), 4, 6, 9, 15) == doctest::Approx(0.51979274288152000761).epsilon(1e-13));
    // symmetric and additive over adjacent blocks
    CHECK(block_cross_covariance(m, ChaosOrder(2), 9, 15, 4, 6) == doctest::Approx(block_cross_covariance(m, ChaosOrder(2), 4, 6, 9, 15)));
    const double whole = block_cross_covariance(m, ChaosOrder(3), 0, 10, 20, 40);
    const double parts = block_cross_covariance(m, ChaosOrder(3), 0, 4, 20, 40) + block_cross_covariance(m, ChaosOrder(3), 4, 10, 20, 40);
    CHECK(whole == doctest::Approx(parts).epsilon(1e-13));
    // diagonal block recovers the partial-sum variance
    CHECK(block_cross_covariance(m, ChaosOrder(2), 7, 107, 7, 107) == doctest::Approx(partial_sum_variance(m, ChaosOrder(2), 100)).epsilon(1e-13));
    CHECK(block_cross_covariance(CovarianceModel::white_noise(), ChaosOrder(2), 0, 10, 10, 30) == 0.0);
    CHECK_THROWS_AS(block_cross_covariance(m, ChaosOrder(2), 5, 5, 9, 15), DomainError);
}

TEST_CASE("breuer-major series") {
    const auto s2 = breuer_major_sigma2(CovarianceModel::fgn(0.3), ChaosOrder(2), 1e-8);
    CHECK(s2.value == doctest::Approx(2.2503910102045305555).epsilon(1e-9));
    CHECK(std::abs(s2.value - s2.coarse_value) <= 1e-8);
    CHECK(s2.tail_bound <= 0.5e-8);
    const auto s3 = breuer_major_sigma2(CovarianceModel::fgn(0.3), ChaosOrder(3), 1e-10);
    CHECK(s3.value == doctest::Approx(5.8278647040910402401).epsilon(1e-10));
    CHECK(breuer_major_sigma2(CovarianceModel::white_noise(), ChaosOrder(4)).value == 24.0);
    CHECK(breuer_major_regime(CovarianceModel::fgn(0.7), ChaosOrder(2)));
    CHECK_FALSE(breuer_major_regime(CovarianceModel::fgn(0.75), ChaosOrder(2)));
    CHECK_FALSE(breuer_major_regime(CovarianceModel::fgn(0.9), ChaosOrder(2)));
    CHECK_THROWS_AS(breuer_major_sigma2(CovarianceModel::fgn(0.75), ChaosOrder(2)), RegimeError);
    CHECK_THROWS_AS(breuer_major_sigma2(CovarianceModel::fgn(0.9), ChaosOrder(2)), RegimeError);
}

TEST_CASE("critical variance ratio frozen values") {
    const auto m = CovarianceModel::fgn(0.75);
    const double c = critical_variance_constant(ChaosOrder(2));
    auto ratio = [&](std::uint64_t n) { return partial_sum_variance(m, ChaosOrder(2), n) / (c * n * std::log(double(n))); };
    CHECK(ratio(1024) == doctest::Approx(1.48762531807856453519547227453).epsilon(1e-12));
    CHECK(ratio(4096) == doctest::Approx(1.40633720870624210550328642496).epsilon(1e-12));
    // (ratio - 1) log n approaches 3.37977...
    const double n = 1 << 22;
    CHECK((ratio(1 << 22) - 1.0) * std::log(n) == doctest::Approx(3.37977012952154464485716814334).epsilon(1e-6));
}
