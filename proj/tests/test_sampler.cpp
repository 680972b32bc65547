#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "steinlil/error.hpp"
#include "steinlil/sampler.hpp"

using namespace steinlil;

TEST_CASE("embedding spectrum is nonnegative") {
    for (double h : {0.1, 0.3, 0.5, 0.75, 0.95}) {
        for (std::size_t n : {2u, 3u, 64u, 1000u, 4096u}) {
            const auto plan = build_plan(CovarianceModel::fgn(h), n);
            CHECK(plan.embedding_size >= 2 * (n - 1));
            const double top = *std::max_element(plan.eigenvalues.begin(), plan.eigenvalues.end());
            CHECK(plan.most_negative >= -1e-10 * top);
            for (double l : plan.eigenvalues) CHECK(l >= 0.0);
        }
    }
}

TEST_CASE("non positive definite covariance raises") {
    const auto bad = CovarianceModel::explicit_values({1.0, 0.9, -0.9}, std::nullopt, true);
    try {
        build_plan(bad, 16);
        FAIL("expected EmbeddingError");
    } catch (const EmbeddingError& e) {
        CHECK(e.most_negative() < 0.0);
        CHECK(e.embedding_size() >= 32);
    }
}

TEST_CASE("short explicit covariance cannot embed long paths") {
    const auto m = CovarianceModel::explicit_values({1.0, 0.3, 0.1});
    CHECK_THROWS_AS(build_plan(m, 100), OutOfRangeError);
}

TEST_CASE("paths are pure functions of seed and replicate") {
    const auto plan = build_plan(CovarianceModel::fgn(0.7), 100);
    const auto a = sample_path(plan, 42, 3);
    const auto b = sample_path(plan, 42, 3);
    CHECK(a.values == b.values);
    CHECK(sample_path(plan, 42, 4).values != a.values);
    CHECK(sample_path(plan, 43, 3).values != a.values);

    const auto e1 = sample_ensemble(plan, 42, 9, 1);
    const auto e4 = sample_ensemble(plan, 42, 9, 4);
    REQUIRE(e1.paths.size() == 9);
    for (std::size_t r = 0; r < 9; ++r) {
        CHECK(e1.paths[r].values == e4.paths[r].values);
        CHECK(e1.paths[r].replicate == r);
    }
    CHECK(e1.paths[3].values == a.values);
}

TEST_CASE("streams of different domains differ") {
    auto a = make_stream(5, 0, kPathDomain);
    auto b = make_stream(5, 0, kReferenceDomain);
    CHECK(a() != b());
    auto c = make_stream(5, 1);
    auto d = make_stream(5, 1);
    CHECK(c() == d());
}

TEST_CASE("white noise paths have unit variance and no correlation") {
    const auto plan = build_plan(CovarianceModel::white_noise(), 32);
    const std::size_t M = 4000;
    std::vector<double> var(32, 0.0), lag1(31, 0.0);
    for (std::size_t r = 0; r < M; ++r) {
        const auto p = sample_path(plan, 11, r);
        for (std::size_t k = 0; k < 32; ++k) var[k] += p.values[k] * p.values[k] / M;
        for (std::size_t k = 0; k + 1 < 32; ++k) lag1[k] += p.values[k] * p.values[k + 1] / M;
    }
    double mv = 0.0, ml = 0.0;
    for (double v : var) mv += v / 32;
    for (double v : lag1) ml += v / 31;
    // means of 32 (31) estimates, each with standard error about sqrt(2/M) (1/sqrt(M))
    CHECK(std::abs(mv - 1.0) < 5.0 * std::sqrt(2.0 / M / 32));
    CHECK(std::abs(ml) < 5.0 / std::sqrt(double(M) * 31));
}

TEST_CASE("path csv layout") {
    const auto plan = build_plan(CovarianceModel::fgn(0.6), 3);
    std::ostringstream os;
    write_paths_csv(os, sample_ensemble(plan, 9, 2));
    const auto text = os.str();
    CHECK(text.rfind("seed,replicate,n,Z_0,Z_1,Z_2\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 3);
    CHECK(text.find("\n9,1,3,") != std::string::npos);
}
