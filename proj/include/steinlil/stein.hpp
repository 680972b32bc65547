#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "steinlil/hermite.hpp"
#include "steinlil/sampler.hpp"

namespace steinlil {

/// A centred, unit-variance law with a density supported on an interval.
struct DensitySpec {
    std::string name;
    std::function<double(double)> pdf;
    double lower = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();
    /// Optional exact sampler, used by simulation helpers.
    std::function<double(std::mt19937_64&)> draw;
};

/// Checks pdf >= 0 and the first three moments (1, 0, 1) by quadrature to
/// 1e-8, throwing DomainError otherwise.
DensitySpec make_density(std::string name, std::function<double(double)> pdf, double lower, double upper,
                         std::function<double(std::mt19937_64&)> draw = {});

DensitySpec standard_normal_density();
/// Uniform on [-sqrt 3, sqrt 3].
DensitySpec uniform_density();
/// Laplace with scale 1/sqrt 2.
DensitySpec laplace_density();

/// s(x) = int_x^inf y f(y) dy / f(x) inside the support, 0 outside.
/// The numerator is integrated on the short side of 0 (x >= 0: [x, upper),
/// x < 0: -(lower, x]) so that no cancellation occurs.
double stein_factor_density(const DensitySpec& density, double x);

/// (1/(n2-n1)) sum_{k=n1}^{n2-1} s(Z_k).
double iid_stein_aggregate(std::span<const double> draws, const DensitySpec& density, std::size_t n1,
                           std::size_t n2);

struct MomentEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    std::size_t n_samples = 0;
};

/// Sample mean with its standard error.
MomentEstimate mean_estimate(std::span<const double> samples);

struct SteinCell {
    int i = 0;
    int j = 0;
    MomentEstimate mean;           // E[A_ij]
    MomentEstimate second_moment;  // E[(A_ij - delta_ij)^2]
};

struct SteinMomentReport {
    int d = 0;
    double theta = 2.0;
    std::vector<SteinCell> cells;              // row-major d x d
    std::vector<MomentEstimate> theta_norms;   // ||A_ii - 1||_theta, i = 1..d
    MomentEstimate second_moment_sum;          // sum_ij E[(A_ij - delta_ij)^2]

    const SteinCell& cell(int i, int j) const { return cells[static_cast<std::size_t>(i * d + j)]; }
};

/// Summarises per-replicate d x d integrands (row-major, one vector each).
SteinMomentReport summarize_stein_matrices(const std::vector<std::vector<double>>& samples, int d,
                                           double theta = 2.0);

/// Monte Carlo moments of the chaos Stein-matrix integrand
/// A_ij = <DY_i, DY_j>/q of the blocking increment vector.
///
/// These are moments of A itself, not of E[A | Y]. By Jensen's inequality
/// E[(E[A|Y] - delta)^2] <= E[(A - delta)^2], so every bound checked on the
/// report also holds for the Stein matrix.
SteinMomentReport stein_matrix_moments_hermite(const SamplerPlan& plan, std::uint64_t seed, std::size_t replicates,
                                               const BlockingSubsequence& sub, const VariationSpec& spec,
                                               double theta = 2.0, unsigned threads = 1,
                                               const GammaOptions& options = {});

/// Polynomial test functions of degree <= 3 with exact gradients.
struct TestFunction {
    enum class Kind { Linear, Square, Cross, Cube };
    Kind kind;
    int j = 0;
    int k = 0;  // Cross only

    double value(std::span<const double> x) const;
    /// d/dx_m
    double partial(std::span<const double> x, int m) const;
    std::string name() const;
};

/// x_j, x_j^2, x_j^3 for every j and x_j x_k for j < k.
std::vector<TestFunction> polynomial_dictionary(int d);

struct Residual {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t n_samples = 0;

    bool within(double k_sigma = 4.0) const { return std::abs(value) <= k_sigma * std_error; }
};

/// Monte Carlo estimate of E[F_i g(F)] - sum_j E[tau_ij d_j g(F)].
///
/// `f` holds `count` rows of d values, `tau` holds `count` row-major d x d
/// matrices paired with them.
Residual stein_identity_residual(std::span<const double> f, std::span<const double> tau, int d, int i,
                                 const TestFunction& g);

/// (mean |tau - 1|^theta)^(1/theta).
double theta_norm_estimate(std::span<const double> tau, double theta);

/// Paired samples of a vector and its Stein-matrix integrand.
struct SteinSamples {
    int d = 1;
    std::size_t count = 0;
    std::vector<double> f;
    std::vector<double> tau;
};

/// F = (S_n + U)/sqrt(n) with S_n a Rademacher sum and U ~ Uniform[-1,1];
/// tau = (n - S_n U + (1 - U^2)/2)/n.
SteinSamples rademacher_smoothed_samples(std::size_t n, std::size_t count, std::uint64_t seed);

/// F = sum_{k<n} Z_k / sqrt(n) for i.i.d. Z_k ~ density; tau is the
/// aggregate of s(Z_k). Requires density.draw.
SteinSamples iid_density_samples(const DensitySpec& density, std::size_t n, std::size_t count, std::uint64_t seed);

std::string to_json(const SteinMomentReport& report);

}  // namespace steinlil
