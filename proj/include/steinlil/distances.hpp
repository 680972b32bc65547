#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace steinlil {

enum class DistanceKind { Kolmogorov1d, KolmogorovMultid, WassersteinSorted, WassersteinAssignment };

std::string to_string(DistanceKind kind);

struct DistanceReport {
    DistanceKind kind = DistanceKind::Kolmogorov1d;
    double value = 0.0;
    int d = 1;
    std::size_t m = 0;            // size of the first sample
    std::size_t m_reference = 0;  // size of the second sample (0 for an exact law)
    double std_error = 0.0;
    bool exact = true;            // exact for the empirical measures involved
};

/// {kind, d, value, m, std_error, exact}
std::string to_json(const DistanceReport& report);

/// Row-major cloud of `size()` points in R^d.
class PointCloud {
public:
    PointCloud(int d, std::vector<double> coords);
    static PointCloud from_rows(const std::vector<std::vector<double>>& rows);

    int dim() const noexcept { return d_; }
    std::size_t size() const noexcept { return coords_.size() / static_cast<std::size_t>(d_); }
    std::span<const double> point(std::size_t i) const {
        return std::span<const double>(coords_).subspan(i * static_cast<std::size_t>(d_), static_cast<std::size_t>(d_));
    }
    double at(std::size_t i, int axis) const { return coords_[i * static_cast<std::size_t>(d_) + static_cast<std::size_t>(axis)]; }
    const std::vector<double>& coords() const noexcept { return coords_; }

private:
    int d_;
    std::vector<double> coords_;
};

/// sup_t |F_m(t) - Phi(t)| for the right-continuous ECDF, checking both
/// one-sided limits at every sample point. The standard error is the
/// binomial one of the ECDF at the maximiser.
DistanceReport kolmogorov_1d_vs_gaussian(std::span<const double> sample);

struct AnchorPolicy {
    enum class Mode { FullGrid, Subsample };
    Mode mode = Mode::FullGrid;
    std::size_t anchors_per_axis = 64;  // Subsample only
    std::size_t max_cells = std::size_t{1} << 31;

    static AnchorPolicy full_grid() { return {}; }
    static AnchorPolicy subsample(std::size_t per_axis = 64) { return {Mode::Subsample, per_axis}; }
};

/// Two-sample Kolmogorov distance over lower-left orthants
/// (-inf, t_1] x ... x (-inf, t_d], anchored at the pooled per-axis
/// coordinates. Exact for the empirical measures under the full grid;
/// flagged approximate when anchors are subsampled. The full grid is
/// refused for d > 4.
DistanceReport kolmogorov_multid(const PointCloud& x, const PointCloud& y,
                                 const AnchorPolicy& policy = AnchorPolicy::full_grid());

/// Kolmogorov distance between the empirical law of `x` and the standard
/// Gaussian on R^d. On each grid cell the ECDF is constant while the
/// Gaussian orthant probability ranges between its values at the two
/// corners, so both corners are compared.
DistanceReport kolmogorov_multid_vs_gaussian(const PointCloud& x,
                                             const AnchorPolicy& policy = AnchorPolicy::full_grid());

/// ((1/m) sum |a_(i) - b_(i)|^theta)^(1/theta) on order statistics.
DistanceReport wasserstein_sorted(std::span<const double> a, std::span<const double> b, double theta);

struct Assignment {
    double total_cost = 0.0;
    std::vector<std::size_t> column_of_row;
};

/// Minimum-cost perfect matching of a dense m x m cost matrix (row-major)
/// by shortest augmenting paths with potentials.
Assignment solve_assignment(std::span<const double> cost, std::size_t m);

inline constexpr std::size_t kAssignmentCap = 2048;

/// Exact W_1 between two equal-size empirical measures with Euclidean cost.
DistanceReport wasserstein_assignment(const PointCloud& a, const PointCloud& b, std::size_t cost_cap = kAssignmentCap);

/// 3 (log(d+1))^{1/4} sqrt(w1).
double comparison_rhs(int d, double w1);

/// f(t) = phi(t) + t Phi(t).
double theta_recursion_step(double t);

/// b_1 = 1/sqrt(2 pi), b_{d+1} = f(b_d), for d = 1..dmax.
std::vector<double> theta_bound_sequence(std::size_t dmax);

/// c_theta = (E|G|^theta)^(1/theta) = (2^{theta/2} Gamma((theta+1)/2) / sqrt(pi))^(1/theta).
double gaussian_abs_moment(double theta);

/// D(d, theta) = c_theta d^{1-1/theta} for theta < 2, c_theta d^{1-2/theta} otherwise.
double stein_wasserstein_constant(int d, double theta);

/// D(d, theta) * moment_sum^(1/theta), where moment_sum = sum_ij E|tau_ij - delta_ij|^theta.
double stein_wasserstein_bound(int d, double theta, double moment_sum);

/// d_K <= E|tau - 1| in dimension one.
double stein_kolmogorov_bound(double abs_dev);

/// W_1 <= sqrt(sum_ij E[(tau_ij - delta_ij)^2]).
double stein_w1_bound(double second_moment_sum);

/// Standard normal CDF.
double normal_cdf(double x);

}  // namespace steinlil
