#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "steinlil/config.hpp"
#include "steinlil/report.hpp"

namespace steinlil {

/// |E[X_n^2]/g(n)^2 - 1| by exact summation for n = 2^k, k in
/// [n_min_log2, n_max_log2]. fitted = |ratio - 1| log n, bounded by
/// variance_C at every scale. aux holds the ratio.
AuditReport run_variance_table(const ExperimentConfig& config);

/// Exact normalised cross-covariances of the blocks of the blocking
/// subsequence for m in [m_min, m_max]. Per m, fitted is the max over pairs
/// i < j of |value| (1 + log len_i); bounded by cross_C and stable within
/// stability_factor. With stein_replicates > 0 a second check reports
/// stein_w1_bound (1 + log len_1) per m, again stable.
AuditReport run_cross_covariance_audit(const ExperimentConfig& config);

/// Per n in n_list: d_K(X_n/g(n), N(0,1)) from `replicates` paths against
/// the estimate of E|Gamma_n - 1|, with k_sigma standard errors of slack;
/// for q >= 2, E|Gamma_n - 1| strictly decreasing in n.
AuditReport run_distance_decay(const ExperimentConfig& config);

/// Per d in d_list and repetition: two-sample d_K(Y, G) and exact W_1(Y, G)
/// between `samples` blocking increment vectors and as many standard
/// Gaussian vectors; pass when d_K <= comparison_rhs(d, W_1) +
/// comparison_slack in at least min_pass_fraction of the repetitions.
/// With stein_replicates > 0 also checks mean W_1 - k_sigma SE <=
/// stein_w1_bound.
AuditReport run_comparison_check(const ExperimentConfig& config);

struct LilPoint {
    std::uint64_t replicate = 0;
    std::uint64_t n = 0;
    double statistic = 0.0;  // X_n / psi(n)
    double record = 0.0;     // max over 16 <= k <= n of X_k / psi(k)
};

struct LilTrajectory {
    std::string model_id;
    int q = 1;
    Regime regime = Regime::Exact;
    std::string config;
    std::vector<std::pair<std::string, double>> candidates;
    std::vector<LilPoint> points;
};

/// Running records of X_n / (g(n) sqrt(2 log log n)) on a geometric grid
/// from 16 to lil_n_max. Display only: no verdict.
LilTrajectory run_lil_trajectory(const ExperimentConfig& config);

/// Columns: replicate,n,statistic,record.
void write_csv(std::ostream& os, const LilTrajectory& trajectory);
std::string to_json(const LilTrajectory& trajectory);

/// One check per assumption:
///   A1 variance        variance table
///   A2 gamma moments   (E(Gamma_n - 1)^{2p})^{1/2p} (1 + log n), p = 1, 2, 3, each stable
///   A3 theta exponent  lambda fitted from log ||Gamma - 1||_theta on log theta (info)
///   A4 cross-covariance and A4 stein w1 as in run_cross_covariance_audit
AuditReport run_assumption_audit(const ExperimentConfig& config);

}  // namespace steinlil
