#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace steinlil {

/// Hurst index of a fractional Brownian motion, strictly inside (0, 1).
class HurstParam {
public:
    explicit HurstParam(double value);
    double value() const noexcept { return value_; }

private:
    double value_;
};

/// Order q >= 1 of a Hermite polynomial / Wiener chaos.
class ChaosOrder {
public:
    explicit ChaosOrder(int q);
    int value() const noexcept { return q_; }

private:
    int q_;
};

struct FgnIncrements {
    HurstParam hurst;
};

struct WhiteNoise {};

/// Autocovariance given lag by lag from lag 0.
///
/// Beyond the stored lags the model either extrapolates with a power law
/// rho(k) = rho(K-1) * ((K-1)/k)^tail_exponent, or returns 0 when
/// `zero_beyond` is set. With neither, out-of-range lags raise.
struct ExplicitCovariance {
    std::vector<double> values;
    std::optional<double> tail_exponent;
    bool zero_beyond = false;
};

/// Power-law envelope |rho(k)| <= amplitude * k^-exponent for k >= from_lag.
struct TailEnvelope {
    double amplitude;
    double exponent;
    std::uint64_t from_lag;
};

/// Autocovariance of a centred, unit-variance stationary Gaussian sequence.
class CovarianceModel {
public:
    using Variant = std::variant<FgnIncrements, WhiteNoise, ExplicitCovariance>;

    static CovarianceModel fgn(double hurst);
    static CovarianceModel white_noise();
    static CovarianceModel explicit_values(std::vector<double> values,
                                           std::optional<double> tail_exponent = std::nullopt,
                                           bool zero_beyond = false);

    /// rho(k); symmetric in k.
    double rho(std::int64_t k) const;

    /// Largest lag for which rho is defined, or nullopt when unbounded.
    std::optional<std::uint64_t> max_lag() const;

    /// Envelope valid for the tail, or nullopt when rho vanishes eventually
    /// (white noise, zero-filled explicit lists).
    std::optional<TailEnvelope> tail_envelope() const;

    /// Short stable identifier, e.g. "fgn(H=0.75)".
    std::string id() const;

    const Variant& variant() const noexcept { return model_; }
    bool is_fgn() const noexcept { return std::holds_alternative<FgnIncrements>(model_); }
    bool is_white_noise() const noexcept { return std::holds_alternative<WhiteNoise>(model_); }
    /// Hurst index for fGn models; throws DomainError otherwise.
    double hurst() const;

private:
    explicit CovarianceModel(Variant v) : model_(std::move(v)) {}
    Variant model_;
};

/// rho_H(k) = (|k+1|^{2H} - 2|k|^{2H} + |k-1|^{2H}) / 2.
///
/// Small lags use the second difference in extended precision. Larger lags
/// use the binomial series of k^{2H}((1+1/k)^{2H} + (1-1/k)^{2H} - 2)/2,
/// which avoids the cancellation and keeps about 1e-13 relative accuracy.
double fgn_autocovariance(HurstParam hurst, std::uint64_t k);

/// Leading term of rho_H(k)^q at the critical index H = 1 - 1/(2q):
/// ((1 - 1/(2q))(1 - 1/q))^q / k.
double fgn_autocovariance_asymptotic(ChaosOrder q, std::uint64_t k);

/// Cov(H_q(Z_0), H_q(Z_k)) = q! rho(k)^q.
double subordinated_autocovariance(const CovarianceModel& model, ChaosOrder q, std::int64_t k);

/// E[X_n^2] for X_n = sum_{k<n} H_q(Z_k), via q! sum_{|r|<n} (n-|r|) rho(r)^q.
double partial_sum_variance(const CovarianceModel& model, ChaosOrder q, std::uint64_t n);

/// E[X_1^2], ..., E[X_N^2] in a single O(N) pass (element i is n = i+1).
std::vector<double> partial_sum_variance_sequence(const CovarianceModel& model, ChaosOrder q,
                                                  std::uint64_t n_max);

/// q! sum_{k in [a0,a1)} sum_{l in [b0,b1)} rho(l-k)^q.
double block_cross_covariance(const CovarianceModel& model, ChaosOrder q, std::uint64_t a0,
                              std::uint64_t a1, std::uint64_t b0, std::uint64_t b1);

struct SeriesValue {
    double value;           // sum truncated at 2K
    double coarse_value;    // sum truncated at K
    std::uint64_t truncation;  // K
    double tail_bound;      // analytic bound on the neglected tail beyond K
};

/// Breuer-Major variance sigma_q^2 = q! sum_{r in Z} rho(r)^q.
///
/// K is the smallest power of two for which the integral tail bound of the
/// model's envelope falls below tol/2; the sum is evaluated at K and 2K and
/// the two are required to agree within tol.
SeriesValue breuer_major_sigma2(const CovarianceModel& model, ChaosOrder q, double tol = 1e-10);

/// Whether sum |rho|^q converges for this model.
bool breuer_major_regime(const CovarianceModel& model, ChaosOrder q);

/// c_q = 2 q! ((1 - 1/(2q))(1 - 1/q))^q, with E[X_n^2] ~ c_q n log n at the
/// critical Hurst index. Requires q >= 2.
double critical_variance_constant(ChaosOrder q);

/// The critical Hurst index 1 - 1/(2q).
double critical_hurst(ChaosOrder q) noexcept;

double factorial(int q) noexcept;

}  // namespace steinlil
