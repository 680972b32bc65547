#include "steinlil/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "steinlil/error.hpp"
#include "summation.hpp"

namespace steinlil {

namespace {

constexpr std::uint64_t kSeriesSwitchLag = 16;
constexpr std::uint64_t kMaxTruncation = std::uint64_t{1} << 27;

double int_pow(double x, int q) {
    double r = 1.0;
    for (int i = 0; i < q; ++i) r *= x;
    return r;
}

}  // namespace

HurstParam::HurstParam(double value) : value_(value) {
    if (!(value > 0.0 && value < 1.0)) {
        throw DomainError("Hurst index must lie in (0,1), got " + std::to_string(value));
    }
}

ChaosOrder::ChaosOrder(int q) : q_(q) {
    if (q < 1) throw DomainError("chaos order must be >= 1, got " + std::to_string(q));
}

double factorial(int q) noexcept {
    double r = 1.0;
    for (int i = 2; i <= q; ++i) r *= i;
    return r;
}

double critical_hurst(ChaosOrder q) noexcept { return 1.0 - 1.0 / (2.0 * q.value()); }

double fgn_autocovariance(HurstParam hurst, std::uint64_t k) {
    const double a = 2.0 * hurst.value();
    if (k < kSeriesSwitchLag) {
        const long double kl = static_cast<long double>(k);
        const long double al = a;
        const long double lower = k == 0 ? 1.0L : std::pow(kl - 1.0L, al);
        const long double mid = k == 0 ? 0.0L : std::pow(kl, al);
        return static_cast<double>(0.5L * (std::pow(kl + 1.0L, al) - 2.0L * mid + lower));
    }
    // k^a * sum_{j>=1} binom(a, 2j) k^{-2j}
    const double kd = static_cast<double>(k);
    const double inv_k2 = 1.0 / (kd * kd);
    double binom = a * (a - 1.0) / 2.0;  // binom(a, 2)
    double power = std::pow(kd, a - 2.0);
    double sum = binom * power;
    for (int m = 3; m <= 60; m += 2) {
        binom *= (a - m + 1.0) / m;
        binom *= (a - m) / (m + 1.0);
        power *= inv_k2;
        const double term = binom * power;
        sum += term;
        if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

double fgn_autocovariance_asymptotic(ChaosOrder q, std::uint64_t k) {
    if (k == 0) throw DomainError("asymptotic autocovariance requires k >= 1");
    const double qd = q.value();
    const double base = (1.0 - 1.0 / (2.0 * qd)) * (1.0 - 1.0 / qd);
    return int_pow(base, q.value()) / static_cast<double>(k);
}

CovarianceModel CovarianceModel::fgn(double hurst) {
    return CovarianceModel(FgnIncrements{HurstParam(hurst)});
}

CovarianceModel CovarianceModel::white_noise() { return CovarianceModel(WhiteNoise{}); }

CovarianceModel CovarianceModel::explicit_values(std::vector<double> values,
                                                 std::optional<double> tail_exponent,
                                                 bool zero_beyond) {
    if (values.empty()) throw DomainError("explicit covariance needs at least rho(0)");
    if (std::abs(values[0] - 1.0) > 1e-12) throw DomainError("explicit covariance requires rho(0) = 1");
    values[0] = 1.0;
    for (std::size_t k = 1; k < values.size(); ++k) {
        if (!(std::abs(values[k]) <= 1.0)) {
            throw DomainError("explicit covariance requires |rho(k)| <= 1 at lag " + std::to_string(k));
        }
    }
    if (tail_exponent) {
        if (!(*tail_exponent > 0.0)) throw DomainError("tail exponent must be positive");
        if (values.size() < 2) throw DomainError("tail extrapolation needs rho(1)");
        if (zero_beyond) throw DomainError("tail exponent and zero fill are mutually exclusive");
    }
    return CovarianceModel(ExplicitCovariance{std::move(values), tail_exponent, zero_beyond});
}

double CovarianceModel::rho(std::int64_t k) const {
    const std::uint64_t lag = static_cast<std::uint64_t>(k < 0 ? -k : k);
    return std::visit(
        [lag](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, FgnIncrements>) {
                return fgn_autocovariance(m.hurst, lag);
            } else if constexpr (std::is_same_v<T, WhiteNoise>) {
                return lag == 0 ? 1.0 : 0.0;
            } else {
                if (lag < m.values.size()) return m.values[lag];
                if (m.tail_exponent) {
                    const double last = static_cast<double>(m.values.size() - 1);
                    return m.values.back() * std::pow(last / static_cast<double>(lag), *m.tail_exponent);
                }
                if (m.zero_beyond) return 0.0;
                throw OutOfRangeError("lag " + std::to_string(lag) + " beyond the " +
                                      std::to_string(m.values.size()) + " stored autocovariances");
            }
        },
        model_);
}

std::optional<std::uint64_t> CovarianceModel::max_lag() const {
    if (const auto* e = std::get_if<ExplicitCovariance>(&model_)) {
        if (!e->tail_exponent && !e->zero_beyond) return e->values.size() - 1;
    }
    return std::nullopt;
}

std::optional<TailEnvelope> CovarianceModel::tail_envelope() const {
    if (const auto* f = std::get_if<FgnIncrements>(&model_)) {
        const double h = f->hurst.value();
        // |rho(k)| = H|2H-1| k^{2H-2} (1 + O(k^-2)); the O(k^-2) correction is
        // below 0.5% from lag 16 on.
        return TailEnvelope{1.05 * h * std::abs(2.0 * h - 1.0), 2.0 - 2.0 * h, kSeriesSwitchLag};
    }
    if (const auto* e = std::get_if<ExplicitCovariance>(&model_)) {
        if (e->tail_exponent) {
            const double last = static_cast<double>(e->values.size() - 1);
            return TailEnvelope{std::abs(e->values.back()) * std::pow(last, *e->tail_exponent),
                                *e->tail_exponent, e->values.size() - 1};
        }
    }
    return std::nullopt;
}

std::string CovarianceModel::id() const {
    std::ostringstream os;
    os.precision(17);
    std::visit(
        [&os](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, FgnIncrements>) {
                os << "fgn(H=" << m.hurst.value() << ")";
            } else if constexpr (std::is_same_v<T, WhiteNoise>) {
                os << "white";
            } else {
                os << "explicit(lags=" << m.values.size();
                if (m.tail_exponent) os << ",tail=" << *m.tail_exponent;
                if (m.zero_beyond) os << ",zero-fill";
                os << ")";
            }
        },
        model_);
    return os.str();
}

double CovarianceModel::hurst() const {
    if (const auto* f = std::get_if<FgnIncrements>(&model_)) return f->hurst.value();
    throw DomainError("model " + id() + " has no Hurst index");
}

double subordinated_autocovariance(const CovarianceModel& model, ChaosOrder q, std::int64_t k) {
    return factorial(q.value()) * int_pow(model.rho(k), q.value());
}

double partial_sum_variance(const CovarianceModel& model, ChaosOrder q, std::uint64_t n) {
    if (n == 0) throw DomainError("partial_sum_variance requires n >= 1");
    if (model.is_white_noise()) return factorial(q.value()) * static_cast<double>(n);
    detail::NeumaierSum sum;
    sum.add(static_cast<double>(n));
    for (std::uint64_t r = 1; r < n; ++r) {
        sum.add(2.0 * static_cast<double>(n - r) * int_pow(model.rho(static_cast<std::int64_t>(r)), q.value()));
    }
    return factorial(q.value()) * sum.value();
}

std::vector<double> partial_sum_variance_sequence(const CovarianceModel& model, ChaosOrder q,
                                                  std::uint64_t n_max) {
    std::vector<double> out;
    out.reserve(n_max);
    const double qf = factorial(q.value());
    detail::NeumaierSum variance;  // E[X_n^2] / q!
    detail::NeumaierSum lag_sum;   // sum_{r=1}^{n} rho(r)^q
    for (std::uint64_t n = 1; n <= n_max; ++n) {
        // E[X_n^2] = E[X_{n-1}^2] + q! (1 + 2 sum_{r=1}^{n-1} rho(r)^q)
        variance.add(1.0 + 2.0 * lag_sum.value());
        out.push_back(qf * variance.value());
        if (n < n_max) lag_sum.add(int_pow(model.rho(static_cast<std::int64_t>(n)), q.value()));
    }
    return out;
}

double block_cross_covariance(const CovarianceModel& model, ChaosOrder q, std::uint64_t a0,
                              std::uint64_t a1, std::uint64_t b0, std::uint64_t b1) {
    if (a1 <= a0 || b1 <= b0) throw DomainError("blocks must be nonempty half-open ranges");
    const auto sa0 = static_cast<std::int64_t>(a0), sa1 = static_cast<std::int64_t>(a1);
    const auto sb0 = static_cast<std::int64_t>(b0), sb1 = static_cast<std::int64_t>(b1);
    detail::NeumaierSum sum;
    for (std::int64_t r = sb0 - (sa1 - 1); r <= (sb1 - 1) - sa0; ++r) {
        const std::int64_t count = std::min(sa1, sb1 - r) - std::max(sa0, sb0 - r);
        if (count <= 0) continue;
        sum.add(static_cast<double>(count) * int_pow(model.rho(r), q.value()));
    }
    return factorial(q.value()) * sum.value();
}

bool breuer_major_regime(const CovarianceModel& model, ChaosOrder q) {
    if (model.is_white_noise()) return true;
    if (model.is_fgn()) {
        const double h = model.hurst();
        return h == 0.5 || q.value() * (2.0 - 2.0 * h) > 1.0;
    }
    const auto& e = std::get<ExplicitCovariance>(model.variant());
    if (e.zero_beyond) return true;
    if (e.tail_exponent) return q.value() * *e.tail_exponent > 1.0;
    return false;
}

SeriesValue breuer_major_sigma2(const CovarianceModel& model, ChaosOrder q, double tol) {
    if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
    if (!breuer_major_regime(model, q)) {
        throw RegimeError("sum of |rho(k)|^q diverges (or is undefined) for " + model.id() +
                          " at q=" + std::to_string(q.value()));
    }
    const double qf = factorial(q.value());
    const auto envelope = model.tail_envelope();
    if (!envelope || envelope->amplitude == 0.0) {
        // rho vanishes beyond a finite lag: the sum is finite and exact
        std::uint64_t last = 0;
        if (const auto* e = std::get_if<ExplicitCovariance>(&model.variant())) last = e->values.size() - 1;
        if (model.is_fgn()) last = 0;  // H = 1/2
        detail::NeumaierSum sum;
        sum.add(1.0);
        for (std::uint64_t k = 1; k <= last; ++k) sum.add(2.0 * int_pow(model.rho(static_cast<std::int64_t>(k)), q.value()));
        const double v = qf * sum.value();
        return SeriesValue{v, v, last, 0.0};
    }

    const double decay = q.value() * envelope->exponent;  // > 1 in this regime
    const double amp = std::pow(envelope->amplitude, q.value());
    auto tail_bound = [&](double k) { return 2.0 * qf * amp * std::pow(k, 1.0 - decay) / (decay - 1.0); };

    std::uint64_t k_trunc = 16;
    while (k_trunc < envelope->from_lag) k_trunc *= 2;
    while (tail_bound(static_cast<double>(k_trunc)) > tol / 2.0) {
        k_trunc *= 2;
        if (k_trunc > kMaxTruncation) {
            throw RegimeError("series for sigma_q^2 converges too slowly to reach tol=" + std::to_string(tol) +
                              " within 2^27 lags for " + model.id());
        }
    }

    detail::NeumaierSum sum;
    sum.add(1.0);
    double coarse = 0.0;
    for (std::uint64_t k = 1; k <= 2 * k_trunc; ++k) {
        sum.add(2.0 * int_pow(model.rho(static_cast<std::int64_t>(k)), q.value()));
        if (k == k_trunc) coarse = qf * sum.value();
    }
    const double fine = qf * sum.value();
    if (std::abs(fine - coarse) > tol) {
        throw EvaluationError("sigma_q^2 truncations at K and 2K disagree beyond tol");
    }
    return SeriesValue{fine, coarse, k_trunc, tail_bound(static_cast<double>(k_trunc))};
}

double critical_variance_constant(ChaosOrder q) {
    if (q.value() < 2) throw RegimeError("q = 1 has no critical regime");
    const double qd = q.value();
    return 2.0 * factorial(q.value()) * int_pow((1.0 - 1.0 / (2.0 * qd)) * (1.0 - 1.0 / qd), q.value());
}

}  // namespace steinlil
