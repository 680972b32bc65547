#include "fft.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <new>
#include <stdexcept>
#include <tuple>

#include "summation.hpp"

namespace steinlil::detail {

namespace {

enum class Kind { Forward, R2C, C2R };

class PlanCache {
public:
    ~PlanCache() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

    fftw_plan get(Kind kind, std::size_t n) {
        std::lock_guard lock(mutex_);
        const auto key = std::make_tuple(kind, n);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;
        const int size = static_cast<int>(n);
        auto cin = alloc_complex(n);
        auto cout = alloc_complex(n);
        auto rbuf = alloc_real(n);
        fftw_plan plan = nullptr;
        switch (kind) {
            case Kind::Forward:
                plan = fftw_plan_dft_1d(size, cin.get(), cout.get(), FFTW_FORWARD, FFTW_ESTIMATE);
                break;
            case Kind::R2C:
                plan = fftw_plan_dft_r2c_1d(size, rbuf.get(), cout.get(), FFTW_ESTIMATE);
                break;
            case Kind::C2R:
                plan = fftw_plan_dft_c2r_1d(size, cin.get(), rbuf.get(), FFTW_ESTIMATE);
                break;
        }
        if (plan == nullptr) throw std::runtime_error("FFTW planning failed");
        plans_.emplace(key, plan);
        return plan;
    }

private:
    std::mutex mutex_;
    std::map<std::tuple<Kind, std::size_t>, fftw_plan> plans_;
};

PlanCache& cache() {
    static PlanCache instance;
    return instance;
}

}  // namespace

RealBuffer alloc_real(std::size_t n) {
    auto* p = fftw_alloc_real(n);
    if (p == nullptr) throw std::bad_alloc();
    return RealBuffer(p);
}

ComplexBuffer alloc_complex(std::size_t n) {
    auto* p = fftw_alloc_complex(n);
    if (p == nullptr) throw std::bad_alloc();
    return ComplexBuffer(p);
}

void dft_forward(std::size_t n, fftw_complex* in, fftw_complex* out) {
    fftw_execute_dft(cache().get(Kind::Forward, n), in, out);
}

void dft_r2c(std::size_t n, double* in, fftw_complex* out) {
    fftw_execute_dft_r2c(cache().get(Kind::R2C, n), in, out);
}

void dft_c2r(std::size_t n, fftw_complex* in, double* out) {
    fftw_execute_dft_c2r(cache().get(Kind::C2R, n), in, out);
}

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

ToeplitzOperator::ToeplitzOperator(std::span<const double> kernel)
    : order_(kernel.size()), size_(next_pow2(2 * std::max<std::size_t>(kernel.size(), 1))) {
    auto row = alloc_real(size_);
    auto freq = alloc_complex(size_ / 2 + 1);
    for (std::size_t i = 0; i < size_; ++i) row[i] = 0.0;
    for (std::size_t k = 0; k < order_; ++k) row[k] = kernel[k];
    for (std::size_t k = 1; k < order_; ++k) row[size_ - k] = kernel[k];
    dft_r2c(size_, row.get(), freq.get());
    spectrum_.resize(size_ / 2 + 1);
    for (std::size_t j = 0; j < spectrum_.size(); ++j) spectrum_[j] = freq[j][0] / static_cast<double>(size_);
}

void ToeplitzOperator::apply(std::span<const double> x, std::span<double> y) const {
    if (x.size() != order_ || y.size() != order_) throw std::invalid_argument("Toeplitz operand size mismatch");
    auto buf = alloc_real(size_);
    auto freq = alloc_complex(size_ / 2 + 1);
    for (std::size_t i = 0; i < order_; ++i) buf[i] = x[i];
    for (std::size_t i = order_; i < size_; ++i) buf[i] = 0.0;
    dft_r2c(size_, buf.get(), freq.get());
    for (std::size_t j = 0; j < spectrum_.size(); ++j) {
        freq[j][0] *= spectrum_[j];
        freq[j][1] *= spectrum_[j];
    }
    dft_c2r(size_, freq.get(), buf.get());
    for (std::size_t i = 0; i < order_; ++i) y[i] = buf[i];
}

double ToeplitzOperator::quadratic_form(std::span<const double> x) const { return bilinear_form(x, x); }

double ToeplitzOperator::bilinear_form(std::span<const double> x, std::span<const double> y) const {
    std::vector<double> ty(order_);
    apply(y, ty);
    NeumaierSum sum;
    for (std::size_t i = 0; i < order_; ++i) sum.add(x[i] * ty[i]);
    return sum.value();
}

}  // namespace steinlil::detail
