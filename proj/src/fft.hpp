#pragma once

#include <fftw3.h>

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace steinlil::detail {

struct FftwFree {
    void operator()(void* p) const noexcept { fftw_free(p); }
};

using RealBuffer = std::unique_ptr<double[], FftwFree>;
using ComplexBuffer = std::unique_ptr<fftw_complex[], FftwFree>;

RealBuffer alloc_real(std::size_t n);
ComplexBuffer alloc_complex(std::size_t n);

// Thin wrappers over cached FFTW plans. Plans are created once per size
// under a lock; execution is thread-safe and, for buffers obtained from
// alloc_*, deterministic.
void dft_forward(std::size_t n, fftw_complex* in, fftw_complex* out);
void dft_r2c(std::size_t n, double* in, fftw_complex* out);
// Unnormalised inverse; overwrites `in`.
void dft_c2r(std::size_t n, fftw_complex* in, double* out);

std::size_t next_pow2(std::size_t n);

// y = T x for the symmetric Toeplitz matrix T_{kl} = kernel[|k-l|] of
// order kernel.size(), through a circulant embedding of twice the size.
class ToeplitzOperator {
public:
    explicit ToeplitzOperator(std::span<const double> kernel);

    std::size_t order() const noexcept { return order_; }
    void apply(std::span<const double> x, std::span<double> y) const;
    // x^T T x
    double quadratic_form(std::span<const double> x) const;
    // x^T T y
    double bilinear_form(std::span<const double> x, std::span<const double> y) const;

private:
    std::size_t order_;
    std::size_t size_;
    std::vector<double> spectrum_;  // real eigenvalues / size_, length size_/2+1
};

}  // namespace steinlil::detail
