#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "steinlil/covariance.hpp"

namespace steinlil {

/// Circulant embedding of the n x n Toeplitz covariance of `model`.
struct SamplerPlan {
    CovarianceModel model;
    std::size_t n = 0;
    std::size_t embedding_size = 0;
    /// Spectrum of the circulant, length embedding_size, clipped to >= 0.
    std::vector<double> eigenvalues;
    /// Most negative raw eigenvalue before clipping (0 if none).
    double most_negative = 0.0;
};

struct GaussianPath {
    std::vector<double> values;
    std::string model_id;
    std::uint64_t seed = 0;
    std::uint64_t replicate = 0;
};

struct PathEnsemble {
    std::vector<GaussianPath> paths;
};

inline constexpr double kDefaultClipTolerance = 1e-10;

/// Builds the circulant embedding of order the smallest power of two
/// >= 2(n-1). Eigenvalues in [-clip_tol*max, 0) are set to zero; a more
/// negative one doubles the embedding once, then raises EmbeddingError.
SamplerPlan build_plan(const CovarianceModel& model, std::size_t n,
                       double clip_tol = kDefaultClipTolerance);

/// Random engine for (seed, stream). The state is a pure function of both
/// arguments, so replicates can be generated in any order or concurrently.
std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream);

/// Domain tags keep the engines of unrelated consumers apart.
inline constexpr std::uint64_t kPathDomain = 0x7061746873ULL;      // "paths"
inline constexpr std::uint64_t kReferenceDomain = 0x676175737331ULL;  // reference Gaussian draws
std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream, std::uint64_t domain);

/// Writes one path into `out` (size plan.n).
void sample_into(const SamplerPlan& plan, std::uint64_t seed, std::uint64_t replicate, std::span<double> out);

GaussianPath sample_path(const SamplerPlan& plan, std::uint64_t seed, std::uint64_t replicate);

PathEnsemble sample_ensemble(const SamplerPlan& plan, std::uint64_t seed, std::size_t replicates,
                             unsigned threads = 1);

/// CSV dump: header `seed,replicate,n,Z_0,...,Z_{n-1}`, then one row per path.
void write_paths_csv(std::ostream& os, const PathEnsemble& ensemble);

}  // namespace steinlil
