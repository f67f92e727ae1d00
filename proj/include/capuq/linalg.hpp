#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "capuq/rng.hpp"

namespace capuq {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

namespace linalg {

/// Truncated SVD of a samples-by-features data matrix X. W holds the first k
/// right singular vectors (features x k), so a sample row x projects as x * W.
struct SvdBasis {
    Eigen::Index k = 0;
    /// Computed singular values, non-increasing. The exact path keeps all
    /// min(rows, cols) of them; the randomized path keeps the top k.
    Vector singular_values;
    /// features x k, columns pairwise orthonormal.
    Matrix W;
    /// sqrt(|X|_F^2 - sum_{j<=k} sigma_j^2): the norm-degradation budget of
    /// the truncated projection.
    double tail_energy = 0.0;
};

enum class SvdMethod { Auto, Exact, Randomized };

struct SvdOptions {
    Eigen::Index oversample = 8;
    int power_iterations = 2;
    SvdMethod method = SvdMethod::Auto;
    std::uint64_t seed = 0;
    /// Auto picks the exact Gram-matrix path when min(rows, cols) is at or
    /// below this, randomized subspace iteration otherwise.
    Eigen::Index exact_limit = 512;
};

/// Checked matrix product. Throws ValidationError on inner-dimension mismatch.
Matrix matmul(const Matrix& a, const Matrix& b);

SvdBasis truncated_svd(const Matrix& x, Eigen::Index k, const SvdOptions& opts = {});

/// Appendix-style norm bracket for one sample: returns
/// (|x| - tail_energy, |x|); the projected norm |xW| lies within it.
std::pair<double, double> norm_preservation_bound(const SvdBasis& basis, const Vector& x);

/// tail_energy scaled by sample_count^(-1/4): the expected norm degradation
/// under a Gaussian model of the left singular vector entries.
double expected_norm_degradation(const SvdBasis& basis, Eigen::Index sample_count);

/// Persistent left/right vectors for power iteration; owned by one trainer.
struct PowerIterState {
    Vector u;  // rows(W)
    Vector v;  // cols(W)
    bool initialized = false;

    void init(Eigen::Index rows, Eigen::Index cols, Rng& rng);
};

/// Estimate of the largest singular value of W, refining `state` in place.
/// A zero matrix yields 0.
double spectral_norm_power_iteration(const Matrix& w, PowerIterState& state, int iters);

/// Seeded sample of distinct row pairs (i < j); fraction 1 yields all pairs
/// in canonical order.
std::vector<std::pair<Eigen::Index, Eigen::Index>> sample_pair_indices(
    Eigen::Index n_rows, double pair_fraction, std::uint64_t seed);

/// Euclidean distances between the given row pairs of X.
Vector row_pair_distances(const Matrix& x,
                          const std::vector<std::pair<Eigen::Index, Eigen::Index>>& pairs);

/// Distances over a seeded random subset of row pairs.
Vector pairwise_distances(const Matrix& x, double pair_fraction, std::uint64_t seed);

/// Pearson r. Throws ValidationError on length mismatch, length < 2, or zero
/// variance in either argument.
double pearson_correlation(const Vector& a, const Vector& b);

/// Spearman rank correlation (average ranks for ties).
double spearman_correlation(const Vector& a, const Vector& b);

}  // namespace linalg
}  // namespace capuq
