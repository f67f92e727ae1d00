#include "capuq/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "capuq/errors.hpp"

namespace capuq {
namespace linalg {

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw ValidationError("matmul: inner dimensions disagree (" +
                              std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + ")");
    }
    return a * b;
}

namespace {

void check_finite(const Matrix& x, const char* what) {
    if (!x.allFinite()) throw ValidationError(std::string(what) + ": non-finite input");
}

// Fix column signs so the largest-magnitude entry of each right singular
// vector is positive. Makes W reproducible across runs and methods.
void canonicalize_columns(Matrix& w) {
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
        Eigen::Index imax;
        w.col(j).cwiseAbs().maxCoeff(&imax);
        if (w(imax, j) < 0) w.col(j) = -w.col(j);
    }
}

// Full decomposition via the eigendecomposition of the smaller Gram matrix.
// Returns all min(rows, cols) singular values and right vectors.
void gram_svd(const Matrix& x, Vector& sigma, Matrix& v_full) {
    const Eigen::Index n = x.rows(), d = x.cols();
    if (d <= n) {
        Matrix gram = x.transpose() * x;  // d x d
        Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
        // Eigenvalues come back ascending; flip to non-increasing.
        sigma = eig.eigenvalues().reverse().cwiseMax(0.0).cwiseSqrt();
        v_full = eig.eigenvectors().rowwise().reverse();
    } else {
        Matrix gram = x * x.transpose();  // n x n
        Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
        sigma = eig.eigenvalues().reverse().cwiseMax(0.0).cwiseSqrt();
        Matrix u = eig.eigenvectors().rowwise().reverse();
        // V = X^T U Sigma^{-1} column by column; zero sigma leaves a zero column.
        v_full.resize(d, sigma.size());
        for (Eigen::Index j = 0; j < sigma.size(); ++j) {
            if (sigma[j] > 1e-300) {
                v_full.col(j) = x.transpose() * u.col(j) / sigma[j];
            } else {
                v_full.col(j).setZero();
            }
        }
    }
}

// Randomized subspace iteration (Halko et al. style): sketch, a few power
// iterations with QR re-orthonormalization, then an exact SVD of the small
// projected matrix. Cost O(n d (k + b)) per pass.
void randomized_svd(const Matrix& x, Eigen::Index k, const SvdOptions& opts,
                    Vector& sigma, Matrix& v_top) {
    const Eigen::Index n = x.rows(), d = x.cols();
    const Eigen::Index ell = std::min<Eigen::Index>(k + opts.oversample, std::min(n, d));
    Rng rng(opts.seed);
    Matrix omega = rng.normal_matrix(d, ell);
    Matrix y = x * omega;  // n x ell
    Eigen::HouseholderQR<Matrix> qr(y);
    Matrix q = qr.householderQ() * Matrix::Identity(n, ell);
    for (int it = 0; it < opts.power_iterations; ++it) {
        Matrix z = x.transpose() * q;  // d x ell
        Eigen::HouseholderQR<Matrix> qrz(z);
        z = qrz.householderQ() * Matrix::Identity(d, ell);
        y = x * z;
        Eigen::HouseholderQR<Matrix> qry(y);
        q = qry.householderQ() * Matrix::Identity(n, ell);
    }
    Matrix b = q.transpose() * x;  // ell x d
    Eigen::JacobiSVD<Matrix> svd(b, Eigen::ComputeThinV);
    sigma = svd.singularValues().head(std::min(ell, svd.singularValues().size()));
    v_top = svd.matrixV().leftCols(sigma.size());
}

}  // namespace

SvdBasis truncated_svd(const Matrix& x, Eigen::Index k, const SvdOptions& opts) {
    check_finite(x, "truncated_svd");
    const Eigen::Index n = x.rows(), d = x.cols();
    if (k < 1 || k > std::min(n, d)) {
        throw ValidationError("truncated_svd: k=" + std::to_string(k) +
                              " out of range for " + std::to_string(n) + "x" + std::to_string(d));
    }
    SvdMethod method = opts.method;
    if (method == SvdMethod::Auto) {
        method = std::min(n, d) <= opts.exact_limit ? SvdMethod::Exact : SvdMethod::Randomized;
    }

    SvdBasis basis;
    basis.k = k;
    Matrix v;
    if (method == SvdMethod::Exact) {
        gram_svd(x, basis.singular_values, v);
    } else {
        randomized_svd(x, k, opts, basis.singular_values, v);
    }
    basis.W = v.leftCols(k);
    canonicalize_columns(basis.W);

    const double frob2 = x.squaredNorm();
    const double head2 = basis.singular_values.head(k).squaredNorm();
    basis.tail_energy = std::sqrt(std::max(0.0, frob2 - head2));
    return basis;
}

std::pair<double, double> norm_preservation_bound(const SvdBasis& basis, const Vector& x) {
    if (x.size() != basis.W.rows()) {
        throw ValidationError("norm_preservation_bound: sample has dimension " +
                              std::to_string(x.size()) + ", basis expects " +
                              std::to_string(basis.W.rows()));
    }
    const double norm = x.norm();
    return {norm - basis.tail_energy, norm};
}

double expected_norm_degradation(const SvdBasis& basis, Eigen::Index sample_count) {
    if (sample_count < 1) throw ValidationError("expected_norm_degradation: sample_count < 1");
    return basis.tail_energy * std::pow(static_cast<double>(sample_count), -0.25);
}

void PowerIterState::init(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
    u = rng.normal_vector(rows);
    v = rng.normal_vector(cols);
    u.normalize();
    v.normalize();
    initialized = true;
}

double spectral_norm_power_iteration(const Matrix& w, PowerIterState& state, int iters) {
    if (!state.initialized || state.u.size() != w.rows() || state.v.size() != w.cols()) {
        throw ValidationError("spectral_norm_power_iteration: state not initialized for shape");
    }
    if (iters < 1) throw ValidationError("spectral_norm_power_iteration: iters < 1");
    double sigma = 0.0;
    for (int it = 0; it < iters; ++it) {
        Vector wu = w.transpose() * state.u;
        double nv = wu.norm();
        if (nv == 0.0) return 0.0;
        state.v = wu / nv;
        Vector wv = w * state.v;
        double nu = wv.norm();
        if (nu == 0.0) return 0.0;
        state.u = wv / nu;
        sigma = state.u.dot(w * state.v);
    }
    return sigma;
}

std::vector<std::pair<Eigen::Index, Eigen::Index>> sample_pair_indices(
    Eigen::Index n_rows, double pair_fraction, std::uint64_t seed) {
    if (n_rows < 2) throw ValidationError("sample_pair_indices: fewer than 2 rows");
    if (!(pair_fraction > 0.0) || pair_fraction > 1.0) {
        throw ValidationError("sample_pair_indices: pair_fraction must be in (0, 1]");
    }
    const std::uint64_t total =
        static_cast<std::uint64_t>(n_rows) * static_cast<std::uint64_t>(n_rows - 1) / 2;

    auto unrank = [n_rows](std::uint64_t p) {
        // Pair p in the row-major upper triangle.
        std::uint64_t i = 0;
        std::uint64_t remaining = static_cast<std::uint64_t>(n_rows) - 1;
        while (p >= remaining) {
            p -= remaining;
            ++i;
            --remaining;
        }
        return std::make_pair(static_cast<Eigen::Index>(i),
                              static_cast<Eigen::Index>(i + 1 + p));
    };

    std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
    if (pair_fraction >= 1.0) {
        pairs.reserve(total);
        for (Eigen::Index i = 0; i < n_rows; ++i)
            for (Eigen::Index j = i + 1; j < n_rows; ++j) pairs.emplace_back(i, j);
        return pairs;
    }

    std::uint64_t want = static_cast<std::uint64_t>(std::llround(pair_fraction * total));
    want = std::max<std::uint64_t>(1, std::min(want, total));
    // Floyd's algorithm: uniform sample of `want` distinct pair ranks.
    std::vector<std::uint64_t> chosen;
    chosen.reserve(want);
    Rng rng(seed);
    for (std::uint64_t t = total - want; t < total; ++t) {
        std::uint64_t r = rng.uniform_index(t + 1);
        if (std::find(chosen.begin(), chosen.end(), r) != chosen.end()) r = t;
        chosen.push_back(r);
    }
    std::sort(chosen.begin(), chosen.end());
    pairs.reserve(want);
    for (std::uint64_t r : chosen) pairs.push_back(unrank(r));
    return pairs;
}

Vector row_pair_distances(const Matrix& x,
                          const std::vector<std::pair<Eigen::Index, Eigen::Index>>& pairs) {
    Vector out(static_cast<Eigen::Index>(pairs.size()));
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        out[static_cast<Eigen::Index>(p)] = (x.row(pairs[p].first) - x.row(pairs[p].second)).norm();
    }
    return out;
}

Vector pairwise_distances(const Matrix& x, double pair_fraction, std::uint64_t seed) {
    return row_pair_distances(x, sample_pair_indices(x.rows(), pair_fraction, seed));
}

double pearson_correlation(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) throw ValidationError("pearson_correlation: length mismatch");
    if (a.size() < 2) throw ValidationError("pearson_correlation: need at least 2 points");
    const double ma = a.mean(), mb = b.mean();
    const Vector da = a.array() - ma;
    const Vector db = b.array() - mb;
    const double va = da.squaredNorm(), vb = db.squaredNorm();
    if (va == 0.0 || vb == 0.0) {
        throw ValidationError("pearson_correlation: zero variance (degenerate diagnostic)");
    }
    return da.dot(db) / std::sqrt(va * vb);
}

namespace {

Vector ranks_with_ties(const Vector& v) {
    const Eigen::Index n = v.size();
    std::vector<Eigen::Index> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&v](Eigen::Index i, Eigen::Index j) { return v[i] < v[j]; });
    Vector ranks(n);
    Eigen::Index i = 0;
    while (i < n) {
        Eigen::Index j = i;
        while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (Eigen::Index t = i; t <= j; ++t) ranks[order[t]] = avg;
        i = j + 1;
    }
    return ranks;
}

}  // namespace

double spearman_correlation(const Vector& a, const Vector& b) {
    return pearson_correlation(ranks_with_ties(a), ranks_with_ties(b));
}

}  // namespace linalg
}  // namespace capuq
