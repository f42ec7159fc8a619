#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace spinforge {

using Complex = std::complex<double>;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

inline constexpr double pi = std::numbers::pi;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
public:
    using Error::Error;
};

// Thrown when a constraint system has no solution; carries the rank report.
class Infeasible : public Error {
public:
    Infeasible(const std::string& what, long rank, long rows, long cols, double residual)
        : Error(what), rank(rank), rows(rows), cols(cols), residual(residual) {}
    long rank, rows, cols;
    double residual;
};

namespace detail {

inline bool all_finite(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

inline double max_abs(const Mat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }
inline double max_abs(const CMat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace detail

struct RealSymTridiag {
    std::vector<double> diag;
    std::vector<double> offdiag;

    RealSymTridiag() = default;
    RealSymTridiag(std::vector<double> d, std::vector<double> o) : diag(std::move(d)), offdiag(std::move(o)) {}

    static RealSymTridiag zero_diagonal(const std::vector<double>& couplings) {
        return {std::vector<double>(couplings.size() + 1, 0.0), couplings};
    }

    std::size_t n() const { return diag.size(); }

    void validate() const {
        if (diag.empty()) throw InvalidInput("tridiagonal matrix needs at least one site");
        if (offdiag.size() + 1 != diag.size())
            throw InvalidInput("offdiag length must be n-1 (got " + std::to_string(offdiag.size()) + " for n=" +
                               std::to_string(diag.size()) + ")");
        if (!detail::all_finite(diag) || !detail::all_finite(offdiag))
            throw InvalidInput("tridiagonal matrix has non-finite entries");
    }

    Mat dense() const {
        const auto m = static_cast<Eigen::Index>(n());
        Mat h = Mat::Zero(m, m);
        for (Eigen::Index i = 0; i < m; ++i) h(i, i) = diag[i];
        for (Eigen::Index i = 0; i + 1 < m; ++i) h(i, i + 1) = h(i + 1, i) = offdiag[i];
        return h;
    }

    // Reads the band of a dense matrix; the caller is responsible for the off-band part.
    static RealSymTridiag from_dense(const Mat& h) {
        RealSymTridiag t;
        for (Eigen::Index i = 0; i < h.rows(); ++i) t.diag.push_back(h(i, i));
        for (Eigen::Index i = 0; i + 1 < h.rows(); ++i) t.offdiag.push_back(0.5 * (h(i, i + 1) + h(i + 1, i)));
        return t;
    }
};

struct Spectrum {
    std::vector<double> values;

    Spectrum() = default;
    explicit Spectrum(std::vector<double> v) : values(std::move(v)) {
        if (!detail::all_finite(values)) throw InvalidInput("spectrum has non-finite values");
        std::sort(values.begin(), values.end());
    }
    std::size_t size() const { return values.size(); }
};

struct Propagator {
    CMat u;
    double t = 0.0;
};

// Rows A p = b over a named parameter vector.
struct LinearConstraintSet {
    Mat a;
    Vec b;
    std::vector<std::string> row_labels;

    LinearConstraintSet() = default;
    explicit LinearConstraintSet(Eigen::Index params) : a(0, params), b(0) {}

    Eigen::Index rows() const { return a.rows(); }
    Eigen::Index params() const { return a.cols(); }

    double residual(const Vec& p) const { return rows() ? (a * p - b).cwiseAbs().maxCoeff() : 0.0; }
};

class ConstraintBuilder {
public:
    explicit ConstraintBuilder(Eigen::Index params) : params_(params) {}

    void add(const Vec& row, double rhs, std::string label = {}) {
        rows_.push_back(row);
        rhs_.push_back(rhs);
        labels_.push_back(std::move(label));
    }

    LinearConstraintSet build() const {
        LinearConstraintSet c(params_);
        c.a.resize(static_cast<Eigen::Index>(rows_.size()), params_);
        c.b.resize(static_cast<Eigen::Index>(rows_.size()));
        for (std::size_t r = 0; r < rows_.size(); ++r) {
            c.a.row(static_cast<Eigen::Index>(r)) = rows_[r].transpose();
            c.b(static_cast<Eigen::Index>(r)) = rhs_[r];
        }
        c.row_labels = labels_;
        return c;
    }

private:
    Eigen::Index params_;
    std::vector<Vec> rows_;
    std::vector<double> rhs_;
    std::vector<std::string> labels_;
};

struct EigenSystem {
    Spectrum spectrum;
    Mat vectors;  // columns, matching spectrum order
};

namespace detail {

// Gram-Schmidt inside clusters of nearly equal eigenvalues.
inline void reorthonormalize_clusters(const std::vector<double>& vals, Mat& v, double gap = 1e-9) {
    std::size_t start = 0;
    while (start < vals.size()) {
        std::size_t end = start + 1;
        while (end < vals.size() && vals[end] - vals[end - 1] < gap) ++end;
        for (std::size_t k = start; k < end; ++k) {
            for (std::size_t j = start; j < k; ++j) v.col(k) -= v.col(j).dot(v.col(k)) * v.col(j);
            v.col(k).normalize();
        }
        start = end;
    }
}

}  // namespace detail

inline EigenSystem eig_sym_tridiag(const RealSymTridiag& m) {
    m.validate();
    const auto n = static_cast<Eigen::Index>(m.n());
    Vec d = Eigen::Map<const Vec>(m.diag.data(), n);
    Vec e = n > 1 ? Vec(Eigen::Map<const Vec>(m.offdiag.data(), n - 1)) : Vec(0);
    Eigen::SelfAdjointEigenSolver<Mat> es;
    if (n == 1) {
        return {Spectrum({m.diag[0]}), Mat::Identity(1, 1)};
    }
    es.computeFromTridiagonal(d, e, Eigen::ComputeEigenvectors);
    if (es.info() != Eigen::Success) throw Error("tridiagonal eigensolver did not converge");
    std::vector<double> vals(es.eigenvalues().data(), es.eigenvalues().data() + n);
    Mat v = es.eigenvectors();
    detail::reorthonormalize_clusters(vals, v);
    EigenSystem out;
    out.spectrum.values = vals;
    out.vectors = v;
    return out;
}

inline EigenSystem eig_symmetric(const Mat& h) {
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    if (es.info() != Eigen::Success) throw Error("symmetric eigensolver did not converge");
    std::vector<double> vals(es.eigenvalues().data(), es.eigenvalues().data() + h.rows());
    Mat v = es.eigenvectors();
    detail::reorthonormalize_clusters(vals, v);
    EigenSystem out;
    out.spectrum.values = vals;
    out.vectors = v;
    return out;
}

inline void require_hermitian(const CMat& h, double tol = 1e-12) {
    if (h.rows() != h.cols()) throw InvalidInput("matrix is not square");
    if (!h.allFinite()) throw InvalidInput("matrix has non-finite entries");
    const double scale = std::max(1.0, detail::max_abs(h));
    if (detail::max_abs(CMat(h - h.adjoint())) > tol * scale) throw InvalidInput("matrix is not Hermitian");
}

inline Propagator propagator(const CMat& h, double t) {
    require_hermitian(h);
    Eigen::SelfAdjointEigenSolver<CMat> es(h);
    if (es.info() != Eigen::Success) throw Error("Hermitian eigensolver did not converge");
    const CMat& v = es.eigenvectors();
    CVec phase(h.rows());
    for (Eigen::Index k = 0; k < h.rows(); ++k) phase(k) = std::exp(Complex(0.0, -es.eigenvalues()(k) * t));
    return {v * phase.asDiagonal() * v.adjoint(), t};
}

// Real symmetric overload, cheaper for the single-excitation matrices.
inline Propagator propagator(const Mat& h, double t) {
    if (h.rows() != h.cols()) throw InvalidInput("matrix is not square");
    if (!h.allFinite()) throw InvalidInput("matrix has non-finite entries");
    const double scale = std::max(1.0, detail::max_abs(h));
    if (detail::max_abs(Mat(h - h.transpose())) > 1e-12 * scale) throw InvalidInput("matrix is not symmetric");
    EigenSystem es = eig_symmetric(h);
    CVec phase(h.rows());
    for (Eigen::Index k = 0; k < h.rows(); ++k) phase(k) = std::exp(Complex(0.0, -es.spectrum.values[k] * t));
    const CMat v = es.vectors.cast<Complex>();
    return {v * phase.asDiagonal() * v.transpose(), t};
}

inline double unitarity_error(const CMat& u) {
    return detail::max_abs(CMat(u.adjoint() * u - CMat::Identity(u.rows(), u.cols())));
}

// exp(G) for real antisymmetric G, through the Hermitian matrix iG.
inline Mat antisym_exp(const Mat& g) {
    if (g.rows() != g.cols()) throw InvalidInput("generator is not square");
    if (!g.allFinite()) throw InvalidInput("generator has non-finite entries");
    const double scale = std::max(1.0, detail::max_abs(g));
    if (detail::max_abs(Mat(g + g.transpose())) > 1e-12 * scale) throw InvalidInput("generator is not antisymmetric");
    if (g.rows() == 0) return g;
    const CMat ig = Complex(0.0, 1.0) * g.cast<Complex>();
    Eigen::SelfAdjointEigenSolver<CMat> es(ig);
    if (es.info() != Eigen::Success) throw Error("eigensolver failed in antisym_exp");
    CVec phase(g.rows());
    for (Eigen::Index k = 0; k < g.rows(); ++k) phase(k) = std::exp(Complex(0.0, -es.eigenvalues()(k)));
    const CMat& v = es.eigenvectors();
    return (v * phase.asDiagonal() * v.adjoint()).real();
}

struct SubspaceSplit {
    Vec particular;  // minimum-norm least-squares solution of A p = b
    Mat kernel;      // orthonormal basis of ker A
    long rank = 0;
    double residual = 0.0;
};

inline SubspaceSplit split_constraints(const LinearConstraintSet& c, double rank_tol = 1e-10) {
    const Eigen::Index p = c.params();
    SubspaceSplit s;
    if (c.rows() == 0) {
        s.particular = Vec::Zero(p);
        s.kernel = Mat::Identity(p, p);
        return s;
    }
    Eigen::BDCSVD<Mat> svd(c.a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Vec& sv = svd.singularValues();
    const double cutoff = sv.size() && sv(0) > 0 ? rank_tol * sv(0) : 0.0;
    long rank = 0;
    while (rank < sv.size() && sv(rank) > cutoff && sv(rank) > 0) ++rank;
    Vec ub = svd.matrixU().leftCols(rank).transpose() * c.b;
    for (long k = 0; k < rank; ++k) ub(k) /= sv(k);
    s.particular = svd.matrixV().leftCols(rank) * ub;
    s.kernel = svd.matrixV().rightCols(p - rank);
    s.rank = rank;
    s.residual = c.residual(s.particular);
    return s;
}

enum class NormMode { two_norm, inf_norm };

struct DirectionResult {
    Vec p;
    bool stationary = false;
    long rank = 0;
    double constraint_residual = 0.0;
    double objective = 0.0;  // gradient . (p - particular)
};

// Minimises the linear objective g.p over the step ball on top of the
// particular solution of the constraint rows. Homogeneous rows give p0 = 0.
inline DirectionResult constrained_direction(const LinearConstraintSet& c, const Vec& gradient, double delta,
                                             NormMode mode = NormMode::two_norm, double feasibility_tol = 1e-8) {
    if (!(delta > 0)) throw InvalidInput("step bound must be positive");
    if (gradient.size() != c.params()) throw InvalidInput("gradient length does not match parameter count");
    SubspaceSplit s = split_constraints(c);
    const double bscale = std::max(1.0, c.rows() ? c.b.cwiseAbs().maxCoeff() : 0.0);
    if (s.residual > feasibility_tol * bscale)
        throw Infeasible("constraint rows are inconsistent (rank " + std::to_string(s.rank) + " of " +
                             std::to_string(c.rows()) + " rows, " + std::to_string(c.params()) + " parameters)",
                         s.rank, c.rows(), c.params(), s.residual);
    DirectionResult out;
    out.rank = s.rank;
    const Vec pg = s.kernel * (s.kernel.transpose() * gradient);
    const double gnorm = gradient.norm();
    if (pg.norm() <= 1e-12 * std::max(gnorm, 1e-300) || pg.norm() == 0.0) {
        out.p = s.particular;
        out.stationary = true;
        out.constraint_residual = c.residual(out.p);
        return out;
    }
    Vec d;
    if (mode == NormMode::two_norm) {
        d = -delta * pg / pg.norm();
    } else {
        Vec sgn = pg.unaryExpr([](double x) { return x > 0 ? -1.0 : (x < 0 ? 1.0 : 0.0); });
        d = s.kernel * (s.kernel.transpose() * sgn);
        if (d.dot(gradient) >= 0) d = -delta * pg / pg.cwiseAbs().maxCoeff();
        else d *= delta / d.cwiseAbs().maxCoeff();
    }
    out.p = s.particular + d;
    out.objective = gradient.dot(d);
    out.constraint_residual = c.residual(out.p);
    return out;
}

// Lanczos on diag(eigenvalues) from sqrt(weights): Jacobi matrix whose
// spectrum is `eigenvalues` and whose first-site spectral weights are `weights`.
inline RealSymTridiag jacobi_from_spectrum(const std::vector<double>& eigenvalues, const std::vector<double>& weights) {
    const std::size_t n = eigenvalues.size();
    if (n == 0 || weights.size() != n) throw InvalidInput("eigenvalue and weight lists must be non-empty and equal length");
    double wsum = 0.0;
    for (double w : weights) {
        if (!(w > 0)) throw InvalidInput("spectral weights must be positive");
        wsum += w;
    }
    const auto m = static_cast<Eigen::Index>(n);
    Vec lam = Eigen::Map<const Vec>(eigenvalues.data(), m);
    Mat q(m, m);
    for (Eigen::Index k = 0; k < m; ++k) q(k, 0) = std::sqrt(weights[k] / wsum);
    RealSymTridiag t;
    for (Eigen::Index k = 0; k < m; ++k) {
        Vec v = lam.cwiseProduct(q.col(k));
        if (k > 0) v -= t.offdiag.back() * q.col(k - 1);
        const double a = q.col(k).dot(v);
        v -= a * q.col(k);
        for (int pass = 0; pass < 2; ++pass)
            for (Eigen::Index j = 0; j <= k; ++j) v -= q.col(j).dot(v) * q.col(j);
        t.diag.push_back(a);
        if (k + 1 < m) {
            const double b = v.norm();
            if (b < 1e-13) throw InvalidInput("spectrum has repeated values; Jacobi matrix is not unique");
            t.offdiag.push_back(b);
            q.col(k + 1) = v / b;
        }
    }
    return t;
}

// Weights that make the Jacobi matrix persymmetric.
inline std::vector<double> persymmetric_weights(const std::vector<double>& eigenvalues) {
    std::vector<double> w;
    for (std::size_t k = 0; k < eigenvalues.size(); ++k) {
        double prod = 1.0;
        for (std::size_t j = 0; j < eigenvalues.size(); ++j)
            if (j != k) prod *= std::abs(eigenvalues[k] - eigenvalues[j]);
        w.push_back(1.0 / prod);
    }
    return w;
}

}  // namespace spinforge
