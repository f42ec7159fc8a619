#pragma once

#include "ghz_ising.hpp"

namespace spinforge {

// X(gamma): diag B_n, upper J_n(1+gamma), lower J_n(1-gamma). Stored dense so
// that leakage out of the band after a unitary step is visible.
struct StructuredX {
    Mat x;
    double gamma = 0.0;

    int n() const { return static_cast<int>(x.rows()); }

    std::vector<double> diag() const {
        std::vector<double> v;
        for (int k = 0; k < n(); ++k) v.push_back(x(k, k));
        return v;
    }
    std::vector<double> upper() const {
        std::vector<double> v;
        for (int k = 0; k + 1 < n(); ++k) v.push_back(x(k, k + 1));
        return v;
    }
    std::vector<double> lower() const {
        std::vector<double> v;
        for (int k = 0; k + 1 < n(); ++k) v.push_back(x(k + 1, k));
        return v;
    }

    static StructuredX from_bands(const std::vector<double>& d, const std::vector<double>& up,
                                  const std::vector<double>& lo, double gamma) {
        const auto m = static_cast<Eigen::Index>(d.size());
        if (m < 1 || up.size() + 1 != d.size() || lo.size() + 1 != d.size())
            throw InvalidInput("band lengths must be n, n-1, n-1");
        StructuredX s{Mat::Zero(m, m), gamma};
        for (Eigen::Index k = 0; k < m; ++k) s.x(k, k) = d[k];
        for (Eigen::Index k = 0; k + 1 < m; ++k) {
            s.x(k, k + 1) = up[k];
            s.x(k + 1, k) = lo[k];
        }
        return s;
    }

    double off_band() const {
        double m = 0.0;
        for (int i = 0; i < n(); ++i)
            for (int j = 0; j < n(); ++j)
                if (std::abs(i - j) > 1) m = std::max(m, std::abs(x(i, j)));
        return m;
    }

    double centro_residual() const {
        double m = 0.0;
        for (int i = 0; i < n(); ++i)
            for (int j = 0; j < n(); ++j) m = std::max(m, std::abs(x(i, j) - x(n() - 1 - j, n() - 1 - i)));
        return m;
    }

    // max_k |L_k (1+gamma) - U_k (1-gamma)|
    double ratio_residual() const {
        double m = 0.0;
        for (int k = 0; k + 1 < n(); ++k)
            m = std::max(m, std::abs(x(k + 1, k) * (1 + gamma) - x(k, k + 1) * (1 - gamma)));
        return m;
    }

    // max_k |L_k / U_k - (1-gamma)/(1+gamma)|
    double ratio_deviation() const {
        double m = 0.0;
        for (int k = 0; k + 1 < n(); ++k)
            m = std::max(m, std::abs(x(k + 1, k) / x(k, k + 1) - (1 - gamma) / (1 + gamma)));
        return m;
    }

    double structure_residual() const { return std::max({off_band(), centro_residual(), ratio_residual()}); }

    std::vector<double> singular_values() const {
        Eigen::JacobiSVD<Mat> svd(x);
        std::vector<double> s(svd.singularValues().data(), svd.singularValues().data() + n());
        std::sort(s.begin(), s.end());
        return s;
    }

    void validate(double tol = 1e-8) const {
        if (n() < 1 || x.rows() != x.cols()) throw InvalidInput("structured matrix must be square and non-empty");
        if (!x.allFinite()) throw InvalidInput("structured matrix has non-finite entries");
        if (structure_residual() > tol) throw InvalidInput("matrix is not tridiagonal, centrosymmetric and ratio-consistent");
    }
};

struct FlowGenerators {
    Mat a;
    Mat b;
    double gamma_rate = 0.0;
};

struct FlowTraceRow {
    int step = 0;
    double gamma = 0.0;
    double sv_drift = 0.0;
    double structure_residual = 0.0;
    double step_size = 0.0;
};
using FlowTrace = std::vector<FlowTraceRow>;

class FlowError : public Error {
public:
    FlowError(const std::string& what, FlowTrace trace) : Error(what), trace(std::move(trace)) {}
    FlowTrace trace;
};

inline std::vector<double> odd_integer_values(int n) {
    std::vector<double> v;
    for (int k = 0; k < n; ++k) v.push_back(2.0 * k + 1.0);
    return v;
}

inline double sv_drift(const StructuredX& x) {
    const std::vector<double> s = x.singular_values(), ref = odd_integer_values(x.n());
    double m = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) m = std::max(m, std::abs(s[k] - ref[k]));
    return m;
}

inline void validate_seed(const StructuredX& x) {
    x.validate();
    if (sv_drift(x) > 1e-9) throw InvalidInput("seed singular values differ from {1, 3, ..., 2n-1}");
}

// gamma = 0: X = n I + h_PST, which has singular values 1, 3, ..., 2n-1.
inline StructuredX gamma0_seed(int n) {
    if (n < 2) throw InvalidInput("gamma seed needs n >= 2");
    const PstChain p = standard_couplings(n);
    return StructuredX::from_bands(std::vector<double>(static_cast<std::size_t>(n), static_cast<double>(n)), p.couplings,
                                   p.couplings, 0.0);
}

// gamma = 1: upper bidiagonal from the Ising identification.
inline StructuredX gamma1_seed(int n) {
    const IsingChain c = standard_ising(n);
    return StructuredX::from_bands(c.b, c.j, std::vector<double>(c.j.size(), 0.0), 1.0);
}

namespace detail {

inline Eigen::Index pair_count(int n) { return static_cast<Eigen::Index>(n) * (n - 1) / 2; }

inline std::vector<std::pair<int, int>> upper_pairs(int n) {
    std::vector<std::pair<int, int>> p;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) p.emplace_back(i, j);
    return p;
}

inline Mat antisym_from(const Vec& p, Eigen::Index offset, int n) {
    Mat g = Mat::Zero(n, n);
    Eigen::Index c = offset;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j, ++c) {
            g(i, j) = p(c);
            g(j, i) = -p(c);
        }
    return g;
}

// Column c of D holds d(vec X)/d p_c for X' = X A - B X.
inline Mat flow_jacobian(const Mat& x) {
    const int n = static_cast<int>(x.rows());
    const Eigen::Index np = pair_count(n);
    Mat d = Mat::Zero(static_cast<Eigen::Index>(n) * n, 2 * np + 1);
    auto at = [n](int i, int j) { return static_cast<Eigen::Index>(i) * n + j; };
    Eigen::Index c = 0;
    for (const auto& [i, j] : upper_pairs(n)) {
        // X E: column j gets X[:, i], column i gets -X[:, j]
        for (int r = 0; r < n; ++r) {
            d(at(r, j), c) += x(r, i);
            d(at(r, i), c) -= x(r, j);
        }
        // -E X: row i gets -X[j, :], row j gets +X[i, :]
        for (int s = 0; s < n; ++s) {
            d(at(i, s), np + c) -= x(j, s);
            d(at(j, s), np + c) += x(i, s);
        }
        ++c;
    }
    return d;
}

}  // namespace detail

inline Eigen::Index gamma_parameter_count(int n) { return 2 * detail::pair_count(n) + 1; }

// Parameter layout: [A_ij (i<j, row-major), B_ij (i<j, row-major), gamma'].
// Structure rows carry -residual/delta so a step also removes existing leakage.
inline LinearConstraintSet gamma_constraints(const StructuredX& xs, double delta = 1.0, double gamma_rate = 1.0) {
    const Mat& x = xs.x;
    const int n = xs.n();
    if (n < 1 || x.rows() != x.cols()) throw InvalidInput("structured matrix must be square");
    if (!(delta > 0)) throw InvalidInput("delta must be positive");
    const Mat d = detail::flow_jacobian(x);
    const Eigen::Index params = d.cols();
    auto ent = [&](int i, int j) -> Vec { return d.row(static_cast<Eigen::Index>(i) * n + j).transpose(); };
    ConstraintBuilder cb(params);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (std::abs(i - j) > 1) cb.add(ent(i, j), -x(i, j) / delta, "tridiagonal");
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (std::abs(i - j) > 1) continue;
            const int mi = n - 1 - j, mj = n - 1 - i;
            // each mirror pair once
            if (std::make_pair(mi, mj) <= std::make_pair(i, j)) continue;
            cb.add(ent(i, j) - ent(mi, mj), -(x(i, j) - x(mi, mj)) / delta, "centrosymmetric");
        }
    for (int k = 0; k + 1 < n; ++k) {
        if (n - 2 - k < k) continue;  // mirror ratio rows follow from centrosymmetry
        const double up = x(k, k + 1), lo = x(k + 1, k), g = xs.gamma;
        Vec row = (1 + g) * ent(k + 1, k) - (1 - g) * ent(k, k + 1);
        row(params - 1) = lo + up;
        cb.add(row, -(lo * (1 + g) - up * (1 - g)) / delta, "ratio");
    }
    Vec rate = Vec::Zero(params);
    rate(params - 1) = 1.0;
    cb.add(rate, gamma_rate, "gamma_rate");
    return cb.build();
}

inline FlowGenerators generators_from_params(const Vec& p, int n) {
    const Eigen::Index np = detail::pair_count(n);
    if (p.size() != 2 * np + 1) throw InvalidInput("parameter vector has the wrong length");
    return {detail::antisym_from(p, 0, n), detail::antisym_from(p, np, n), p(2 * np)};
}

inline FlowGenerators solve_generators(const StructuredX& x, double delta, double gamma_rate) {
    const LinearConstraintSet c = gamma_constraints(x, delta, gamma_rate);
    Eigen::ColPivHouseholderQR<Mat> qr(c.a);
    const Vec p = qr.solve(c.b);
    const double res = c.residual(p);
    if (qr.rank() != c.params() || res > 1e-8 * std::max(1.0, c.b.cwiseAbs().maxCoeff()))
        throw Infeasible("gamma flow constraints are singular or inconsistent", qr.rank(), c.rows(), c.params(), res);
    return generators_from_params(p, x.n());
}

inline StructuredX flow_step_direct(const StructuredX& x, const FlowGenerators& g, double delta) {
    if (!(delta > 0)) throw InvalidInput("delta must be positive");
    return {x.x + delta * (x.x * g.a - g.b * x.x), x.gamma + delta * g.gamma_rate};
}

inline StructuredX flow_step_unitary(const StructuredX& x, const FlowGenerators& g, double delta = 1.0) {
    return {antisym_exp(Mat(-delta * g.b)) * x.x * antisym_exp(Mat(delta * g.a)), x.gamma + delta * g.gamma_rate};
}

enum class FlowMode { direct, unitary };

struct InterpolationResult {
    StructuredX x;
    FlowTrace trace;
    double sv_drift = 0.0;
    double structure_residual = 0.0;
};

// Compensation-only steps at fixed gamma.
inline StructuredX polish_structure(StructuredX x, FlowMode mode = FlowMode::unitary, int max_steps = 20,
                                    double target = 1e-14) {
    for (int k = 0; k < max_steps && x.structure_residual() > target; ++k) {
        const FlowGenerators g = solve_generators(x, 1.0, 0.0);
        const StructuredX next = mode == FlowMode::unitary ? flow_step_unitary(x, g, 1.0) : flow_step_direct(x, g, 1.0);
        if (next.structure_residual() >= x.structure_residual()) break;
        x = next;
    }
    return x;
}

inline InterpolationResult interpolate_gamma(const StructuredX& seed, double gamma_to, FlowMode mode, double step,
                                             int max_rejections = 60) {
    validate_seed(seed);
    if (!(step > 0)) throw InvalidInput("step must be positive");
    if (gamma_to < 0 || gamma_to > 1) throw InvalidInput("gamma must lie in [0, 1]");
    InterpolationResult r;
    StructuredX x = seed;
    r.trace.push_back({0, x.gamma, sv_drift(x), x.structure_residual(), 0.0});
    const double span = gamma_to - seed.gamma;
    const double dir = span < 0 ? -1.0 : 1.0;
    double delta = step;
    int rejections = 0, count = 0;
    while (std::abs(gamma_to - x.gamma) > 1e-15) {
        const double h = std::min(delta, std::abs(gamma_to - x.gamma));
        const FlowGenerators g = solve_generators(x, h, dir);
        StructuredX next = mode == FlowMode::direct ? flow_step_direct(x, g, h) : flow_step_unitary(x, g, h);
        if (std::abs(gamma_to - next.gamma) < 1e-13) next.gamma = gamma_to;
        const double res = next.structure_residual();
        if (mode == FlowMode::unitary && res > std::max(0.1 * h, 10.0 * r.trace.back().structure_residual)) {
            if (++rejections > max_rejections) throw FlowError("step size collapsed during gamma interpolation", r.trace);
            delta *= 0.5;
            continue;
        }
        x = next;
        r.trace.push_back({++count, x.gamma, sv_drift(x), res, h});
    }
    x = polish_structure(x, mode);
    r.trace.push_back({++count, x.gamma, sv_drift(x), x.structure_residual(), 0.0});
    r.x = x;
    r.sv_drift = sv_drift(x);
    r.structure_residual = x.structure_residual();
    const double sv_bound = mode == FlowMode::unitary ? 1e-6 : 10.0 * step;
    if (std::abs(x.gamma - gamma_to) > 1e-6 || r.structure_residual > 1e-6 || r.sv_drift > sv_bound)
        throw FlowError("gamma interpolation did not converge (sv drift " + std::to_string(r.sv_drift) +
                            ", structure residual " + std::to_string(r.structure_residual) + ")",
                        r.trace);
    return r;
}

inline InterpolationResult interpolate_gamma(int n, double gamma_from, double gamma_to, FlowMode mode, double step) {
    StructuredX seed;
    if (gamma_from == 0.0) seed = gamma0_seed(n);
    else if (gamma_from == 1.0) seed = gamma1_seed(n);
    else throw InvalidInput("known seeds exist only at gamma = 0 and gamma = 1");
    if (gamma_to == gamma_from) {
        validate_seed(seed);
        return {seed, {{0, seed.gamma, sv_drift(seed), seed.structure_residual(), 0.0}}, sv_drift(seed),
                seed.structure_residual()};
    }
    return interpolate_gamma(seed, gamma_to, mode, step);
}

// sum_n B_n X_n + sum_n U_n Z_n Z_{n+1} + L_n Y_n Y_{n+1}
inline PauliSum zy_hamiltonian(const StructuredX& x) {
    PauliSum h(x.n());
    const auto d = x.diag(), up = x.upper(), lo = x.lower();
    for (int q = 0; q < x.n(); ++q) h.add(d[q], "X", {q});
    for (int q = 0; q + 1 < x.n(); ++q) {
        h.add(up[q], "ZZ", {q, q + 1});
        h.add(lo[q], "YY", {q, q + 1});
    }
    return h;
}

}  // namespace spinforge
