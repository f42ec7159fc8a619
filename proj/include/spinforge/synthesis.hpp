#pragma once

#include "pst.hpp"
#include "sampling.hpp"

#include <array>
#include <optional>

namespace spinforge {

struct SynthesisTask {
    Spectrum spectrum;
    int source = 1;  // 1-based
    Vec target;      // real, normalised
    double time = pi;

    int n() const { return static_cast<int>(target.size()); }

    void validate() const {
        if (target.size() < 1) throw InvalidInput("synthesis target is empty");
        if (static_cast<int>(spectrum.size()) != n()) throw InvalidInput("spectrum size differs from target dimension");
        if (source < 1 || source > n()) throw InvalidInput("source site out of range");
        if (std::abs(target.norm() - 1.0) > 1e-10) throw InvalidInput("target must be normalised");
    }
};

struct NullVectorTask {
    Spectrum spectrum;
    Vec target_null;  // supported on odd (1-based) sites
    double time = pi;

    void validate() const {
        if (static_cast<Eigen::Index>(spectrum.size()) != target_null.size())
            throw InvalidInput("spectrum size differs from null-vector dimension");
        if (std::abs(target_null.norm() - 1.0) > 1e-10) throw InvalidInput("target null vector must be normalised");
        for (Eigen::Index k = 1; k < target_null.size(); k += 2)
            if (std::abs(target_null(k)) > 1e-12) throw InvalidInput("target null vector must vanish on even sites");
    }
};

struct ConvergenceState {
    double chi = 0.0;  // null-vector overlap, or |<psi_t|U|phi>| for the commutator flow
    double delta = 0.0;
    long iterations = 0;
};

enum class FlowStatus { converged, boundary_stall, stalled, budget_exhausted };

inline const char* to_string(FlowStatus s) {
    switch (s) {
        case FlowStatus::converged: return "converged";
        case FlowStatus::boundary_stall: return "boundary_stall";
        case FlowStatus::stalled: return "stalled";
        default: return "budget_exhausted";
    }
}

struct SynthesisTraceRow {
    long iteration = 0;
    double chi = 0.0;
    double delta = 0.0;
    double off_band = 0.0;
};

struct SynthesisResult {
    RealSymTridiag h;
    ConvergenceState state;
    FlowStatus status = FlowStatus::stalled;
    std::vector<SynthesisTraceRow> trace;
    std::vector<int> weak_couplings;  // 1-based coupling indices with |J| < 1e-8
    long rejected = 0;
};

enum class DirectionRule { linear, gauss_newton };

struct FlowOptions {
    double eps = 1.0;
    long budget = 100000;
    double tol = 1e-6;
    double off_band_tol = 1e-8;
    int repair_steps = 2;
    DirectionRule direction = DirectionRule::gauss_newton;
    NormMode norm = NormMode::two_norm;
    double grow_factor = 1.5;
    int grow_after = 5;
    double max_scale = 1.0;
    double min_step = 1e-12;
};

inline double step_size_rule(const ConvergenceState& s, double eps) {
    if (std::abs(s.chi) > 1.0 + 1e-12) throw InvalidInput("chi must lie in [-1, 1]");
    return eps * std::sqrt(std::max(0.0, 1.0 - s.chi * s.chi));
}

namespace detail {

inline double off_band(const Mat& h) {
    double m = 0.0;
    for (Eigen::Index i = 0; i < h.rows(); ++i)
        for (Eigen::Index j = i + 2; j < h.cols(); ++j) m = std::max({m, std::abs(h(i, j)), std::abs(h(j, i))});
    return m;
}

// Generators that mix only odd-odd or even-even sites keep a zero-diagonal chain bipartite.
struct BipartiteFlow {
    int n;
    std::vector<std::pair<int, int>> pairs;

    explicit BipartiteFlow(int sites) : n(sites) {
        for (int parity = 0; parity < 2; ++parity)
            for (int i = parity; i < n; i += 2)
                for (int j = i + 2; j < n; j += 2) pairs.emplace_back(i, j);
    }

    Eigen::Index params() const { return static_cast<Eigen::Index>(pairs.size()); }

    Mat generator(const Vec& p) const {
        Mat a = Mat::Zero(n, n);
        for (std::size_t c = 0; c < pairs.size(); ++c) {
            a(pairs[c].first, pairs[c].second) = p(static_cast<Eigen::Index>(c));
            a(pairs[c].second, pairs[c].first) = -p(static_cast<Eigen::Index>(c));
        }
        return a;
    }

    // Rows: odd-distance entries beyond the band of H + [H, A] vanish.
    LinearConstraintSet constraints(const Mat& h) const {
        std::vector<std::pair<int, int>> ents;
        for (int i = 0; i < n; ++i)
            for (int j = i + 3; j < n; j += 2) ents.emplace_back(i, j);
        LinearConstraintSet c(params());
        c.a = Mat::Zero(static_cast<Eigen::Index>(ents.size()), params());
        c.b = Vec::Zero(static_cast<Eigen::Index>(ents.size()));
        for (std::size_t r = 0; r < ents.size(); ++r) {
            const auto [i, j] = ents[r];
            for (std::size_t q = 0; q < pairs.size(); ++q) {
                const auto [a, b] = pairs[q];
                // (HE - EH)_{ij}, E = e_a e_b^T - e_b e_a^T
                double v = 0.0;
                if (j == b) v += h(i, a);
                if (j == a) v -= h(i, b);
                if (i == a) v -= h(b, j);
                if (i == b) v += h(a, j);
                c.a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(q)) = v;
            }
            c.b(static_cast<Eigen::Index>(r)) = -h(i, j);
        }
        return c;
    }

    Mat apply(const Mat& h, const Vec& p) const {
        const Mat e = antisym_exp(generator(p));
        Mat out = e.transpose() * h * e;
        return 0.5 * (out + out.transpose());
    }

    Mat repair(Mat h, int steps) const {
        for (int k = 0; k < steps && off_band(h) > 1e-15; ++k) h = apply(h, split_constraints(constraints(h)).particular);
        return h;
    }

    // Columns: A l for each generator direction.
    Mat action_on(const Vec& l) const {
        Mat m = Mat::Zero(n, params());
        for (std::size_t c = 0; c < pairs.size(); ++c) {
            const auto [a, b] = pairs[c];
            m(a, static_cast<Eigen::Index>(c)) += l(b);
            m(b, static_cast<Eigen::Index>(c)) -= l(a);
        }
        return m;
    }
};

inline Vec null_vector(const Mat& h, const Vec& reference) {
    const EigenSystem es = eig_symmetric(h);
    std::size_t best = 0;
    for (std::size_t k = 1; k < es.spectrum.size(); ++k)
        if (std::abs(es.spectrum.values[k]) < std::abs(es.spectrum.values[best])) best = k;
    Vec v = es.vectors.col(static_cast<Eigen::Index>(best));
    return v.dot(reference) < 0 ? Vec(-v) : v;
}

// argmin ||m q - y|| subject to ||q|| <= radius
inline Vec trust_region_step(const Mat& m, const Vec& y, double radius) {
    if (m.cols() == 0) return Vec(0);
    Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vec& s = svd.singularValues();
    const Vec c = svd.matrixU().transpose() * y;
    const double cut = s.size() && s(0) > 0 ? 1e-12 * s(0) : 0.0;
    auto step = [&](double mu) {
        Vec coef(s.size());
        for (Eigen::Index k = 0; k < s.size(); ++k)
            coef(k) = (mu == 0.0) ? (s(k) > cut ? c(k) / s(k) : 0.0) : s(k) * c(k) / (s(k) * s(k) + mu);
        return Vec(svd.matrixV() * coef);
    };
    Vec q = step(0.0);
    if (q.norm() <= radius) return q;
    double lo = 0.0, hi = 1.0;
    while (step(hi).norm() > radius) hi *= 10.0;
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        (step(mid).norm() > radius ? lo : hi) = mid;
    }
    return step(hi);
}

inline void require_bipartite_chain(const RealSymTridiag& h) {
    h.validate();
    for (double d : h.diag)
        if (std::abs(d) > 1e-12) throw InvalidInput("synthesis flows need a zero-diagonal (bipartite) chain");
}

inline void require_spectrum(const Mat& h, const Spectrum& s, double tol = 1e-8) {
    const EigenSystem es = eig_symmetric(h);
    if (es.spectrum.size() != s.size()) throw InvalidInput("spectrum size mismatch");
    for (std::size_t k = 0; k < s.size(); ++k)
        if (std::abs(es.spectrum.values[k] - s.values[k]) > tol)
            throw InvalidInput("initial chain does not have the task spectrum");
}

inline std::vector<int> weak_couplings(const RealSymTridiag& h) {
    std::vector<int> w;
    for (std::size_t k = 0; k < h.offdiag.size(); ++k)
        if (std::abs(h.offdiag[k]) < 1e-8) w.push_back(static_cast<int>(k) + 1);
    return w;
}

}  // namespace detail

// min over global phase of ||e^{-iht0} - phi (1 - 2 P0)||_max
inline double reflection_check(const RealSymTridiag& h, double t0) {
    h.validate();
    const Mat hd = h.dense();
    const CMat u = propagator(hd, t0).u;
    const EigenSystem es = eig_symmetric(hd);
    std::size_t z = 0;
    for (std::size_t k = 1; k < es.spectrum.size(); ++k)
        if (std::abs(es.spectrum.values[k]) < std::abs(es.spectrum.values[z])) z = k;
    const Vec l0 = es.vectors.col(static_cast<Eigen::Index>(z));
    const CMat r = (Mat::Identity(hd.rows(), hd.cols()) - 2.0 * l0 * l0.transpose()).cast<Complex>();
    auto dev = [&](double th) { return detail::max_abs(CMat(u - std::polar(1.0, th) * r)); };
    const int grid = 720;
    int best = 0;
    double bestv = dev(0.0);
    for (int k = 1; k < grid; ++k) {
        const double v = dev(2 * pi * k / grid);
        if (v < bestv) bestv = v, best = k;
    }
    double lo = 2 * pi * (best - 1) / grid, hi = 2 * pi * (best + 1) / grid;
    const double g = (std::sqrt(5.0) - 1) / 2;
    for (int it = 0; it < 100; ++it) {
        const double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
        (dev(a) < dev(b) ? hi : lo) = (dev(a) < dev(b) ? b : a);
    }
    return std::min(bestv, dev(0.5 * (lo + hi)));
}

inline SynthesisResult synthesis_flow_nullvector(const RealSymTridiag& h0, const NullVectorTask& task,
                                                 const FlowOptions& opt = {}) {
    task.validate();
    detail::require_bipartite_chain(h0);
    Mat h = h0.dense();
    detail::require_spectrum(h, task.spectrum);
    if (reflection_check(h0, task.time) > 1e-8)
        throw InvalidInput("spectrum and time do not give e^{-iHt0} = phase (1 - 2|l0><l0|)");
    const int n = static_cast<int>(h0.n());
    const detail::BipartiteFlow flow(n);
    const Vec& lt = task.target_null;
    SynthesisResult res;
    double scale = 1.0;
    int good = 0;
    long it = 0;
    while (true) {
        const Vec l0 = detail::null_vector(h, lt);
        const double chi = l0.dot(lt);
        const double delta = step_size_rule({chi, 0, it}, opt.eps) * scale;
        res.state = {chi, delta, it};
        if (res.trace.empty() || res.trace.back().iteration != it) res.trace.push_back({it, chi, delta, detail::off_band(h)});
        if (chi >= 1.0 - opt.tol) {
            res.status = FlowStatus::converged;
            break;
        }
        if (it >= opt.budget) {
            res.status = FlowStatus::budget_exhausted;
            break;
        }
        if (delta < opt.min_step) {
            res.status = FlowStatus::boundary_stall;
            break;
        }
        const LinearConstraintSet c = flow.constraints(h);
        Vec p;
        if (opt.direction == DirectionRule::linear) {
            Vec g(flow.params());
            for (std::size_t q = 0; q < flow.pairs.size(); ++q) {
                const auto [a, b] = flow.pairs[q];
                g(static_cast<Eigen::Index>(q)) = lt(a) * l0(b) - lt(b) * l0(a);
            }
            const DirectionResult d = constrained_direction(c, g, delta, opt.norm);
            if (d.stationary) {
                res.status = FlowStatus::boundary_stall;
                break;
            }
            p = d.p;
        } else {
            // Gauss-Newton on l0 - A l0 ~ l_t inside the feasible set.
            const SubspaceSplit s = split_constraints(c);
            const Mat m = flow.action_on(l0);
            const Vec y = (chi * l0 - lt) - m * s.particular;
            p = s.particular + s.kernel * detail::trust_region_step(m * s.kernel, y, delta);
        }
        const Mat hn = flow.repair(flow.apply(h, p), opt.repair_steps);
        const double chin = detail::null_vector(hn, lt).dot(lt);
        if (chin < chi || detail::off_band(hn) > opt.off_band_tol || !hn.allFinite()) {
            ++res.rejected;
            scale *= 0.5;
            good = 0;
            continue;
        }
        h = hn;
        ++it;
        if (++good >= opt.grow_after) {
            scale = std::min(opt.max_scale, scale * opt.grow_factor);
            good = 0;
        }
    }
    res.h = RealSymTridiag::from_dense(h);
    res.weak_couplings = detail::weak_couplings(res.h);
    return res;
}

// l_t from |psi_t> = (1 - 2|l_t><l_t|)|source>, up to sign
inline Vec null_target_for(const SynthesisTask& task) {
    task.validate();
    Vec l = -task.target;
    l(task.source - 1) += 1.0;
    if (l.norm() < 1e-12) throw InvalidInput("target equals the source state; nothing to synthesise");
    return l / l.norm();
}

inline NullVectorTask null_vector_task(const SynthesisTask& task) {
    return {task.spectrum, null_target_for(task), task.time};
}

inline Complex synthesis_amplitude(const RealSymTridiag& h, const SynthesisTask& task) {
    const CVec out = propagator(h.dense(), task.time).u.col(task.source - 1);
    return task.target.cast<Complex>().dot(out);
}

// Maximises |<psi_t| e^{-iHt0} |phi>| through updates H -> e^{-A} H e^{A}.
inline SynthesisResult synthesis_flow_commutator(const RealSymTridiag& h0, const SynthesisTask& task, double delta,
                                                 long budget, FlowOptions opt = {}) {
    task.validate();
    detail::require_bipartite_chain(h0);
    if (!(delta > 0)) throw InvalidInput("step must be positive");
    Mat h = h0.dense();
    detail::require_spectrum(h, task.spectrum);
    const int n = task.n();
    const detail::BipartiteFlow flow(n);
    const Vec& psi = task.target;
    const Eigen::Index s0 = task.source - 1;
    opt.budget = budget;
    auto amplitude = [&](const Mat& hh, CVec* a_out, CVec* w_out) {
        const CMat u = propagator(hh, task.time).u;
        const CVec w = u.col(s0);
        if (a_out) *a_out = u.transpose() * psi.cast<Complex>();
        if (w_out) *w_out = w;
        return Complex(psi.cast<Complex>().dot(w));
    };
    SynthesisResult res;
    double scale = 1.0;
    int good = 0;
    long it = 0;
    while (true) {
        CVec a, w;
        const Complex f = amplitude(h, &a, &w);
        const double fa = std::abs(f);
        const double step = delta * scale * std::sqrt(std::max(0.0, 1.0 - fa * fa));
        res.state = {fa, step, it};
        if (res.trace.empty() || res.trace.back().iteration != it) res.trace.push_back({it, fa, step, detail::off_band(h)});
        if (fa >= 1.0 - opt.tol) {
            res.status = FlowStatus::converged;
            break;
        }
        if (it >= opt.budget) {
            res.status = FlowStatus::budget_exhausted;
            break;
        }
        if (step < opt.min_step) {
            res.status = FlowStatus::stalled;
            break;
        }
        const Complex ph = fa > 0 ? std::conj(f) / fa : Complex(1.0, 0.0);
        const LinearConstraintSet c = flow.constraints(h);
        Vec p;
        if (opt.direction == DirectionRule::linear) {
            Vec g(flow.params());
            for (std::size_t q = 0; q < flow.pairs.size(); ++q) {
                const auto [i, j] = flow.pairs[q];
                const double phi_i = (i == s0) ? 1.0 : 0.0, phi_j = (j == s0) ? 1.0 : 0.0;
                const Complex cc = (a(i) * phi_j - a(j) * phi_i) - (psi(i) * w(j) - psi(j) * w(i));
                g(static_cast<Eigen::Index>(q)) = -(ph * cc).real();
            }
            const DirectionResult d = constrained_direction(c, g, step, opt.norm);
            if (d.stationary) {
                res.status = FlowStatus::stalled;
                break;
            }
            p = d.p;
        } else {
            // Gauss-Newton on the output state: w + dw(A) ~ conj(ph) psi, dw = [U, A] phi
            const SubspaceSplit s = split_constraints(c);
            CMat jac(n, flow.params());
            const CMat u = propagator(h, task.time).u;
            for (std::size_t q = 0; q < flow.pairs.size(); ++q) {
                const auto [i, j] = flow.pairs[q];
                // U A e_s - A U e_s
                CVec col = CVec::Zero(n);
                if (j == s0) col += u.col(i);
                if (i == s0) col -= u.col(j);
                col(i) -= w(j);
                col(j) += w(i);
                jac.col(static_cast<Eigen::Index>(q)) = col;
            }
            const CVec resid = std::conj(ph) * psi.cast<Complex>() - w - jac * s.particular.cast<Complex>();
            const CMat jk = jac * s.kernel.cast<Complex>();
            Mat jr(2 * n, jk.cols());
            jr << jk.real(), jk.imag();
            Vec yr(2 * n);
            yr << resid.real(), resid.imag();
            p = s.particular + s.kernel * detail::trust_region_step(jr, yr, step);
        }
        const Mat hn = flow.repair(flow.apply(h, p), opt.repair_steps);
        const double fn = std::abs(amplitude(hn, nullptr, nullptr));
        if (fn < fa || detail::off_band(hn) > opt.off_band_tol || !hn.allFinite()) {
            ++res.rejected;
            scale *= 0.5;
            good = 0;
            continue;
        }
        h = hn;
        ++it;
        if (++good >= opt.grow_after) {
            scale = std::min(opt.max_scale, scale * opt.grow_factor);
            good = 0;
        }
    }
    res.h = RealSymTridiag::from_dense(h);
    res.weak_couplings = detail::weak_couplings(res.h);
    return res;
}

// Five-site case study: the two-parameter family of A_o |l0> on the odd sites.
inline Eigen::Vector3d case_study_generator(const std::array<double, 4>& j, double a, double b) {
    for (double v : j)
        if (!(v > 0)) throw InvalidInput("case-study couplings must be positive");
    const double j1 = j[0], j2 = j[1], j3 = j[2], j4 = j[3];
    // second and third entries carry the sign that makes u orthogonal to the null vector
    const Eigen::Vector3d u(j1 * j2 * (j3 * j3 + j4 * j4), j2 * j2 * j4 * j4 - j1 * j1 * j3 * j3,
                            -j3 * j4 * (j1 * j1 + j2 * j2));
    const Eigen::Vector3d v(j1 * (j3 * j3 + j4 * j4 - j1 * j1), -j2 * (j1 * j1 - j4 * j4), -j2 * j3 * j4);
    return a * u + b * v;
}

inline Eigen::Vector3d case_study_null_vector(const std::array<double, 4>& j) {
    return {j[1] * j[3], -j[0] * j[3], j[0] * j[2]};
}

// (1 + g1^2)(1 + g2^2) - 289/64 with g1 = J1/J2, g2 = J4/J3
inline double boundary_value(double g1, double g2) {
    if (!(g1 > 0) || !(g2 > 0)) throw InvalidInput("boundary ratios must be positive");
    return (1 + g1 * g1) * (1 + g2 * g2) - 289.0 / 64.0;
}

// Null vector on the five sites for target ratios g1 = J1/J2, g2 = J4/J3.
inline Vec case_study_target(double g1, double g2) {
    Vec l = Vec::Zero(5);
    l << g2, 0, -g1 * g2, 0, g1;
    return l / l.norm();
}

// ---- seeds and drivers ---------------------------------------------------

// Zero-diagonal spectrum {0, +-v_1, +-v_2, ...}
inline Spectrum symmetric_spectrum(const std::vector<double>& positive, bool with_zero = true) {
    std::vector<double> v;
    if (with_zero) v.push_back(0.0);
    for (double x : positive) {
        v.push_back(x);
        v.push_back(-x);
    }
    return Spectrum(v);
}

// {0, +-1, +-3, ..., +-(n-2)} for odd n; reflection at t0 = pi.
inline Spectrum reflection_spectrum(int n) {
    if (n < 1 || n % 2 == 0) throw InvalidInput("reflection spectra need an odd site count");
    std::vector<double> pos;
    for (int k = 0; k < (n - 1) / 2; ++k) pos.push_back(2.0 * k + 1.0);
    return symmetric_spectrum(pos);
}

// Seed whose null vector has the sign pattern of `lt` on the odd sites.
inline std::vector<double> gauge_signs(const Vec& lt) {
    std::vector<double> d(static_cast<std::size_t>(lt.size()), 1.0);
    for (Eigen::Index j = 0; j < lt.size(); j += 2)
        if (std::abs(lt(j)) > 1e-14) d[static_cast<std::size_t>(j)] = (lt(j) > 0 ? 1.0 : -1.0) * ((j / 2) % 2 ? -1.0 : 1.0);
    return d;
}

inline RealSymTridiag apply_gauge(const RealSymTridiag& h, const std::vector<double>& d) {
    RealSymTridiag out = h;
    for (std::size_t k = 0; k < out.offdiag.size(); ++k) out.offdiag[k] *= d[k] * d[k + 1];
    return out;
}

// Candidate first-site weight profiles: persymmetric, a ramp, then seeded random ones.
inline std::vector<std::vector<double>> seed_weight_profiles(const Spectrum& s, int random_count = 4,
                                                             std::uint64_t seed = 1) {
    const std::size_t n = s.size();
    std::vector<std::vector<double>> out{persymmetric_weights(s.values)};
    std::vector<double> ramp;
    for (std::size_t k = 0; k < n; ++k) ramp.push_back(static_cast<double>(std::min(k + 1, n - k)));
    out.push_back(ramp);
    for (int r = 0; r < random_count; ++r) {
        auto rng = sample_stream(seed, static_cast<std::uint64_t>(r));
        // w(l) = w(-l) keeps the Jacobi matrix zero-diagonal on a symmetric spectrum
        std::vector<double> w(n);
        for (std::size_t k = 0; k <= (n - 1) / 2; ++k) w[k] = w[n - 1 - k] = uniform(rng, 0.2, 1.0);
        out.push_back(w);
    }
    return out;
}

// Lanczos seed; the diagonal is exactly zero for a symmetric spectrum and weights.
inline RealSymTridiag bipartite_seed(const Spectrum& s, const std::vector<double>& w) {
    RealSymTridiag h = jacobi_from_spectrum(s.values, w);
    const double scale = std::max(1.0, std::abs(s.values.front()) + std::abs(s.values.back()));
    for (double& d : h.diag) {
        if (std::abs(d) > 1e-9 * scale) throw InvalidInput("spectrum and weights are not symmetric about zero");
        d = 0.0;
    }
    return h;
}

// Runs the null-vector flow from several seeds; returns the first converged run
// or the one with the largest final chi.
inline SynthesisResult synthesize_null_vector(const NullVectorTask& task, const FlowOptions& opt = {},
                                              int random_seeds = 4, std::uint64_t seed = 1) {
    task.validate();
    const std::vector<double> d = gauge_signs(task.target_null);
    std::optional<SynthesisResult> best;
    for (const auto& w : seed_weight_profiles(task.spectrum, random_seeds, seed)) {
        const RealSymTridiag h0 = apply_gauge(bipartite_seed(task.spectrum, w), d);
        SynthesisResult r = synthesis_flow_nullvector(h0, task, opt);
        const bool done = r.status == FlowStatus::converged;
        if (!best || r.state.chi > best->state.chi) best = std::move(r);
        if (done) break;
    }
    return *best;
}

// ---- mirror reduction ----------------------------------------------------

inline bool mirror_symmetric(const Vec& v, double tol = 1e-12) {
    for (Eigen::Index k = 0; k < v.size(); ++k)
        if (std::abs(v(k) - v(v.size() - 1 - k)) > tol) return false;
    return true;
}

// Symmetric sector seen from the centre: half site k <-> (|c+k> + |c-k>)/sqrt2.
inline Vec fold_target(const Vec& full) {
    const Eigen::Index m = (full.size() + 1) / 2, c = m - 1;
    Vec half(m);
    half(0) = full(c);
    for (Eigen::Index k = 1; k < m; ++k) half(k) = std::sqrt(2.0) * full(c + k);
    return half;
}

inline Vec unfold_state(const Vec& half) {
    const Eigen::Index m = half.size(), c = m - 1;
    Vec full = Vec::Zero(2 * m - 1);
    full(c) = half(0);
    for (Eigen::Index k = 1; k < m; ++k) full(c + k) = full(c - k) = half(k) / std::sqrt(2.0);
    return full;
}

inline RealSymTridiag unfold_chain(const RealSymTridiag& half) {
    const std::size_t m = half.n();
    if (m < 2) throw InvalidInput("half chain needs at least two sites");
    std::vector<double> right{half.offdiag[0] / std::sqrt(2.0)};
    for (std::size_t k = 1; k + 1 < m; ++k) right.push_back(half.offdiag[k]);
    std::vector<double> full(right.rbegin(), right.rend());
    full.insert(full.end(), right.begin(), right.end());
    std::vector<double> diag(2 * m - 1, 0.0);
    for (std::size_t k = 0; k < m; ++k) diag[m - 1 + k] = diag[m - 1 - k] = half.diag[k];
    return {diag, full};
}

enum class WMethod { null_vector, commutator };

inline const char* to_string(WMethod m) { return m == WMethod::null_vector ? "nullvector" : "commutator"; }

// {0, +-1, +-2, ..., +-(n-1)/2}: at t0 = pi, e^{-iHt0} is +1 on even and -1 on odd levels.
inline Spectrum integer_spectrum(int n) {
    if (n < 1 || n % 2 == 0) throw InvalidInput("integer spectra need an odd site count");
    std::vector<double> pos;
    for (int k = 1; k <= (n - 1) / 2; ++k) pos.push_back(k);
    return symmetric_spectrum(pos);
}

// {0, +-1, +-5, +-9, ...}: at t0 = pi/2, e^{-iHt0} = P0 - i sgn(H), which moves weight across the bipartition.
inline Spectrum quarter_spectrum(int n) {
    if (n < 1 || n % 2 == 0) throw InvalidInput("quarter-period spectra need an odd site count");
    std::vector<double> pos;
    for (int k = 0; k < (n - 1) / 2; ++k) pos.push_back(4.0 * k + 1.0);
    return symmetric_spectrum(pos);
}

inline SynthesisResult synthesize_commutator(const SynthesisTask& task, const FlowOptions& opt = {}, double delta = 1.0,
                                             int random_seeds = 6, std::uint64_t seed = 1) {
    task.validate();
    std::optional<SynthesisResult> best;
    for (const auto& w : seed_weight_profiles(task.spectrum, random_seeds, seed)) {
        SynthesisResult r = synthesis_flow_commutator(bipartite_seed(task.spectrum, w), task, delta, opt.budget, opt);
        const bool done = r.status == FlowStatus::converged;
        if (!best || r.state.chi > best->state.chi) best = std::move(r);
        if (done) break;
    }
    return *best;
}

// Gauss-Newton on the couplings (zero diagonal kept) and a free phase theta for
// e^{-iht}|source> = e^{i theta} target, with step halving. Returns the final residual norm.
inline double polish_transfer(RealSymTridiag& h, int source, const Vec& target, double t, int steps = 6) {
    const auto m = static_cast<Eigen::Index>(h.n());
    const auto nj = m - 1;
    const Complex mi(0.0, -1.0);
    const CVec tc = target.cast<Complex>();
    auto residual = [&](const RealSymTridiag& c, double th) {
        return CVec(propagator(c.dense(), t).u.col(source - 1) - std::exp(Complex(0.0, th)) * tc);
    };
    double theta = std::arg(tc.dot(propagator(h.dense(), t).u.col(source - 1)));
    double res = residual(h, theta).norm();
    for (int it = 0; it < steps && res > 1e-15; ++it) {
        const EigenSystem es = eig_symmetric(h.dense());
        const Mat& v = es.vectors;
        CVec f(m);
        for (Eigen::Index i = 0; i < m; ++i) f[i] = std::exp(mi * es.spectrum.values[static_cast<std::size_t>(i)] * t);
        const CVec r = residual(h, theta);
        CMat phi(m, m);
        for (Eigen::Index i = 0; i < m; ++i)
            for (Eigen::Index j = 0; j < m; ++j) {
                const double li = es.spectrum.values[static_cast<std::size_t>(i)], lj = es.spectrum.values[static_cast<std::size_t>(j)];
                phi(i, j) = std::abs(li - lj) < 1e-10 ? mi * t * f[i] : (f[i] - f[j]) / (li - lj);
            }
        const Vec vs = v.row(source - 1).transpose();
        Mat jac(2 * m, nj + 1);
        for (Eigen::Index k = 0; k < nj; ++k) {
            // V^T E_k V with E_k the symmetric unit at (k, k+1)
            const Mat g = v.row(k).transpose() * v.row(k + 1) + v.row(k + 1).transpose() * v.row(k);
            const CVec d = v.cast<Complex>() * (phi.cwiseProduct(g.cast<Complex>()) * vs.cast<Complex>());
            jac.col(k) << d.real(), d.imag();
        }
        const CVec dth = -Complex(0.0, 1.0) * std::exp(Complex(0.0, theta)) * tc;
        jac.col(nj) << dth.real(), dth.imag();
        Vec rr(2 * m);
        rr << r.real(), r.imag();
        const Vec step = jac.completeOrthogonalDecomposition().solve(-rr);
        bool moved = false;
        for (double alpha = 1.0; alpha > 1e-6; alpha *= 0.5) {
            RealSymTridiag c = h;
            for (Eigen::Index k = 0; k < nj; ++k) c.offdiag[static_cast<std::size_t>(k)] += alpha * step[k];
            const double th = theta + alpha * step[nj];
            const double rc = residual(c, th).norm();
            if (rc < res) {
                h = c;
                theta = th;
                res = rc;
                moved = true;
                break;
            }
        }
        if (!moved) break;
    }
    return res;
}

struct WStateDesign {
    RealSymTridiag chain;
    int source = 1;
    Vec target;
    double time = pi;
    WMethod method = WMethod::null_vector;
    Spectrum flowed_spectrum;  // spectrum of the chain the flow actually ran on
    bool half_chain = false;
    Complex amplitude;         // <target| e^{-iHt} |source>
    double overlap = 0.0;
    double polish_residual = 0.0;
    SynthesisResult flow;
};

struct WStateOptions {
    WMethod method = WMethod::null_vector;
    FlowOptions flow;
    bool allow_half_chain = true;
    std::optional<Spectrum> spectrum;  // spectrum of the flowed chain
    std::optional<double> time;
    int polish_steps = 6;  // Gauss-Newton refinement of a converged chain
    int random_seeds = 6;  // random starting profiles after the two deterministic ones
    std::uint64_t seed = 1;
};

// Designs a zero-field chain with e^{-iHt}|source> = phase * target.
// Mirror-symmetric targets seen from the centre run on the half chain.
inline WStateDesign design_wstate(int source, const Vec& target, const WStateOptions& opt = {}) {
    const int n = static_cast<int>(target.size());
    if (n < 2) throw InvalidInput("W-state design needs at least two sites");
    if (source < 1 || source > n) throw InvalidInput("source out of range");
    if (!(target.norm() > 0)) throw InvalidInput("target is zero");
    WStateDesign d;
    d.source = source;
    d.target = target / target.norm();
    d.method = opt.method;
    bool odd_support = true;
    for (Eigen::Index k = 1; k < n; k += 2)
        if (std::abs(d.target(k)) > 1e-12) odd_support = false;
    const bool odd_source = (source - 1) % 2 == 0;
    if (opt.method == WMethod::null_vector && (!odd_support || !odd_source || n % 2 == 0))
        throw InvalidInput("null-vector design needs an odd site count, an odd source and a target on odd sites");
    const int half = (n + 1) / 2;
    const bool fold = opt.allow_half_chain && n % 2 == 1 && n > 3 && source == half && mirror_symmetric(d.target) && half % 2 == 1;
    SynthesisTask task;
    task.target = fold ? fold_target(d.target) : d.target;
    task.source = fold ? 1 : source;
    const int m = task.n();
    const bool cross = odd_support != odd_source;
    // {0, +-1, +-5, ...} also reflects at t0 = pi and reaches targets where the
    // evenly spaced spectrum stalls (odd-uniform targets on 7 and 9 sites).
    std::vector<Spectrum> spectra;
    if (opt.spectrum) spectra = {*opt.spectrum};
    else if (opt.method == WMethod::null_vector) spectra = {reflection_spectrum(m), quarter_spectrum(m)};
    else spectra = {cross ? quarter_spectrum(m) : integer_spectrum(m)};
    task.time = opt.time ? *opt.time : (opt.method == WMethod::commutator && cross ? pi / 2 : pi);
    d.time = task.time;
    d.half_chain = fold;
    for (const Spectrum& sp : spectra) {
        task.spectrum = sp;
        SynthesisResult r = opt.method == WMethod::null_vector
                                ? synthesize_null_vector(null_vector_task(task), opt.flow, opt.random_seeds, opt.seed)
                                : synthesize_commutator(task, opt.flow, 1.0, opt.random_seeds, opt.seed);
        const bool done = r.status == FlowStatus::converged;
        if (d.flowed_spectrum.size() == 0 || r.state.chi > d.flow.state.chi) {
            d.flow = std::move(r);
            d.flowed_spectrum = sp;
        }
        if (done) break;
    }
    d.chain = fold ? unfold_chain(d.flow.h) : d.flow.h;
    if (std::all_of(d.chain.diag.begin(), d.chain.diag.end(), [&](double v) { return std::abs(v) <= opt.flow.off_band_tol; }))
        std::fill(d.chain.diag.begin(), d.chain.diag.end(), 0.0);
    if (d.flow.status == FlowStatus::converged && opt.polish_steps > 0) {
        RealSymTridiag c = d.chain;
        const double before = polish_transfer(c, source, d.target, d.time, 0);
        const double after = polish_transfer(c, source, d.target, d.time, opt.polish_steps);
        if (after < before) d.chain = c;
        d.polish_residual = std::min(before, after);
    }
    const CVec out = propagator(d.chain.dense(), d.time).u.col(source - 1);
    d.amplitude = d.target.cast<Complex>().dot(out);
    d.overlap = std::abs(d.amplitude);
    return d;
}

inline Vec odd_uniform_target(int n) {
    Vec v = Vec::Zero(n);
    for (int k = 0; k < n; k += 2) v(k) = 1.0;
    return v / v.norm();
}

}  // namespace spinforge
