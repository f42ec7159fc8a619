#pragma once

#include "ghz_ising.hpp"
#include "synthesis.hpp"

#include <array>
#include <cstdio>
#include <functional>
#include <map>

// 1 -> N cloning on M = 2N-1 qubits, clones on the odd sites 1, 3, ..., M.
// Sites are 1-based; site a is qubit a-1, i.e. bit a-1 of a basis index.

namespace spinforge {

struct AsymmetryProfile {
    int n_clones = 0;
    std::vector<double> betas;
    double a = 0.0;   // sum of betas
    double b2 = 0.0;  // sum of squares

    double b() const { return std::sqrt(b2); }
    int qubits() const { return 2 * n_clones - 1; }

    void validate(double tol = 1e-10) const {
        if (n_clones < 1 || static_cast<int>(betas.size()) != n_clones) throw InvalidInput("profile needs N betas");
        for (double v : betas)
            if (!std::isfinite(v) || v < 0) throw InvalidInput("betas must be finite and non-negative");
        if (std::abs(a * a + b2 - 1.0) > tol) throw InvalidInput("profile violates A^2 + B^2 = 1");
    }
};

// Rescales raw non-negative weights so that A^2 + B^2 = 1.
inline AsymmetryProfile make_profile(const std::vector<double>& raw) {
    if (raw.empty()) throw InvalidInput("profile needs at least one clone");
    double a = 0.0, b2 = 0.0;
    for (double v : raw) {
        if (!std::isfinite(v) || v < 0) throw InvalidInput("betas must be finite and non-negative");
        a += v;
        b2 += v * v;
    }
    if (!(b2 > 0)) throw InvalidInput("betas are all zero");
    const double s = 1.0 / std::sqrt(a * a + b2);
    AsymmetryProfile p;
    p.n_clones = static_cast<int>(raw.size());
    for (double v : raw) p.betas.push_back(v * s);
    p.a = a * s;
    p.b2 = b2 * s * s;
    return p;
}

inline AsymmetryProfile symmetric_profile(int n_clones) {
    if (n_clones < 1) throw InvalidInput("symmetric profile needs N >= 1");
    return make_profile(std::vector<double>(static_cast<std::size_t>(n_clones), 1.0));
}

enum class FidelityFormula { haar, literal };

// literal: (2 + (beta_n + A)^2)/6, kept for comparison only; it disagrees with 23/33 at N = 11.
inline double analytic_fidelity(const AsymmetryProfile& p, int clone, FidelityFormula f = FidelityFormula::haar) {
    p.validate();
    if (clone < 1 || clone > p.n_clones) throw InvalidInput("clone index out of range");
    const double s = p.betas[static_cast<std::size_t>(clone - 1)] + p.a;
    return f == FidelityFormula::haar ? (1.0 + s * s) / 3.0 : (2.0 + s * s) / 6.0;
}

struct ProfileFit {
    AsymmetryProfile profile;
    double scale = 0.0;  // fraction of the requested excess over 1/2 that is attainable
    std::vector<double> fidelities;
};

// Profile whose fidelities are 1/2 + s (F_n - 1/2), with s the largest value the normalisation allows.
inline ProfileFit profile_from_fidelities(const std::vector<double>& wanted) {
    if (wanted.empty()) throw InvalidInput("need at least one fidelity");
    for (double f : wanted)
        if (!(f > 0.5 && f <= 1.0)) throw InvalidInput("target fidelities must lie in (1/2, 1]");
    const auto n = static_cast<double>(wanted.size());
    auto betas_at = [&](double s) {
        std::vector<double> r;
        double sum = 0.0;
        for (double f : wanted) {
            r.push_back(std::sqrt(3.0 * (0.5 + s * (f - 0.5)) - 1.0));
            sum += r.back();
        }
        const double a = sum / (n + 1.0);
        for (double& v : r) v -= a;
        return std::pair{r, a};
    };
    auto norm_at = [&](double s) {
        auto [bs, a] = betas_at(s);
        double q = a * a;
        for (double v : bs) q += v * v;
        return q;
    };
    double lo = 0.0, hi = 1.0;
    while (norm_at(hi) < 1.0) hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (norm_at(mid) < 1.0 ? lo : hi) = mid;
    }
    auto [bs, a] = betas_at(0.5 * (lo + hi));
    for (double v : bs)
        if (v < -1e-12) throw Infeasible("requested fidelities need a negative beta", 0, 0, 0, v);
    for (double& v : bs) v = std::max(v, 0.0);
    ProfileFit fit;
    fit.profile = make_profile(bs);
    fit.scale = 0.5 * (lo + hi);
    for (int c = 1; c <= fit.profile.n_clones; ++c) fit.fidelities.push_back(analytic_fidelity(fit.profile, c));
    return fit;
}

// amp0|0...0> + amp1|1...1> + sum_a one_exc[a]|a> + sum_a m_minus_one_exc[a]|hole at a>
struct CompressedState {
    int m = 0;
    Complex amp0{0.0, 0.0};
    Complex amp1{0.0, 0.0};
    CVec one_exc;
    CVec m_minus_one_exc;

    static CompressedState zero(int m) {
        if (m < 3) throw InvalidInput("compressed states need M >= 3");
        CompressedState s;
        s.m = m;
        s.one_exc = CVec::Zero(m);
        s.m_minus_one_exc = CVec::Zero(m);
        return s;
    }

    double norm() const {
        return std::sqrt(std::norm(amp0) + std::norm(amp1) + one_exc.squaredNorm() + m_minus_one_exc.squaredNorm());
    }

    CompressedState& operator+=(const CompressedState& o) {
        amp0 += o.amp0;
        amp1 += o.amp1;
        one_exc += o.one_exc;
        m_minus_one_exc += o.m_minus_one_exc;
        return *this;
    }

    CompressedState scaled(Complex c) const {
        CompressedState s = *this;
        s.amp0 *= c;
        s.amp1 *= c;
        s.one_exc *= c;
        s.m_minus_one_exc *= c;
        return s;
    }

    Complex dot(const CompressedState& o) const {  // <this|o>
        return std::conj(amp0) * o.amp0 + std::conj(amp1) * o.amp1 + one_exc.dot(o.one_exc) +
               m_minus_one_exc.dot(o.m_minus_one_exc);
    }

    CVec to_dense() const {
        if (m > 26) throw InvalidInput("dense embedding limited to 26 qubits");
        const std::uint64_t full = (std::uint64_t{1} << m) - 1;
        CVec v = CVec::Zero(static_cast<Eigen::Index>(full + 1));
        v[0] += amp0;
        v[static_cast<Eigen::Index>(full)] += amp1;
        for (int a = 0; a < m; ++a) {
            v[static_cast<Eigen::Index>(std::uint64_t{1} << a)] += one_exc[a];
            v[static_cast<Eigen::Index>(full ^ (std::uint64_t{1} << a))] += m_minus_one_exc[a];
        }
        return v;
    }
};

// |0> and |1> images of the optimal map.
inline std::pair<CompressedState, CompressedState> clone_map_target(const AsymmetryProfile& p) {
    p.validate();
    const int m = p.qubits();
    if (m < 3) throw InvalidInput("cloning needs N >= 2");
    CompressedState z = CompressedState::zero(m), o = CompressedState::zero(m);
    z.amp0 = o.amp1 = p.a;
    for (int c = 0; c < p.n_clones; ++c) {
        z.m_minus_one_exc[2 * c] = p.betas[static_cast<std::size_t>(c)];
        o.one_exc[2 * c] = p.betas[static_cast<std::size_t>(c)];
    }
    return {z, o};
}

inline CompressedState clone_map_target(const AsymmetryProfile& p, const Eigen::Vector2cd& input) {
    auto [z, o] = clone_map_target(p);
    CompressedState s = z.scaled(input[0]);
    s += o.scaled(input[1]);
    return s;
}

inline Eigen::Matrix2cd reduced_density(const CompressedState& s, int site) {
    if (site < 1 || site > s.m) throw InvalidInput("site out of range");
    if (s.m == 3) return reduced_qubit(s.to_dense(), 3, site - 1);
    // For M >= 5 only |0..0>,|q> and |hole q>,|1..1> share the rest of the register.
    const int q = site - 1;
    Eigen::Matrix2cd rho;
    const double e2 = s.one_exc.squaredNorm(), h2 = s.m_minus_one_exc.squaredNorm();
    const Complex eq = s.one_exc[q], hq = s.m_minus_one_exc[q];
    rho(0, 0) = std::norm(s.amp0) + (e2 - std::norm(eq)) + std::norm(hq);
    rho(1, 1) = std::norm(s.amp1) + std::norm(eq) + (h2 - std::norm(hq));
    rho(0, 1) = s.amp0 * std::conj(eq) + hq * std::conj(s.amp1);
    rho(1, 0) = std::conj(rho(0, 1));
    return rho;
}

// The six Pauli eigenstates; their average of a quadratic fidelity equals the Haar average.
inline std::array<Eigen::Vector2cd, 6> design_inputs() {
    const double r = 1.0 / std::sqrt(2.0);
    const Complex i(0.0, 1.0);
    std::array<Eigen::Vector2cd, 6> s;
    s[0] << 1.0, 0.0;
    s[1] << 0.0, 1.0;
    s[2] << r, r;
    s[3] << r, -r;
    s[4] << r, i * r;
    s[5] << r, -i * r;
    return s;
}

inline double state_fidelity(const Eigen::Vector2cd& psi, const Eigen::Matrix2cd& rho) {
    return std::real(psi.dot(rho * psi));
}

inline double average_fidelity(const std::function<Eigen::Matrix2cd(const Eigen::Vector2cd&)>& channel) {
    double sum = 0.0;
    for (const auto& psi : design_inputs()) sum += state_fidelity(psi, channel(psi));
    return sum / 6.0;
}

struct OddSupportReport {
    bool pass = true;
    double even_weight = 0.0;  // largest even-site amplitude
    double max_field = 0.0;
    std::string note;
};

inline OddSupportReport odd_support_check(const Vec& target, const std::vector<double>& fields) {
    OddSupportReport r;
    for (Eigen::Index k = 1; k < target.size(); k += 2) r.even_weight = std::max(r.even_weight, std::abs(target[k]));
    for (double b : fields) r.max_field = std::max(r.max_field, std::abs(b));
    if (r.even_weight > 1e-10) {
        r.pass = false;
        r.note = "target has weight on even sites";
    } else if (r.max_field > 1e-10) {
        r.pass = false;
        r.note = "nonzero fields break the +-lambda pairing that keeps even sites empty; set all B_n = 0";
    }
    return r;
}

// Everything the two-stage protocol needs.
struct CloneSetup {
    AsymmetryProfile profile;
    IsingChain ghz;
    RealSymTridiag w;
    double w_time = 0.0;
    int k = 0;  // ancilla on site k+1, input on site k+2

    int qubits() const { return profile.qubits(); }
    int ancilla_site() const { return k + 1; }
    int input_site() const { return k + 2; }
};

inline Vec clone_w_target(const AsymmetryProfile& p) {
    Vec t = Vec::Zero(p.qubits());
    for (int c = 0; c < p.n_clones; ++c) t[2 * c] = p.betas[static_cast<std::size_t>(c)];
    return t / t.norm();
}

// Designs the exchange chain that moves site k+1 onto the beta-weighted odd sites.
inline CloneSetup make_clone_setup(const AsymmetryProfile& p, std::optional<int> offset = std::nullopt,
                                   const WStateOptions& wopt = {}) {
    p.validate();
    if (p.n_clones < 2) throw InvalidInput("cloning pipeline needs N >= 2");
    CloneSetup s;
    s.profile = p;
    const int m = p.qubits();
    // odd k starts the exchange on an even site, which only the three-site closed form reaches;
    // for even N the end site is used instead of the centre
    s.k = offset ? *offset : (m == 3 || p.n_clones % 2 == 1 ? p.n_clones - 1 : 0);
    if (s.k < 0 || s.k > m - 2) throw InvalidInput("offset k must satisfy 0 <= k <= M-2");
    s.ghz = standard_ising(m);
    const Vec target = clone_w_target(p);
    if (m == 3 && s.k == 1) {
        // centre of three sites: e^{-iHt}|2> = -i (J1|1> + J2|3>)/sqrt(2) at t = pi/sqrt(8)
        s.w = RealSymTridiag::zero_diagonal({std::sqrt(2.0) * target[0], std::sqrt(2.0) * target[2]});
        s.w_time = pi / std::sqrt(8.0);
        return s;
    }
    WStateOptions o = wopt;
    if (s.k % 2 == 1) o.method = WMethod::commutator;
    o.flow.tol = std::min(o.flow.tol, 1e-12);
    const WStateDesign d = design_wstate(s.k + 1, target, o);
    if (d.overlap < 1.0 - 1e-9)
        throw Infeasible("W-stage chain design did not converge (overlap " + std::to_string(d.overlap) + ")", 0, 0, 0,
                         1.0 - d.overlap);
    s.w = d.chain;
    s.w_time = d.time;
    return s;
}

struct PipelineOptions {
    double tol = 1e-8;
    bool strict = true;  // throw when a stage leaves its tolerance
};

struct PipelineRun {
    CompressedState state;
    Complex w_phase;                 // <target|e^{-iht}|k+1>
    double gate_residual = 0.0;      // weight outside the compressed family after the gate stage
    double target_residual = 0.0;    // distance to the ideal map, up to global phase
    double max_stage_residual() const { return std::max(gate_residual, target_residual); }
};

class StageError : public Error {
public:
    StageError(const std::string& stage, double residual)
        : Error("stage '" + stage + "' exceeded tolerance (residual " + format_residual(residual) + ")"),
          stage_(stage), residual_(residual) {}
    const std::string& stage() const { return stage_; }
    double residual() const { return residual_; }

private:
    static std::string format_residual(double r) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3e", r);
        return buf;
    }
    std::string stage_;
    double residual_;
};

namespace detail {

inline std::uint64_t reverse_bits(std::uint64_t z, int m) {
    std::uint64_t r = 0;
    for (int q = 0; q < m; ++q)
        if (z >> q & 1) r |= std::uint64_t{1} << (m - 1 - q);
    return r;
}

using SparseState = std::map<std::uint64_t, Complex>;

// G|z> = omega X_{z_R} |GHZ> = omega (|z_R> - i|~z_R>)/sqrt(2)
inline SparseState apply_ghz_symbolic(const SparseState& in, int m, Complex omega) {
    const std::uint64_t full = (std::uint64_t{1} << m) - 1;
    const Complex c0 = omega / std::sqrt(2.0), c1 = omega * Complex(0.0, -1.0) / std::sqrt(2.0);
    SparseState out;
    for (const auto& [z, c] : in) {
        const std::uint64_t r = reverse_bits(z, m);
        out[r] += c * c0;
        out[full ^ r] += c * c1;
    }
    std::erase_if(out, [](const auto& kv) { return std::abs(kv.second) < 1e-15; });
    return out;
}

inline Mat xx_single_excitation(const RealSymTridiag& w) {
    w.validate();
    for (double d : w.diag)
        if (std::abs(d) > 1e-10) throw InvalidInput("exchange chain must have zero fields");
    return RealSymTridiag::zero_diagonal(w.offdiag).dense();
}

inline void check_setup(const CloneSetup& s) {
    s.profile.validate();
    const int m = s.qubits();
    if (m < 3) throw InvalidInput("cloning needs M >= 3");
    if (s.ghz.n != m || static_cast<int>(s.w.n()) != m) throw InvalidInput("chains must have M = 2N-1 sites");
    if (s.k < 0 || s.k > m - 2) throw InvalidInput("offset k must satisfy 0 <= k <= M-2");
}

inline Eigen::Vector2cd normalized_input(const Eigen::Vector2cd& in) {
    const double n = in.norm();
    if (!(n > 0) || !std::isfinite(n)) throw InvalidInput("input state must be nonzero");
    return in / n;
}

inline Complex w_phase(const CloneSetup& s, const CMat& u) {
    const Vec t = clone_w_target(s.profile);
    const Complex amp = t.cast<Complex>().dot(u.col(s.k));
    return std::abs(amp) > 0 ? amp / std::abs(amp) : Complex(1.0, 0.0);
}

}  // namespace detail

// Prepared register before the gate stage: ancilla A|0> + iB conj(w)|1>, input sqrt(Z)|psi>.
inline std::array<Complex, 4> prepared_amplitudes(const AsymmetryProfile& p, Complex w, const Eigen::Vector2cd& psi) {
    const Complex anc0 = p.a, anc1 = Complex(0.0, 1.0) * p.b() * std::conj(w);
    const Complex in0 = psi[0], in1 = Complex(0.0, 1.0) * psi[1];
    return {anc0 * in0, anc1 * in0, anc0 * in1, anc1 * in1};  // |anc in> = 00, 10, 01, 11
}

// Symbolic GHZ stages plus the M x M exchange propagator; never builds a 2^M vector.
inline PipelineRun pipeline_run(const CloneSetup& s, const Eigen::Vector2cd& input, const PipelineOptions& opt = {}) {
    detail::check_setup(s);
    const int m = s.qubits();
    if (m > 63) throw InvalidInput("pipeline limited to 63 qubits");
    const double mt = majorana_transfer_check(s.ghz);
    if (mt > 1e-9) throw StageError("ghz-chain", mt);
    const Eigen::Vector2cd psi = detail::normalized_input(input);
    const CMat u = propagator(detail::xx_single_excitation(s.w), s.w_time).u;
    PipelineRun run;
    run.w_phase = detail::w_phase(s, u);

    const std::uint64_t anc = std::uint64_t{1} << (s.k), inp = std::uint64_t{1} << (s.k + 1);
    const auto amps = prepared_amplitudes(s.profile, run.w_phase, psi);
    detail::SparseState st{{0, amps[0]}, {anc, amps[1]}, {inp, amps[2]}, {anc | inp, amps[3]}};
    std::erase_if(st, [](const auto& kv) { return kv.second == Complex(0.0, 0.0); });

    const Complex omega = ghz_phase(m);
    st = detail::apply_ghz_symbolic(st, m, omega);
    // CZ on the mirror images of the ancilla and input sites
    const std::uint64_t cz = detail::reverse_bits(anc | inp, m);
    for (auto& [z, c] : st)
        if ((z & cz) == cz) c = -c;
    st = detail::apply_ghz_symbolic(st, m, omega);
    detail::SparseState cn;
    for (const auto& [z, c] : st) cn[(z & anc) ? z ^ inp : z] += c;

    const std::uint64_t full = (std::uint64_t{1} << m) - 1;
    CompressedState gate = CompressedState::zero(m);
    double stray = 0.0;
    for (const auto& [z, c] : cn) {
        if (z == 0) {
            gate.amp0 += c;
        } else if (z == full) {
            gate.amp1 += c;
        } else if (std::has_single_bit(z)) {
            gate.one_exc[std::countr_zero(z)] += c;
        } else if (std::has_single_bit(full ^ z)) {
            gate.m_minus_one_exc[std::countr_zero(full ^ z)] += c;
        } else {
            stray += std::norm(c);
        }
    }
    run.gate_residual = std::sqrt(stray);
    if (opt.strict && run.gate_residual > opt.tol) throw StageError("gate", run.gate_residual);

    // |0..0> and |1..1> are null vectors; holes evolve like excitations (global flip symmetry).
    run.state = gate;
    run.state.one_exc = u * gate.one_exc;
    run.state.m_minus_one_exc = u * gate.m_minus_one_exc;

    const CompressedState ideal = clone_map_target(s.profile, psi);
    const Complex ov = ideal.dot(run.state);
    const Complex ph = std::abs(ov) > 0 ? ov / std::abs(ov) : Complex(1.0, 0.0);
    CompressedState diff = run.state;
    diff += ideal.scaled(-ph);
    run.target_residual = diff.norm();
    if (opt.strict && run.target_residual > opt.tol) throw StageError("w-evolution", run.target_residual);
    return run;
}

inline constexpr int brute_force_max_clone_qubits = 13;

namespace detail {

inline void apply_cz(CVec& v, int q1, int q2) {
    const std::uint64_t m = (std::uint64_t{1} << q1) | (std::uint64_t{1} << q2);
    for (Eigen::Index b = 0; b < v.size(); ++b)
        if ((static_cast<std::uint64_t>(b) & m) == m) v[b] = -v[b];
}

inline void apply_cnot(CVec& v, int control, int target) {
    const std::uint64_t c = std::uint64_t{1} << control, t = std::uint64_t{1} << target;
    for (Eigen::Index b = 0; b < v.size(); ++b) {
        const auto ub = static_cast<std::uint64_t>(b);
        if ((ub & c) && !(ub & t)) std::swap(v[b], v[static_cast<Eigen::Index>(ub | t)]);
    }
}

}  // namespace detail

// H_XX = sum_a J_a/2 (X_a X_{a+1} + Y_a Y_{a+1})
inline PauliSum xx_hamiltonian(const RealSymTridiag& w) {
    (void)detail::xx_single_excitation(w);
    PauliSum h(static_cast<int>(w.n()));
    for (int a = 0; a + 1 < static_cast<int>(w.n()); ++a) {
        h.add(0.5 * w.offdiag[static_cast<std::size_t>(a)], "XX", {a, a + 1});
        h.add(0.5 * w.offdiag[static_cast<std::size_t>(a)], "YY", {a, a + 1});
    }
    return h;
}

// Dense simulation of every stage; the oracle for pipeline_run.
inline CVec brute_force_pipeline(const CloneSetup& s, const Eigen::Vector2cd& input) {
    detail::check_setup(s);
    const int m = s.qubits();
    if (m > brute_force_max_clone_qubits || m % 2 == 0)
        throw InvalidInput("brute-force pipeline needs odd M <= 13 (got M = " + std::to_string(m) + ")");
    const Eigen::Vector2cd psi = detail::normalized_input(input);
    const CMat u = propagator(detail::xx_single_excitation(s.w), s.w_time).u;
    const auto amps = prepared_amplitudes(s.profile, detail::w_phase(s, u), psi);
    const std::uint64_t anc = std::uint64_t{1} << s.k, inp = std::uint64_t{1} << (s.k + 1);
    CVec v = CVec::Zero(Eigen::Index{1} << m);
    v[0] = amps[0];
    v[static_cast<Eigen::Index>(anc)] = amps[1];
    v[static_cast<Eigen::Index>(inp)] = amps[2];
    v[static_cast<Eigen::Index>(anc | inp)] = amps[3];

    const PauliSum hi = ising_hamiltonian(s.ghz);
    const double tg = ghz_time();
    v = evolve(hi, tg, v);
    detail::apply_cz(v, m - 1 - s.k, m - 2 - s.k);
    v = evolve(hi, tg, v);
    detail::apply_cnot(v, s.k, s.k + 1);
    return evolve(xx_hamiltonian(s.w), s.w_time, v);
}

enum class CloneMethod { compressed, brute_force };

inline const char* to_string(CloneMethod m) { return m == CloneMethod::compressed ? "compressed" : "brute_force"; }

struct CloneReport {
    AsymmetryProfile profile;
    std::vector<double> fidelities;  // per clone, averaged over the six design inputs
    double spread = 0.0;             // largest per-clone spread over the inputs
    CloneMethod method = CloneMethod::compressed;
    double max_stage_residual = 0.0;
};

inline CloneReport clone_report(const CloneSetup& s, CloneMethod method, const PipelineOptions& opt = {}) {
    detail::check_setup(s);
    CloneReport r;
    r.profile = s.profile;
    r.method = method;
    const int n = s.profile.n_clones, m = s.qubits();
    std::vector<std::vector<double>> per(static_cast<std::size_t>(n));
    for (const auto& psi : design_inputs()) {
        std::function<Eigen::Matrix2cd(int)> rho;
        CVec dense;
        PipelineRun run;
        if (method == CloneMethod::brute_force) {
            dense = brute_force_pipeline(s, psi);
            const CVec ideal = clone_map_target(s.profile, psi).to_dense();
            r.max_stage_residual = std::max(r.max_stage_residual, phase_aligned_distance(dense, ideal));
            rho = [&](int site) { return reduced_qubit(dense, m, site - 1); };
        } else {
            run = pipeline_run(s, psi, opt);
            r.max_stage_residual = std::max(r.max_stage_residual, run.max_stage_residual());
            rho = [&](int site) { return reduced_density(run.state, site); };
        }
        for (int c = 0; c < n; ++c) per[static_cast<std::size_t>(c)].push_back(state_fidelity(psi, rho(2 * c + 1)));
    }
    for (const auto& f : per) {
        double sum = 0.0;
        for (double v : f) sum += v;
        r.fidelities.push_back(sum / static_cast<double>(f.size()));
        const auto [lo, hi] = std::minmax_element(f.begin(), f.end());
        r.spread = std::max(r.spread, *hi - *lo);
    }
    return r;
}

}  // namespace spinforge
