#pragma once

#include "pst.hpp"
#include "sampling.hpp"
#include "statevector.hpp"

#include <thread>

namespace spinforge {

// H_I = sum_n b[n] X_n + sum_n j[n] Z_n Z_{n+1}
struct IsingChain {
    int n = 0;
    std::vector<double> j;
    std::vector<double> b;

    void validate() const {
        if (n < 1) throw InvalidInput("Ising chain needs at least one qubit");
        if (static_cast<int>(b.size()) != n || static_cast<int>(j.size()) != n - 1)
            throw InvalidInput("Ising chain needs n fields and n-1 couplings");
        if (!detail::all_finite(b) || !detail::all_finite(j)) throw InvalidInput("Ising chain has non-finite entries");
    }
};

// h1 = i s
struct MajoranaMatrix {
    Mat s;
    int modes() const { return static_cast<int>(s.rows()); }
};

struct GhzReport {
    enum class Method { exact, estimator };
    double overlap = 0.0;
    Method method = Method::estimator;
    IsingChain chain;
    double time = 0.0;      // Hamiltonian time of the GHZ map
    double det_sign = 1.0;  // sign of the determinant before |.|
    double transfer_amplitude = 0.0;
    double raw_overlap = 0.0;  // estimator value before clipping to [0, 1]
};

inline const char* to_string(GhzReport::Method m) { return m == GhzReport::Method::exact ? "exact" : "estimator"; }

// Standard transfer time of the Majorana matrix is pi/2; the GHZ map runs for half of it.
inline double ghz_time(double majorana_t0 = pi / 2) { return majorana_t0 / 2; }

// Global phase of the standard chain's GHZ map: G|0...0> = omega |GHZ>.
// Checked by brute force up to n = 12; the pattern repeats with period 4 in n.
inline Complex ghz_phase(int n) {
    if (n < 1) throw InvalidInput("GHZ phase needs n >= 1");
    if (n % 2 == 1) return {1.0, 0.0};
    const double r = 1.0 / std::sqrt(2.0);
    return n % 4 == 2 ? Complex(-r, -r) : Complex(r, r);
}

inline IsingChain ising_from_pst(const PstChain& p) {
    if (p.n % 2 != 0) throw InvalidInput("Ising identification needs an even-length transfer chain");
    p.validate();
    IsingChain c;
    c.n = p.n / 2;
    for (int k = 0; k < p.n - 1; ++k) (k % 2 == 0 ? c.b : c.j).push_back(p.couplings[k]);
    return c;
}

inline IsingChain standard_ising(int n) { return ising_from_pst(standard_couplings(2 * n)); }

inline std::vector<double> interleaved_band(const IsingChain& c) {
    std::vector<double> band;
    for (int k = 0; k < c.n; ++k) {
        band.push_back(c.b[k]);
        if (k + 1 < c.n) band.push_back(c.j[k]);
    }
    return band;
}

inline MajoranaMatrix build_h1(const IsingChain& c) {
    c.validate();
    const std::vector<double> band = interleaved_band(c);
    MajoranaMatrix m{Mat::Zero(2 * c.n, 2 * c.n)};
    for (std::size_t k = 0; k < band.size(); ++k) {
        const auto i = static_cast<Eigen::Index>(k);
        m.s(i, i + 1) = band[k];
        m.s(i + 1, i) = -band[k];
    }
    return m;
}

// D h1 D^dagger: symmetric tridiagonal with the band magnitudes.
inline RealSymTridiag d_similarity(const MajoranaMatrix& m) {
    const Eigen::Index n = m.s.rows();
    RealSymTridiag t(std::vector<double>(static_cast<std::size_t>(n), 0.0), {});
    for (Eigen::Index k = 0; k + 1 < n; ++k) t.offdiag.push_back(std::abs(m.s(k, k + 1)));
    return t;
}

inline CVec ghz_target(int n) {
    if (n < 1 || n > 30) throw InvalidInput("GHZ target needs 1 <= n <= 30");
    CVec v = CVec::Zero(static_cast<Eigen::Index>(std::size_t{1} << n));
    v[0] = 1.0 / std::sqrt(2.0);
    v[v.size() - 1] = Complex(0.0, -1.0 / std::sqrt(2.0));
    return v;
}

inline PauliSum ising_hamiltonian(const IsingChain& c) {
    c.validate();
    PauliSum h(c.n);
    for (int q = 0; q < c.n; ++q) h.add(c.b[q], "X", {q});
    for (int q = 0; q + 1 < c.n; ++q) h.add(c.j[q], "ZZ", {q, q + 1});
    return h;
}

inline constexpr int brute_force_max_qubits = 12;

inline CVec brute_force_evolve(const IsingChain& c, double t, const CVec& psi0) {
    c.validate();
    if (c.n > brute_force_max_qubits)
        throw InvalidInput("brute-force evolution limited to n <= 12 qubits (2^12 amplitudes); use overlap_estimate for n = " +
                           std::to_string(c.n));
    if (psi0.size() != (Eigen::Index{1} << c.n)) throw InvalidInput("state dimension does not match 2^n");
    return evolve(ising_hamiltonian(c), t, psi0);
}

inline GhzReport ghz_overlap_exact(const IsingChain& c, double t) {
    GhzReport r;
    r.method = GhzReport::Method::exact;
    r.chain = c;
    r.time = t;
    const CVec out = brute_force_evolve(c, t, basis_state(c.n, 0));
    r.overlap = r.raw_overlap = std::abs(ghz_target(c.n).dot(out));
    return r;
}

inline Mat majorana_transfer(const IsingChain& c, double t0) {
    const MajoranaMatrix m = build_h1(c);
    return antisym_exp(Mat(m.s * t0));
}

// max deviation of e^{-i h1 t0} from |n> -> (-1)^n |2N+1-n>
inline double majorana_transfer_check(const IsingChain& c, double t0 = pi / 2) {
    const Mat u = majorana_transfer(c, t0);
    const Eigen::Index m = u.rows();
    Mat rule = Mat::Zero(m, m);
    for (Eigen::Index k = 0; k < m; ++k) rule(m - 1 - k, k) = (k % 2 == 0) ? -1.0 : 1.0;
    return detail::max_abs(Mat(u - rule));
}

inline Mat estimator_h0(int n) {
    Mat h0 = Mat::Zero(2 * n, 2 * n);
    for (int k = 1; k < n; ++k) {
        h0(2 * k - 1, 2 * k) = 1.0;
        h0(2 * k, 2 * k - 1) = -1.0;
    }
    return h0;
}

inline GhzReport overlap_estimate(const IsingChain& c, double t0 = pi / 2) {
    const Mat u = majorana_transfer(c, t0);
    const Mat h0 = estimator_h0(c.n);
    const Mat m = u * h0 * u.transpose() * h0 - Mat::Identity(2 * c.n, 2 * c.n);
    const double det = m.determinant();
    GhzReport r;
    r.method = GhzReport::Method::estimator;
    r.chain = c;
    r.time = ghz_time(t0);
    r.det_sign = det < 0 ? -1.0 : 1.0;
    r.transfer_amplitude = u(2 * c.n - 1, 0);
    r.raw_overlap = (1.0 + std::abs(r.transfer_amplitude)) / std::ldexp(1.0, c.n) * std::sqrt(std::abs(det));
    r.overlap = std::clamp(r.raw_overlap, 0.0, 1.0);
    return r;
}

struct BasisMapResult {
    std::string reversed;
    std::string rule;
};

// X_x |0...0> -> X_{x_R} |GHZ>, no extra phase. Character q is qubit q+1.
inline BasisMapResult basis_map(const std::string& x) {
    for (char ch : x)
        if (ch != '0' && ch != '1') throw InvalidInput("bit string may only contain 0 and 1");
    BasisMapResult r{std::string(x.rbegin(), x.rend()), {}};
    std::string sites;
    for (std::size_t q = 0; q < r.reversed.size(); ++q)
        if (r.reversed[q] == '1') sites += (sites.empty() ? "" : ",") + std::to_string(q + 1);
    r.rule = sites.empty() ? "GHZ" : "X on sites {" + sites + "} applied to GHZ";
    return r;
}

inline std::uint64_t bits_to_index(const std::string& x) {
    std::uint64_t idx = 0;
    for (std::size_t q = 0; q < x.size(); ++q)
        if (x[q] == '1') idx |= std::uint64_t{1} << q;
    return idx;
}

// X_{x_R} |GHZ> as a vector
inline CVec basis_map_state(const std::string& x) {
    const int n = static_cast<int>(x.size());
    const std::uint64_t flip = bits_to_index(basis_map(x).reversed);
    const CVec g = ghz_target(n);
    CVec out = CVec::Zero(g.size());
    for (Eigen::Index k = 0; k < g.size(); ++k) out[static_cast<Eigen::Index>(static_cast<std::uint64_t>(k) ^ flip)] = g[k];
    return out;
}

// Every B_n, J_n scaled by (1 + u), u uniform in [-x/100, x/100]; fields drawn first.
inline IsingChain perturb_chain(const IsingChain& base, double x_percent, std::mt19937_64& rng) {
    IsingChain c = base;
    const double w = x_percent / 100.0;
    for (double& v : c.b) v *= 1.0 + uniform(rng, -w, w);
    for (double& v : c.j) v *= 1.0 + uniform(rng, -w, w);
    return c;
}

inline IsingChain perturbed_sample(const IsingChain& base, double x_percent, std::uint64_t seed, std::uint64_t index) {
    auto rng = sample_stream(seed, index);
    return perturb_chain(base, x_percent, rng);
}

struct SweepPoint {
    double x_percent = 0.0;
    double mean = 0.0;
    double stddev = 0.0;
    std::vector<double> values;
};

inline SweepPoint perturb_sweep(int n, double x_percent, int samples, std::uint64_t seed, unsigned threads = 0) {
    if (samples < 1) throw InvalidInput("perturb_sweep needs at least one sample");
    if (x_percent < 0) throw InvalidInput("perturbation percentage must be non-negative");
    const IsingChain base = standard_ising(n);
    SweepPoint p;
    p.x_percent = x_percent;
    p.values.assign(static_cast<std::size_t>(samples), 0.0);
    if (threads == 0) threads = thread_budget();
    threads = std::min<unsigned>(threads, static_cast<unsigned>(samples));
    auto work = [&](unsigned w) {
        for (int s = static_cast<int>(w); s < samples; s += static_cast<int>(threads))
            p.values[static_cast<std::size_t>(s)] =
                overlap_estimate(perturbed_sample(base, x_percent, seed, static_cast<std::uint64_t>(s))).overlap;
    };
    if (threads <= 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
        for (auto& th : pool) th.join();
    }
    double sum = 0.0;
    for (double v : p.values) sum += v;
    p.mean = sum / samples;
    double ss = 0.0;
    for (double v : p.values) ss += (v - p.mean) * (v - p.mean);
    p.stddev = samples > 1 ? std::sqrt(ss / (samples - 1)) : 0.0;
    return p;
}

}  // namespace spinforge
