#pragma once

#include "numerics.hpp"
#include "statevector.hpp"

#include <Eigen/Sparse>

#include <istream>
#include <optional>
#include <set>
#include <sstream>

// Uniformly coupled graph Hamiltonians H = A in the single-excitation sector.
// Vertices are 1-based in the public interface.

namespace spinforge {

struct GraphSpec {
    int n = 0;
    std::vector<std::pair<int, int>> edges;  // u < v, 1-based

    GraphSpec() = default;
    GraphSpec(int vertices, std::vector<std::pair<int, int>> e) : n(vertices) {
        if (vertices < 1) throw InvalidInput("graph needs at least one vertex");
        std::set<std::pair<int, int>> seen;
        for (auto [u, v] : e) {
            if (u < 1 || v < 1 || u > n || v > n) throw InvalidInput("edge endpoint out of range");
            if (u == v) throw InvalidInput("self-loops are not allowed");
            if (u > v) std::swap(u, v);
            if (!seen.insert({u, v}).second) continue;
            edges.emplace_back(u, v);
        }
    }

    Eigen::SparseMatrix<double> sparse_adjacency() const {
        std::vector<Eigen::Triplet<double>> t;
        for (auto [u, v] : edges) {
            t.emplace_back(u - 1, v - 1, 1.0);
            t.emplace_back(v - 1, u - 1, 1.0);
        }
        Eigen::SparseMatrix<double> a(n, n);
        a.setFromTriplets(t.begin(), t.end());
        return a;
    }

    Mat adjacency() const {
        if (n > 2048) throw InvalidInput("dense adjacency limited to 2048 vertices");
        return Mat(sparse_adjacency());
    }

    std::vector<std::vector<int>> neighbours() const {
        std::vector<std::vector<int>> nb(static_cast<std::size_t>(n));
        for (auto [u, v] : edges) {
            nb[static_cast<std::size_t>(u - 1)].push_back(v - 1);
            nb[static_cast<std::size_t>(v - 1)].push_back(u - 1);
        }
        return nb;
    }
};

inline GraphSpec path_graph(int n) {
    std::vector<std::pair<int, int>> e;
    for (int v = 1; v < n; ++v) e.emplace_back(v, v + 1);
    return GraphSpec(n, e);
}

inline GraphSpec cycle_graph(int n) {
    if (n < 3) throw InvalidInput("cycles need at least three vertices");
    GraphSpec g = path_graph(n);
    g.edges.emplace_back(1, n);
    return g;
}

// First line n, then one "u v" pair per line; blank lines and '#' comments are skipped.
inline GraphSpec parse_edge_list(std::istream& in) {
    std::string line;
    std::optional<int> n;
    std::vector<std::pair<int, int>> e;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first)) continue;
        std::istringstream fs(first);
        long long a = 0;
        if (!(fs >> a) || !fs.eof()) throw InvalidInput("line " + std::to_string(lineno) + ": expected an integer");
        if (!n) {
            std::string extra;
            if (ls >> extra) throw InvalidInput("line " + std::to_string(lineno) + ": first line must hold only n");
            if (a < 1 || a > 1 << 20) throw InvalidInput("vertex count out of range");
            n = static_cast<int>(a);
            continue;
        }
        long long b = 0;
        std::string extra;
        if (!(ls >> b) || (ls >> extra)) throw InvalidInput("line " + std::to_string(lineno) + ": expected 'u v'");
        if (a < 1 || b < 1 || a > *n || b > *n)
            throw InvalidInput("line " + std::to_string(lineno) + ": vertex out of range 1.." + std::to_string(*n));
        e.emplace_back(static_cast<int>(a), static_cast<int>(b));
    }
    if (!n) throw InvalidInput("edge list is empty");
    return GraphSpec(*n, e);
}

inline GraphSpec parse_edge_list(const std::string& text) {
    std::istringstream in(text);
    return parse_edge_list(in);
}

inline std::string to_edge_list(const GraphSpec& g) {
    std::ostringstream o;
    o << g.n << '\n';
    for (auto [u, v] : g.edges) o << u << ' ' << v << '\n';
    return o.str();
}

// Chebyshev expansion of e^{-iAt} psi for a sparse symmetric A.
inline CVec evolve_sparse(const Eigen::SparseMatrix<double>& a, double t, const CVec& psi, double tol = 1e-15) {
    if (t == 0.0 || a.nonZeros() == 0) return psi;
    double r = 0.0;
    for (int k = 0; k < a.outerSize(); ++k) {
        double s = 0.0;
        for (Eigen::SparseMatrix<double>::InnerIterator it(a, k); it; ++it) s += std::abs(it.value());
        r = std::max(r, s);
    }
    const Eigen::SparseMatrix<std::complex<double>> ac = a.cast<Complex>() / r;
    const double x = r * t, ax = std::abs(x), sgn = x < 0 ? -1.0 : 1.0;
    const Complex mi(0.0, -1.0);
    CVec t_prev = psi, t_cur = ac * psi, t_next;
    CVec out = std::cyl_bessel_j(0.0, ax) * psi;
    Complex coef = 2.0 * mi;
    int quiet = 0;
    for (int k = 1;; ++k) {
        const double jk = std::cyl_bessel_j(static_cast<double>(k), ax) * ((k & 1) && sgn < 0 ? -1.0 : 1.0);
        out += coef * jk * t_cur;
        coef *= mi;
        if (k > ax && std::abs(jk) < tol * 1e-2) {
            if (++quiet >= 3) break;
        } else {
            quiet = 0;
        }
        t_next = 2.0 * (ac * t_cur) - t_prev;
        t_prev.swap(t_cur);
        t_cur.swap(t_next);
    }
    return out;
}

// e^{-iAt}|v>
inline CVec evolve_vertex(const GraphSpec& g, int v, double t) {
    if (v < 1 || v > g.n) throw InvalidInput("source vertex out of range");
    if (g.n <= 256) return propagator(g.adjacency(), t).u.col(v - 1);
    CVec e = CVec::Zero(g.n);
    e[v - 1] = 1.0;
    return evolve_sparse(g.sparse_adjacency(), t, e);
}

inline constexpr int hypercube_max_vertices = 4096;

// Vertex (x_1, ..., x_k), 1-based coordinates, has index 1 + sum (x_i - 1) n^{i-1}.
inline int power_vertex(const GraphSpec& g, const std::vector<int>& coords) {
    int idx = 0, stride = 1;
    for (int x : coords) {
        if (x < 1 || x > g.n) throw InvalidInput("coordinate out of range");
        idx += (x - 1) * stride;
        stride *= g.n;
    }
    return idx + 1;
}

inline GraphSpec hypercube_power(const GraphSpec& g, int k) {
    if (k < 1) throw InvalidInput("hypercube dimension must be >= 1");
    long long dim = 1;
    for (int i = 0; i < k; ++i) {
        dim *= g.n;
        if (dim > hypercube_max_vertices)
            throw InvalidInput("hypercube power exceeds " + std::to_string(hypercube_max_vertices) + " vertices");
    }
    std::vector<std::pair<int, int>> e;
    long long stride = 1;
    for (int axis = 0; axis < k; ++axis, stride *= g.n)
        for (long long base = 0; base < dim; ++base) {
            const long long x = (base / stride) % g.n;
            if (x != 0) continue;
            for (auto [u, v] : g.edges)
                e.emplace_back(static_cast<int>(base + (u - 1) * stride + 1), static_cast<int>(base + (v - 1) * stride + 1));
        }
    return GraphSpec(static_cast<int>(dim), e);
}

inline CVec tensor_power(const CVec& v, int k) {
    CVec out = CVec::Ones(1);
    for (int i = 0; i < k; ++i) {
        CVec next(out.size() * v.size());
        // first coordinate varies fastest
        for (Eigen::Index b = 0; b < v.size(); ++b)
            for (Eigen::Index a = 0; a < out.size(); ++a) next[b * out.size() + a] = out[a] * v[b];
        out = next;
    }
    return out;
}

// max |<x|e^{-iA(G^k)t}|y> - prod <x_i|e^{-iAt}|y_i>| over all y (or 16 sources when large)
inline double hypercube_factorization_error(const GraphSpec& g, int k, double t) {
    const GraphSpec p = hypercube_power(g, k);
    const CMat u = propagator(g.adjacency(), t).u;
    std::vector<int> sources;
    CMat full;
    if (p.n <= 512) {
        for (int y = 1; y <= p.n; ++y) sources.push_back(y);
        full = propagator(p.adjacency(), t).u;
    } else {
        for (int s = 0; s < 16; ++s) sources.push_back(1 + static_cast<int>((static_cast<long long>(s) * 7919) % p.n));
    }
    double worst = 0.0;
    for (int y : sources) {
        const CVec got = full.size() ? CVec(full.col(y - 1)) : evolve_vertex(p, y, t);
        CVec want = CVec::Ones(1);
        int rest = y - 1;
        for (int i = 0; i < k; ++i) {
            const CVec col = u.col(rest % g.n);
            rest /= g.n;
            CVec next(want.size() * col.size());
            for (Eigen::Index b = 0; b < col.size(); ++b)
                for (Eigen::Index a = 0; a < want.size(); ++a) next[b * want.size() + a] = want[a] * col[b];
            want = next;
        }
        worst = std::max(worst, (got - want).cwiseAbs().maxCoeff());
    }
    return worst;
}

struct SynthesisConditionReport {
    struct Level {
        double eigenvalue = 0.0;
        int multiplicity = 1;
        double source_weight = 0.0;  // ||P_m |v>||
        int sign = 0;                // P_m|v> = sign P_m psi, 0 when neither holds
        double sign_error = 0.0;
        double phase_error = 0.0;
    };
    std::vector<Level> levels;
    double phi = 0.0;  // fitted common phase
    bool signs_ok = true;
    bool phases_ok = true;
    bool pass() const { return signs_ok && phases_ok; }
};

// Both conditions are checked per eigenspace, so degenerate spectra need no basis choice.
inline SynthesisConditionReport synthesis_condition_check(const GraphSpec& g, int v, const Vec& psi, double t0,
                                                          double tol = 1e-8) {
    if (v < 1 || v > g.n) throw InvalidInput("source vertex out of range");
    if (psi.size() != g.n) throw InvalidInput("target size does not match the graph");
    if (std::abs(psi.norm() - 1.0) > 1e-10) throw InvalidInput("target must be normalised");
    const EigenSystem es = eig_symmetric(g.adjacency());
    const auto& lam = es.spectrum.values;
    SynthesisConditionReport r;
    Complex acc(0.0, 0.0);
    std::vector<Complex> z;
    for (std::size_t i = 0; i < lam.size();) {
        std::size_t j = i + 1;
        while (j < lam.size() && lam[j] - lam[i] < 1e-9) ++j;
        const Mat basis = es.vectors.middleCols(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j - i));
        const Vec pv = basis * basis.row(v - 1).transpose();
        const Vec pp = basis * (basis.transpose() * psi);
        SynthesisConditionReport::Level l;
        l.eigenvalue = 0.0;
        for (std::size_t q = i; q < j; ++q) l.eigenvalue += lam[q];
        l.eigenvalue /= static_cast<double>(j - i);
        l.multiplicity = static_cast<int>(j - i);
        l.source_weight = pv.norm();
        const double ep = (pv - pp).cwiseAbs().maxCoeff(), em = (pv + pp).cwiseAbs().maxCoeff();
        l.sign = ep <= em ? 1 : -1;
        l.sign_error = std::min(ep, em);
        if (l.sign_error > tol) {
            r.signs_ok = false;
            l.sign = 0;
        }
        const Complex zi = std::exp(Complex(0.0, -l.eigenvalue * t0)) * static_cast<double>(l.sign == 0 ? 1 : l.sign);
        z.push_back(zi);
        if (l.source_weight > tol) acc += l.source_weight * l.source_weight * zi;
        r.levels.push_back(l);
        i = j;
    }
    r.phi = std::arg(acc);
    const Complex ref = std::exp(Complex(0.0, r.phi));
    for (std::size_t m = 0; m < r.levels.size(); ++m) {
        auto& l = r.levels[m];
        if (l.source_weight <= tol) continue;
        l.phase_error = std::abs(z[m] - ref);
        if (l.phase_error > tol) r.phases_ok = false;
    }
    return r;
}

// Two-colouring of each component; nullopt when an odd cycle exists.
inline std::optional<std::vector<int>> bipartition(const GraphSpec& g) {
    const auto nb = g.neighbours();
    std::vector<int> colour(static_cast<std::size_t>(g.n), -1);
    for (int s = 0; s < g.n; ++s) {
        if (colour[static_cast<std::size_t>(s)] >= 0) continue;
        colour[static_cast<std::size_t>(s)] = 0;
        std::vector<int> stack{s};
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            for (int w : nb[static_cast<std::size_t>(u)]) {
                auto& cw = colour[static_cast<std::size_t>(w)];
                if (cw < 0) {
                    cw = 1 - colour[static_cast<std::size_t>(u)];
                    stack.push_back(w);
                } else if (cw == colour[static_cast<std::size_t>(u)]) {
                    return std::nullopt;
                }
            }
        }
    }
    return colour;
}

struct GuardReport {
    bool pass = true;
    bool bipartite = false;
    bool straddles = false;
    std::string note;
};

// On a bipartite graph e^{-iAt}|v> is real on one part and imaginary on the other
// (up to a global phase), so support across both parts needs relative phases of +-i.
inline GuardReport bipartite_phase_guard(const GraphSpec& g, const CVec& psi, double tol = 1e-10) {
    if (psi.size() != g.n) throw InvalidInput("target size does not match the graph");
    GuardReport r;
    const auto colour = bipartition(g);
    r.bipartite = colour.has_value();
    if (!r.bipartite) {
        r.note = "graph is not bipartite; guard does not apply";
        return r;
    }
    std::vector<int> support;
    for (int k = 0; k < g.n; ++k)
        if (std::abs(psi[k]) > tol) support.push_back(k);
    bool seen[2] = {false, false};
    for (int k : support) seen[(*colour)[static_cast<std::size_t>(k)]] = true;
    r.straddles = seen[0] && seen[1];
    if (!r.straddles) return r;
    const int ref = support.front();
    for (int k : support) {
        const Complex ratio = psi[k] / psi[ref];
        const bool same = (*colour)[static_cast<std::size_t>(k)] == (*colour)[static_cast<std::size_t>(ref)];
        const double bad = same ? std::abs(ratio.imag()) : std::abs(ratio.real());
        if (bad > 1e-8 * std::abs(ratio)) {
            r.pass = false;
            r.note = "support straddles the bipartition with relative phases other than +-i";
            return r;
        }
    }
    return r;
}

// Golden-section refinement of the best scan point of |<target|e^{-iAt}|v>| on [lo, hi].
inline double locate_revival(const GraphSpec& g, int v, const CVec& target, double lo, double hi, int scan = 2000) {
    if (!(hi > lo) || scan < 2) throw InvalidInput("revival search needs lo < hi");
    const CVec tn = target / target.norm();
    const EigenSystem es = eig_symmetric(g.adjacency());
    const CVec tv = es.vectors.transpose().cast<Complex>() * tn.conjugate();
    const Vec sv = es.vectors.row(v - 1).transpose();
    auto f = [&](double t) {
        Complex s(0.0, 0.0);
        for (Eigen::Index i = 0; i < sv.size(); ++i)
            s += tv[i] * sv[i] * std::exp(Complex(0.0, -es.spectrum.values[static_cast<std::size_t>(i)] * t));
        return std::abs(s);
    };
    int best = 0;
    double bv = -1.0;
    const double h = (hi - lo) / (scan - 1);
    for (int i = 0; i < scan; ++i)
        if (const double val = f(lo + i * h); val > bv) {
            bv = val;
            best = i;
        }
    double a = lo + std::max(0, best - 1) * h, b = lo + std::min(scan - 1, best + 1) * h;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
        if (fc > fd) {
            b = d; d = c; fd = fc;
            c = b - gr * (b - a); fc = f(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + gr * (b - a); fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

struct RevivalInstance {
    std::string name;
    GraphSpec graph;
    int source = 1;
    CVec target;
    double time = 0.0;                   // derived time used for verification
    std::optional<double> printed_time;  // literal time when it differs from the derived one
    double located_time = 0.0;
    double deviation = 0.0;              // phase-aligned distance at `time`
};

inline double verify_instance(RevivalInstance& r) {
    const CVec out = evolve_vertex(r.graph, r.source, r.time);
    r.deviation = phase_aligned_distance(out, r.target / r.target.norm());
    return r.deviation;
}

inline std::vector<RevivalInstance> revival_fixtures() {
    const Complex i(0.0, 1.0);
    const double s2 = std::sqrt(2.0);
    const double t_split = pi / std::sqrt(8.0);
    const double t_uniform = std::acos(1.0 / std::sqrt(3.0)) / s2;
    std::vector<RevivalInstance> f;
    auto add = [&](std::string name, GraphSpec g, int v, CVec target, double t, std::optional<double> printed) {
        RevivalInstance r;
        r.name = std::move(name);
        r.graph = std::move(g);
        r.source = v;
        r.target = target / target.norm();
        r.time = t;
        r.printed_time = printed;
        f.push_back(std::move(r));
    };
    CVec p2(2), p3a(3), p3b(3), p3c(3), p5(5);
    p2 << 1.0, -i;
    p3a << 0.0, 0.0, 1.0;
    p3b << 1.0, 0.0, 1.0;
    p3c << -i, 1.0, -i;
    p5 << 1.0, i, 0.0, i, 1.0;
    add("P2", path_graph(2), 1, p2, pi / 4, std::nullopt);
    add("P3-transfer", path_graph(3), 1, p3a, pi / s2, std::nullopt);
    add("P3-split", path_graph(3), 2, p3b, t_split, std::nullopt);
    add("P3-uniform", path_graph(3), 2, p3c, t_uniform, t_uniform / pi);
    add("P5", path_graph(5), 3, p5, 2.0 * pi / std::sqrt(27.0), 2.0 / std::sqrt(27.0));
    add("P3^2-uniform", hypercube_power(path_graph(3), 2), power_vertex(path_graph(3), {2, 2}), tensor_power(p3c, 2),
        t_uniform, t_uniform / pi);
    add("P3^3-corners", hypercube_power(path_graph(3), 3), power_vertex(path_graph(3), {2, 2, 2}), tensor_power(p3b, 3),
        t_split, std::nullopt);
    for (auto& r : f) {
        r.located_time = locate_revival(r.graph, r.source, r.target, 0.5 * r.time, 1.5 * r.time);
        verify_instance(r);
    }
    return f;
}

}  // namespace spinforge
