#pragma once

#include "numerics.hpp"

#include <bit>
#include <cstdint>

// Dense 2^n state vectors driven by sums of Pauli strings.
// Qubit q (0-based) is bit q of the basis index.

namespace spinforge {

struct PauliTerm {
    double coeff = 0.0;
    std::uint64_t x_mask = 0;  // X or Y positions
    std::uint64_t z_mask = 0;  // Z or Y positions
    int y_count = 0;
};

class PauliSum {
public:
    explicit PauliSum(int qubits) : n_(qubits) {
        if (qubits < 1 || qubits > 30) throw InvalidInput("qubit count must be in [1, 30]");
    }

    int qubits() const { return n_; }
    const std::vector<PauliTerm>& terms() const { return terms_; }

    PauliSum& add(double coeff, const std::string& ops, const std::vector<int>& sites) {
        if (ops.size() != sites.size()) throw InvalidInput("operator string and site list differ in length");
        PauliTerm t;
        t.coeff = coeff;
        for (std::size_t k = 0; k < ops.size(); ++k) {
            const int q = sites[k];
            if (q < 0 || q >= n_) throw InvalidInput("site out of range");
            const std::uint64_t bit = std::uint64_t{1} << q;
            switch (ops[k]) {
                case 'X': t.x_mask ^= bit; break;
                case 'Z': t.z_mask ^= bit; break;
                case 'Y': t.x_mask ^= bit; t.z_mask ^= bit; ++t.y_count; break;
                default: throw InvalidInput("unknown Pauli letter");
            }
        }
        if (coeff != 0.0) terms_.push_back(t);
        return *this;
    }

    // out = H in
    void apply(const CVec& in, CVec& out) const {
        const std::size_t dim = std::size_t{1} << n_;
        out.setZero(static_cast<Eigen::Index>(dim));
        static const Complex ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
        for (const PauliTerm& t : terms_) {
            // Y = iXZ, so the string acts as i^{#Y} X^x Z^z.
            const Complex c = t.coeff * ipow[t.y_count & 3];
            for (std::size_t b = 0; b < dim; ++b) {
                const double sign = (std::popcount(b & t.z_mask) & 1) ? -1.0 : 1.0;
                out[static_cast<Eigen::Index>(b ^ t.x_mask)] += c * sign * in[static_cast<Eigen::Index>(b)];
            }
        }
    }

    double norm_bound() const {
        double s = 0.0;
        for (const PauliTerm& t : terms_) s += std::abs(t.coeff);
        return s;
    }

    CMat dense() const {
        const auto dim = static_cast<Eigen::Index>(std::size_t{1} << n_);
        CMat h(dim, dim);
        CVec e = CVec::Zero(dim), col;
        for (Eigen::Index k = 0; k < dim; ++k) {
            e.setZero();
            e[k] = 1.0;
            apply(e, col);
            h.col(k) = col;
        }
        return h;
    }

private:
    int n_;
    std::vector<PauliTerm> terms_;
};

inline CVec basis_state(int qubits, std::uint64_t index) {
    CVec v = CVec::Zero(static_cast<Eigen::Index>(std::size_t{1} << qubits));
    v[static_cast<Eigen::Index>(index)] = 1.0;
    return v;
}

// e^{-iHt} psi by Chebyshev expansion; exact to roughly `tol` in the 2-norm.
inline CVec evolve(const PauliSum& h, double t, const CVec& psi, double tol = 1e-14) {
    if (t == 0.0) return psi;
    const double r = std::max(h.norm_bound(), 1e-12);
    const double x = r * t;
    const double ax = std::abs(x);
    // T_0, T_1 of H/r applied to psi
    CVec t_prev = psi, t_cur, t_next, tmp;
    h.apply(psi, tmp);
    t_cur = tmp / r;
    const Complex mi(0.0, -1.0);
    CVec out = std::cyl_bessel_j(0.0, ax) * psi;
    Complex coef = 2.0 * mi;
    const double sgn = x < 0 ? -1.0 : 1.0;
    int quiet = 0;
    for (int k = 1;; ++k) {
        // J_k(-x) = (-1)^k J_k(x)
        const double jk = std::cyl_bessel_j(static_cast<double>(k), ax) * ((k & 1) && sgn < 0 ? -1.0 : 1.0);
        out += coef * jk * t_cur;
        coef *= mi;
        if (k > ax && std::abs(jk) < tol * 1e-2) {
            if (++quiet >= 3) break;
        } else {
            quiet = 0;
        }
        h.apply(t_cur, tmp);
        t_next = 2.0 * tmp / r - t_prev;
        t_prev.swap(t_cur);
        t_cur.swap(t_next);
        if (k > 100000) throw Error("Chebyshev expansion did not converge");
    }
    return out;
}

// Reduced single-qubit density matrix of qubit q.
inline Eigen::Matrix2cd reduced_qubit(const CVec& psi, int qubits, int q) {
    Eigen::Matrix2cd rho = Eigen::Matrix2cd::Zero();
    const std::size_t dim = std::size_t{1} << qubits;
    const std::size_t bit = std::size_t{1} << q;
    for (std::size_t b = 0; b < dim; ++b) {
        if (b & bit) continue;
        const Complex a0 = psi[static_cast<Eigen::Index>(b)];
        const Complex a1 = psi[static_cast<Eigen::Index>(b | bit)];
        rho(0, 0) += std::norm(a0);
        rho(1, 1) += std::norm(a1);
        rho(0, 1) += a0 * std::conj(a1);
    }
    rho(1, 0) = std::conj(rho(0, 1));
    return rho;
}

// |<a|b>| maximised over global phase, i.e. min over phi of ||a - e^{i phi} b||.
inline double phase_aligned_distance(const CVec& a, const CVec& b) {
    const Complex ov = b.dot(a);
    const Complex ph = std::abs(ov) > 0 ? ov / std::abs(ov) : Complex(1.0, 0.0);
    return (a - ph * b).norm();
}

}  // namespace spinforge
