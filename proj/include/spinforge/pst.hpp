#pragma once

#include "numerics.hpp"

namespace spinforge {

struct PstChain {
    int n = 0;
    std::vector<double> couplings;
    double transfer_time = pi / 2;

    RealSymTridiag matrix() const { return RealSymTridiag::zero_diagonal(couplings); }

    void validate() const {
        if (n < 2) throw InvalidInput("a transfer chain needs at least 2 sites");
        if (static_cast<int>(couplings.size()) != n - 1) throw InvalidInput("chain needs n-1 couplings");
        for (double j : couplings)
            if (!(j > 0) || !std::isfinite(j)) throw InvalidInput("couplings must be finite and positive");
    }
};

// J_k = sqrt(k (n - k)), 1-based k.
inline PstChain standard_couplings(int n) {
    if (n < 2) throw InvalidInput("standard_couplings needs n >= 2");
    PstChain c;
    c.n = n;
    for (int k = 1; k < n; ++k) c.couplings.push_back(std::sqrt(static_cast<double>(k) * (n - k)));
    c.transfer_time = pi / 2;
    return c;
}

// max_k |<n+1-k| e^{-iht0} |k> - (-i)^{n-1}|
inline double verify_mirror(const PstChain& chain) {
    chain.validate();
    const Propagator u = propagator(chain.matrix().dense(), chain.transfer_time);
    Complex expected(1.0, 0.0);
    for (int k = 1; k < chain.n; ++k) expected *= Complex(0.0, -1.0);
    double dev = 0.0;
    for (int k = 0; k < chain.n; ++k) dev = std::max(dev, std::abs(u.u(chain.n - 1 - k, k) - expected));
    return dev;
}

inline double min_gap(const Spectrum& s) {
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < s.values.size(); ++k) {
        const double d = s.values[k] - s.values[k - 1];
        if (d > 1e-12) gap = std::min(gap, d);
    }
    if (!std::isfinite(gap)) throw InvalidInput("spectrum needs at least two distinct values");
    return gap;
}

inline double min_gap_bound(const Spectrum& s) { return pi / min_gap(s); }

}  // namespace spinforge
