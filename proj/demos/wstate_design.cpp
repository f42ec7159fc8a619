// Design an XX chain that sends one excitation from the centre into a W-type state.
#include <spinforge/spinforge.hpp>

#include <cstdio>

using namespace spinforge;

int main(int argc, char** argv) {
    const int n = argc > 1 ? std::atoi(argv[1]) : 21;
    const int source = (n + 1) / 2;
    const Vec target = odd_uniform_target(n);
    const WStateDesign d = design_wstate(source, target);

    std::printf("N=%d source=%d method=%s half_chain=%s\n", n, source, to_string(d.method), d.half_chain ? "yes" : "no");
    std::printf("time=%.12f overlap=%.12f\n", d.time, d.overlap);
    std::printf("couplings:");
    for (double j : d.chain.offdiag) std::printf(" %.6f", j);
    std::printf("\n");

    const CVec out = propagator(d.chain.dense(), d.time).u.col(source - 1);
    std::printf("%6s %12s %12s\n", "site", "|amp|", "target");
    for (int k = 0; k < n; ++k) std::printf("%6d %12.8f %12.8f\n", k + 1, std::abs(out[k]), std::abs(target[k]));
}
