// Clone fidelities of the spin-chain cloner against the analytic optimum.
#include <spinforge/spinforge.hpp>

#include <cstdio>

using namespace spinforge;

int main() {
    std::printf("%4s %12s %12s %12s\n", "N", "simulated", "analytic", "spread");
    for (int n = 2; n <= 11; ++n) {
        const AsymmetryProfile p = symmetric_profile(n);
        const CloneReport r = clone_report(make_clone_setup(p), CloneMethod::compressed);
        std::printf("%4d %12.9f %12.9f %12.3e\n", n, r.fidelities[0], analytic_fidelity(p, 1), r.spread);
    }

    const AsymmetryProfile p = make_profile({2, 1, 1});
    const CloneReport r = clone_report(make_clone_setup(p), CloneMethod::compressed);
    std::printf("\nprofile (2,1,1)\n");
    for (int c = 1; c <= 3; ++c)
        std::printf("clone %d: %.9f (analytic %.9f)\n", c, r.fidelities[static_cast<std::size_t>(c - 1)], analytic_fidelity(p, c));
}
