// GHZ preparation on long Ising chains, estimated through the Majorana picture.
#include <spinforge/spinforge.hpp>

#include <cstdio>

using namespace spinforge;

int main() {
    std::printf("%6s %14s %14s\n", "N", "overlap", "transfer dev");
    for (int n : {5, 11, 21, 51, 101, 201}) {
        const IsingChain c = standard_ising(n);
        std::printf("%6d %14.10f %14.3e\n", n, overlap_estimate(c).overlap, majorana_transfer_check(c));
    }

    std::printf("\nN=21, 200 samples per noise level\n%6s %10s %10s\n", "x%", "mean", "stddev");
    for (int x = 0; x <= 10; x += 2) {
        const SweepPoint p = perturb_sweep(21, x, 200, 7);
        std::printf("%6d %10.6f %10.6f\n", x, p.mean, p.stddev);
    }
}
