// Times the transfer-operator kernel: parallel application against the
// serial reference, plus a correctness cross-check (the two paths must
// agree bitwise, since they sum each row in the same order).
#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#include "ergodic/first_return.hpp"
#include "ergodic/tower.hpp"

using namespace ergodic;

namespace {

double time_apply(const TransferKernel& k, const std::vector<double>& in, bool parallel,
                  int reps) {
    std::vector<double> out(in.size());
    const auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) {
        if (parallel)
            k.apply_parallel(in, out);
        else
            k.apply_serial(in, out);
    }
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / reps;
}

void bench(const GibbsMarkovTower& tower, int grid, int reps) {
    const TransferKernel k(tower, tower.base, grid);
    std::vector<double> in(static_cast<std::size_t>(grid));
    for (int i = 0; i < grid; ++i) in[static_cast<std::size_t>(i)] = 1.0 + 0.5 * std::sin(0.01 * i);

    std::vector<double> a(in.size()), b(in.size());
    k.apply_serial(in, a);
    k.apply_parallel(in, b);
    bool same = true;
    for (std::size_t i = 0; i < a.size(); ++i) same = same && a[i] == b[i];

    const double ts = time_apply(k, in, false, reps);
    const double tp = time_apply(k, in, true, reps);
    std::printf("%-28s grid %6d  serial %6.3f ms  parallel %6.3f ms  speedup %5.2fx  %s\n",
                tower.name.c_str(), grid, ts * 1e3, tp * 1e3, ts / tp,
                same ? "bitwise-equal" : "MISMATCH");
}

} // namespace

int main() {
    const auto ulam = ulam_tower();
    const auto fr = first_return_tower(Map1D::doubling(), {0.0, 0.5}, 40, 1e-12);
    for (int grid : {4096, 65536, 262144}) {
        bench(ulam, grid, 20);
        bench(fr, grid, 20);
    }
    return 0;
}
