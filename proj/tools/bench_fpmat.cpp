// Benchmark of the exact linear algebra kernels: serial reference vs the
// OpenMP byte kernel vs the GF(2) bit-packed kernel, with a result check.
#include <chrono>
#include <cstdio>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "pinsep/fpmat.hpp"

using namespace pinsep;

namespace {

FpMat random_matrix(int rows, int cols, uint16_t p, uint64_t seed) {
    FpMat m(rows, cols, p);
    uint64_t s = seed;
    for (auto& x : m.a) {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        x = static_cast<uint8_t>(s % p);
    }
    return m;
}

template <typename F>
double time_of(F&& f) {
    auto t0 = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace

int main(int argc, char** argv) {
    int n = argc > 1 ? std::atoi(argv[1]) : 1024;
#ifdef _OPENMP
    std::printf("OpenMP: %d threads\n", omp_get_max_threads());
#else
    std::printf("OpenMP: disabled\n");
#endif
    for (uint16_t p : {static_cast<uint16_t>(2), static_cast<uint16_t>(3), static_cast<uint16_t>(251)}) {
        FpMat m = random_matrix(n, n, p, 0x9e3779b9 + p);
        RrefResult serial, parallel;
        double ts = time_of([&] { serial = rref_serial(m); });
        double tp = time_of([&] { parallel = rref(m); });
        bool same = serial.R == parallel.R && serial.pivots == parallel.pivots;
        std::printf("rref   p=%-3u n=%-5d serial %8.3fs  parallel %8.3fs  speedup %5.2fx  identical=%s\n", p, n, ts,
                    tp, ts / tp, same ? "yes" : "NO");
        if (!same) return 1;
        int mm = n / 2;
        FpMat a = random_matrix(mm, mm, p, 17 + p), b = random_matrix(mm, mm, p, 99 + p);
        FpMat cs, cp;
        double ms = time_of([&] { cs = matmul_serial(a, b); });
        double mp = time_of([&] { cp = matmul(a, b); });
        std::printf("matmul p=%-3u n=%-5d serial %8.3fs  parallel %8.3fs  speedup %5.2fx  identical=%s\n", p, mm, ms,
                    mp, ms / mp, cs == cp ? "yes" : "NO");
        if (!(cs == cp)) return 1;
    }
    return 0;
}
