#include "cns/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace cns {
namespace fft {

namespace {

struct PlanPair {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
};

std::mutex g_plan_mutex;
std::map<int, PlanPair>& plan_cache() {
    static std::map<int, PlanPair> cache;
    return cache;
}

// FFTW_UNALIGNED lets the cached plan execute on any std::vector storage.
PlanPair& plans_for(int n) {
    std::lock_guard<std::mutex> lock(g_plan_mutex);
    auto& cache = plan_cache();
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    std::vector<std::complex<double>> scratch(static_cast<size_t>(n) * n * n);
    auto* ptr = reinterpret_cast<fftw_complex*>(scratch.data());
    PlanPair p;
    p.fwd = fftw_plan_dft_3d(n, n, n, ptr, ptr, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    p.bwd = fftw_plan_dft_3d(n, n, n, ptr, ptr, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    return cache.emplace(n, p).first->second;
}

}  // namespace

void forward_3d(std::complex<double>* data, int n) {
    auto& p = plans_for(n);
    auto* ptr = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(p.fwd, ptr, ptr);
}

void backward_3d(std::complex<double>* data, int n) {
    auto& p = plans_for(n);
    auto* ptr = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(p.bwd, ptr, ptr);
}

}  // namespace fft
}  // namespace cns
