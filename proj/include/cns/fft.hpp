#pragma once

#include <complex>
#include <vector>

namespace cns {

/// Thin deterministic wrapper over FFTW's complex 3D transforms.
/// Plans are cached per grid size and created with FFTW_ESTIMATE so results
/// do not depend on planner timing. Executions on distinct arrays are
/// thread-safe.
namespace fft {

/// In-place forward DFT (sign -1), unnormalized: out_k = sum_x in_x e^{-2pi i k.x/n}.
void forward_3d(std::complex<double>* data, int n);
/// In-place backward DFT (sign +1), unnormalized.
void backward_3d(std::complex<double>* data, int n);

}  // namespace fft
}  // namespace cns
