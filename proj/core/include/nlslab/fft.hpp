#pragma once

#include <complex>
#include <span>

namespace nlslab::fft {

// Unnormalized DFTs backed by FFTW. Plans are cached per (size, direction)
// and executed on caller-owned buffers, so concurrent calls are safe.
//   forward:  out[k] = sum_j in[j] e^{-2 pi i jk/N}
//   backward: out[j] = sum_k in[k] e^{+2 pi i jk/N}
void forward(std::span<const std::complex<double>> in,
             std::span<std::complex<double>> out);
void backward(std::span<const std::complex<double>> in,
              std::span<std::complex<double>> out);

}  // namespace nlslab::fft
