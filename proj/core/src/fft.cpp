#include "nlslab/fft.hpp"

#include "nlslab/errors.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>
#include <vector>

namespace nlslab::fft {
namespace {

class PlanCache {
public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(int n, int sign) {
    std::lock_guard lock(mutex_);
    auto it = plans_.find({n, sign});
    if (it != plans_.end()) return it->second;
    // FFTW_ESTIMATE never touches the arrays and yields the same plan on
    // every run; FFTW_UNALIGNED lets us execute on arbitrary buffers.
    std::vector<fftw_complex> scratch(static_cast<std::size_t>(n) * 2);
    fftw_plan plan = fftw_plan_dft_1d(n, scratch.data(), scratch.data() + n, sign,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plan == nullptr) throw InternalError("fftw: plan creation failed");
    plans_.emplace(std::pair{n, sign}, plan);
    return plan;
  }

private:
  std::mutex mutex_;
  std::map<std::pair<int, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

void execute(std::span<const std::complex<double>> in,
             std::span<std::complex<double>> out, int sign) {
  if (in.size() != out.size() || in.empty())
    throw ConfigurationError("fft: input and output sizes differ or are empty");
  fftw_plan plan = cache().get(static_cast<int>(in.size()), sign);
  // fftw_execute_dft does not write to its input when in != out.
  auto* src = reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in.data()));
  auto* dst = reinterpret_cast<fftw_complex*>(out.data());
  if (src == dst) {
    std::vector<std::complex<double>> copy(in.begin(), in.end());
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(copy.data()), dst);
  } else {
    fftw_execute_dft(plan, src, dst);
  }
}

}  // namespace

void forward(std::span<const std::complex<double>> in,
             std::span<std::complex<double>> out) {
  execute(in, out, FFTW_FORWARD);
}

void backward(std::span<const std::complex<double>> in,
              std::span<std::complex<double>> out) {
  execute(in, out, FFTW_BACKWARD);
}

}  // namespace nlslab::fft
