#include "specbench/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

#include "specbench/errors.hpp"

namespace specbench::fft {

namespace {

// FFTW's planner is not re-entrant; execution through the new-array interface
// is. Plans are created once per (kind, size) and kept for the process lifetime.
enum class Kind { RealToComplex, ComplexToComplex };

class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(Kind kind, int n) {
    std::lock_guard lock(mutex_);
    auto key = std::make_pair(kind, n);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;

    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan plan = nullptr;
    if (kind == Kind::RealToComplex) {
      auto* in = fftw_alloc_real(static_cast<std::size_t>(n));
      auto* out = fftw_alloc_complex(static_cast<std::size_t>(n / 2 + 1));
      plan = fftw_plan_dft_r2c_1d(n, in, out, flags);
      fftw_free(in);
      fftw_free(out);
    } else {
      auto* in = fftw_alloc_complex(static_cast<std::size_t>(n));
      auto* out = fftw_alloc_complex(static_cast<std::size_t>(n));
      plan = fftw_plan_dft_1d(n, in, out, FFTW_FORWARD, flags);
      fftw_free(in);
      fftw_free(out);
    }
    if (!plan) throw Error("FFTW could not create a plan of size " + std::to_string(n));
    plans_.emplace(key, plan);
    return plan;
  }

  PlanCache(const PlanCache&) = delete;
  PlanCache& operator=(const PlanCache&) = delete;

 private:
  PlanCache() = default;
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  std::mutex mutex_;
  std::map<std::pair<Kind, int>, fftw_plan> plans_;
};

}  // namespace

std::vector<std::complex<double>> forward_real(std::span<const double> input) {
  const int n = static_cast<int>(input.size());
  if (n < 1) throw InvalidParams("FFT length must be >= 1");
  // The r2c transform may scribble on its input; work on a copy.
  std::vector<double> in(input.begin(), input.end());
  std::vector<std::complex<double>> out(static_cast<std::size_t>(n / 2 + 1));
  fftw_plan plan = PlanCache::instance().get(Kind::RealToComplex, n);
  fftw_execute_dft_r2c(plan, in.data(), reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

std::vector<std::complex<double>> forward(std::span<const std::complex<double>> input) {
  const int n = static_cast<int>(input.size());
  if (n < 1) throw InvalidParams("FFT length must be >= 1");
  std::vector<std::complex<double>> in(input.begin(), input.end());
  std::vector<std::complex<double>> out(static_cast<std::size_t>(n));
  fftw_plan plan = PlanCache::instance().get(Kind::ComplexToComplex, n);
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(in.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

}  // namespace specbench::fft
