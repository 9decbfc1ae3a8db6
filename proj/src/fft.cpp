#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <vector>

namespace tori::detail {
namespace {

#ifdef TORI_EXTENDED_PRECISION
using FftwPlan = fftwl_plan;
using FftwComplex = fftwl_complex;
#define TORI_FFTW(name) fftwl_##name
#else
using FftwPlan = fftw_plan;
using FftwComplex = fftw_complex;
#define TORI_FFTW(name) fftw_##name
#endif

struct Plans {
  FftwPlan r2c = nullptr;
  FftwPlan c2r = nullptr;
};

// FFTW planning is not thread-safe; execution with the new-array interface is.
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

const Plans& plans_for(const Grid& grid) {
  static std::map<std::vector<int>, Plans> cache;
  std::lock_guard lock(plan_mutex());
  auto it = cache.find(grid.sizes());
  if (it != cache.end()) return it->second;

  const int rank = grid.dims();
  std::vector<int> n(grid.sizes());
  auto* real_buf = static_cast<Real*>(TORI_FFTW(malloc)(sizeof(Real) * grid.points()));
  auto* cplx_buf =
      static_cast<FftwComplex*>(TORI_FFTW(malloc)(sizeof(FftwComplex) * grid.modes()));
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  Plans p;
  p.r2c = TORI_FFTW(plan_dft_r2c)(rank, n.data(), real_buf, cplx_buf, flags);
  p.c2r = TORI_FFTW(plan_dft_c2r)(rank, n.data(), cplx_buf, real_buf, flags);
  TORI_FFTW(free)(real_buf);
  TORI_FFTW(free)(cplx_buf);
  return cache.emplace(grid.sizes(), p).first->second;
}

}  // namespace

void forward_transform(const Grid& grid, const Real* samples, Complex* coeffs) {
  const Plans& p = plans_for(grid);
  TORI_FFTW(execute_dft_r2c)(p.r2c, const_cast<Real*>(samples),
                             reinterpret_cast<FftwComplex*>(coeffs));
  const Real scale = Real(1) / static_cast<Real>(grid.points());
  for (std::size_t s = 0; s < grid.modes(); ++s) coeffs[s] *= scale;
}

void backward_transform(const Grid& grid, const Complex* coeffs, Real* samples) {
  const Plans& p = plans_for(grid);
  // c2r overwrites its input.
  thread_local std::vector<Complex> scratch;
  scratch.assign(coeffs, coeffs + grid.modes());
  TORI_FFTW(execute_dft_c2r)(p.c2r, reinterpret_cast<FftwComplex*>(scratch.data()),
                             samples);
}

}  // namespace tori::detail
