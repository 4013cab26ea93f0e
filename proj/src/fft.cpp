#include "pal/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <new>

namespace pal {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

void ensure_threads_initialized() {
  static const bool ok = [] { return fftw_init_threads() != 0; }();
  (void)ok;
}

}  // namespace

void* fftw_alloc_bytes(std::size_t bytes) {
  void* p = fftw_malloc(bytes == 0 ? 1 : bytes);
  if (!p) throw std::bad_alloc();
  return p;
}

void fftw_free_bytes(void* p) noexcept { fftw_free(p); }

FftPlan FftPlan::plane(std::size_t nx, std::size_t ny, FftDirection dir) {
  std::lock_guard lock(planner_mutex());
  ensure_threads_initialized();
  fftw_plan_with_nthreads(1);
  AlignedBuffer probe(nx * ny);
  auto* p = reinterpret_cast<fftw_complex*>(probe.data());
  // FFTW is row-major; the x-fastest layout maps to dims (ny, nx).
  fftw_plan plan = fftw_plan_dft_2d(static_cast<int>(ny), static_cast<int>(nx), p, p,
                                    dir == FftDirection::forward ? FFTW_FORWARD : FFTW_BACKWARD,
                                    FFTW_ESTIMATE);
  if (!plan) throw Error("fft", "failed to create 2D plan");
  return FftPlan(plan, nx * ny);
}

FftPlan FftPlan::volume(std::size_t nx, std::size_t ny, std::size_t nz, FftDirection dir,
                        std::size_t threads) {
  std::lock_guard lock(planner_mutex());
  ensure_threads_initialized();
  fftw_plan_with_nthreads(static_cast<int>(threads == 0 ? 1 : threads));
  // FFTW_ESTIMATE does not touch the arrays, so a one-element probe is enough.
  AlignedBuffer probe(1);
  auto* p = reinterpret_cast<fftw_complex*>(probe.data());
  fftw_plan plan = fftw_plan_dft_3d(static_cast<int>(nz), static_cast<int>(ny), static_cast<int>(nx), p, p,
                                    dir == FftDirection::forward ? FFTW_FORWARD : FFTW_BACKWARD,
                                    FFTW_ESTIMATE);
  fftw_plan_with_nthreads(1);
  if (!plan) throw Error("fft", "failed to create 3D plan");
  return FftPlan(plan, nx * ny * nz);
}

FftPlan::FftPlan(FftPlan&& o) noexcept : plan_(o.plan_), size_(o.size_) { o.plan_ = nullptr; }

FftPlan& FftPlan::operator=(FftPlan&& o) noexcept {
  if (this != &o) {
    this->~FftPlan();
    plan_ = o.plan_;
    size_ = o.size_;
    o.plan_ = nullptr;
  }
  return *this;
}

FftPlan::~FftPlan() {
  if (plan_) {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(plan_));
  }
}

void FftPlan::execute(Complex* in, Complex* out) const {
  fftw_execute_dft(static_cast<fftw_plan>(plan_), reinterpret_cast<fftw_complex*>(in),
                   reinterpret_cast<fftw_complex*>(out));
}

const char* fft_library_version() { return fftw_version; }

std::size_t next_fast_size(std::size_t n, bool even) {
  if (n < 1) n = 1;
  for (std::size_t m = n;; ++m) {
    if (even && (m % 2) != 0) continue;
    std::size_t r = m;
    for (std::size_t p : {2u, 3u, 5u, 7u})
      while (r % p == 0) r /= p;
    if (r == 1) return m;
  }
}

}  // namespace pal
