#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "pal/types.hpp"

namespace pal {

/// Allocator backed by fftw_malloc so every work buffer has FFTW's SIMD alignment.
template <class T>
struct FftwAllocator {
  using value_type = T;
  FftwAllocator() = default;
  template <class U>
  FftwAllocator(const FftwAllocator<U>&) noexcept {}
  T* allocate(std::size_t n);
  void deallocate(T* p, std::size_t) noexcept;
  template <class U>
  bool operator==(const FftwAllocator<U>&) const noexcept { return true; }
};

void* fftw_alloc_bytes(std::size_t bytes);
void fftw_free_bytes(void* p) noexcept;

template <class T>
T* FftwAllocator<T>::allocate(std::size_t n) {
  return static_cast<T*>(fftw_alloc_bytes(n * sizeof(T)));
}
template <class T>
void FftwAllocator<T>::deallocate(T* p, std::size_t) noexcept {
  fftw_free_bytes(p);
}

using AlignedBuffer = std::vector<Complex, FftwAllocator<Complex>>;

enum class FftDirection { forward, inverse };

/// Owning handle for an FFTW complex-to-complex plan over an x-fastest array.
/// Planning is serialized internally; `execute` is safe from several threads on distinct buffers.
class FftPlan {
 public:
  /// 2D transform of an nx-by-ny array.
  static FftPlan plane(std::size_t nx, std::size_t ny, FftDirection dir);
  /// In-place 3D transform of an nx-by-ny-by-nz array using `threads` FFTW threads.
  static FftPlan volume(std::size_t nx, std::size_t ny, std::size_t nz, FftDirection dir,
                        std::size_t threads = 1);

  FftPlan(FftPlan&&) noexcept;
  FftPlan& operator=(FftPlan&&) noexcept;
  ~FftPlan();

  /// Runs the plan on `in` -> `out` (may alias); both must come from AlignedBuffer storage.
  void execute(Complex* in, Complex* out) const;
  std::size_t size() const { return size_; }

 private:
  FftPlan(void* plan, std::size_t size) : plan_(plan), size_(size) {}
  void* plan_ = nullptr;
  std::size_t size_ = 0;
};

/// Smallest m >= n whose prime factors are all in {2, 3, 5, 7}; optionally also even.
std::size_t next_fast_size(std::size_t n, bool even = false);

/// Version string reported by the linked FFTW library.
const char* fft_library_version();

}  // namespace pal
