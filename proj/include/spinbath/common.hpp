// Shared aliases, aligned storage, error types, unit constants.
#pragma once

#include <complex>
#include <cstdlib>
#include <new>
#include <stdexcept>
#include <vector>

namespace spinbath {

using cplx = std::complex<double>;

// One atomic unit of time expressed in femtoseconds.
inline constexpr double fs_per_au = 2.4188843e-2;

inline double fs_to_au(double t_fs) { return t_fs / fs_per_au; }
inline double au_to_fs(double t_au) { return t_au * fs_per_au; }

// A run left its numerical validity domain (divergent recurrence,
// grid-edge contamination, failed convergence).
struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent run configuration.
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// 64-byte aligned allocator so amplitude rows stay SIMD/FFT friendly.
template <class T>
struct aligned_allocator {
  using value_type = T;
  static constexpr std::size_t alignment = 64;

  aligned_allocator() noexcept = default;
  template <class U>
  aligned_allocator(const aligned_allocator<U>&) noexcept {}

  T* allocate(std::size_t n) {
    const std::size_t bytes =
        (n * sizeof(T) + alignment - 1) / alignment * alignment;
    void* p = std::aligned_alloc(alignment, bytes);
    if (p == nullptr) throw std::bad_alloc();
    return static_cast<T*>(p);
  }
  void deallocate(T* p, std::size_t) noexcept { std::free(p); }

  template <class U>
  bool operator==(const aligned_allocator<U>&) const noexcept {
    return true;
  }
};

using cvector = std::vector<cplx, aligned_allocator<cplx>>;
using dvector = std::vector<double>;

}  // namespace spinbath
