#include <algorithm>
#include <cmath>
#include <limits>

#include "pmw/batch_kernels.hpp"

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>
#define PMW_HAVE_X86 1
#define PMW_AVX2 __attribute__((target("avx2")))
#else
#define PMW_HAVE_X86 0
#endif

namespace pmw::simd::avx2 {

#if PMW_HAVE_X86

bool available() { return __builtin_cpu_supports("avx2"); }

// Lane tails fall back to the scalar expressions in the same order.

PMW_AVX2 void map_batch(const double* m, std::size_t rows, std::size_t cols, const double* x, std::size_t n,
                        double* y) {
  for (std::size_t r = 0; r < rows; ++r) {
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
      __m256d acc = _mm256_setzero_pd();
      for (std::size_t c = 0; c < cols; ++c) {
        const __m256d mv = _mm256_set1_pd(m[r * cols + c]);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(mv, _mm256_loadu_pd(x + c * n + k)));
      }
      _mm256_storeu_pd(y + r * n + k, acc);
    }
    for (; k < n; ++k) {
      double acc = 0.0;
      for (std::size_t c = 0; c < cols; ++c) acc = acc + m[r * cols + c] * x[c * n + k];
      y[r * n + k] = acc;
    }
  }
}

PMW_AVX2 void abs_max_batch(const double* x, std::size_t rows, std::size_t n, double* out) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    __m256d best = _mm256_setzero_pd();
    for (std::size_t r = 0; r < rows; ++r)
      best = _mm256_max_pd(best, _mm256_andnot_pd(sign, _mm256_loadu_pd(x + r * n + k)));
    _mm256_storeu_pd(out + k, best);
  }
  for (; k < n; ++k) {
    double best = 0.0;
    for (std::size_t r = 0; r < rows; ++r) best = std::max(best, std::fabs(x[r * n + k]));
    out[k] = best;
  }
}

PMW_AVX2 void plane_excess_batch(const double* normals, const double* offsets, std::size_t faces,
                                 const double* points, std::size_t n, double* out) {
  const double* nx = normals;
  const double* ny = normals + faces;
  const double* nz = normals + 2 * faces;
  const double* px = points;
  const double* py = points + n;
  const double* pz = points + 2 * n;
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d x = _mm256_loadu_pd(px + k);
    const __m256d y = _mm256_loadu_pd(py + k);
    const __m256d z = _mm256_loadu_pd(pz + k);
    __m256d worst = _mm256_set1_pd(-std::numeric_limits<double>::infinity());
    for (std::size_t f = 0; f < faces; ++f) {
      __m256d e = _mm256_add_pd(_mm256_mul_pd(_mm256_set1_pd(nx[f]), x), _mm256_mul_pd(_mm256_set1_pd(ny[f]), y));
      e = _mm256_add_pd(e, _mm256_mul_pd(_mm256_set1_pd(nz[f]), z));
      e = _mm256_sub_pd(e, _mm256_set1_pd(offsets[f]));
      worst = _mm256_max_pd(worst, e);
    }
    _mm256_storeu_pd(out + k, worst);
  }
  for (; k < n; ++k) {
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t f = 0; f < faces; ++f) {
      const double e = ((nx[f] * px[k] + ny[f] * py[k]) + nz[f] * pz[k]) - offsets[f];
      worst = std::max(worst, e);
    }
    out[k] = worst;
  }
}

#else

bool available() { return false; }

void map_batch(const double* m, std::size_t rows, std::size_t cols, const double* x, std::size_t n, double* y) {
  scalar::map_batch(m, rows, cols, x, n, y);
}
void abs_max_batch(const double* x, std::size_t rows, std::size_t n, double* out) {
  scalar::abs_max_batch(x, rows, n, out);
}
void plane_excess_batch(const double* normals, const double* offsets, std::size_t faces, const double* points,
                        std::size_t n, double* out) {
  scalar::plane_excess_batch(normals, offsets, faces, points, n, out);
}

#endif

}  // namespace pmw::simd::avx2
