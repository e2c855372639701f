#include <algorithm>
#include <cmath>
#include <limits>

#include "pmw/batch_kernels.hpp"

namespace pmw::simd::scalar {

// m is row-major rows x cols.
void map_batch(const double* m, std::size_t rows, std::size_t cols, const double* x, std::size_t n, double* y) {
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t k = 0; k < n; ++k) {
      double acc = 0.0;
      for (std::size_t c = 0; c < cols; ++c) acc = acc + m[r * cols + c] * x[c * n + k];
      y[r * n + k] = acc;
    }
  }
}

void abs_max_batch(const double* x, std::size_t rows, std::size_t n, double* out) {
  for (std::size_t k = 0; k < n; ++k) {
    double best = 0.0;
    for (std::size_t r = 0; r < rows; ++r) best = std::max(best, std::fabs(x[r * n + k]));
    out[k] = best;
  }
}

void plane_excess_batch(const double* normals, const double* offsets, std::size_t faces, const double* points,
                        std::size_t n, double* out) {
  const double* nx = normals;
  const double* ny = normals + faces;
  const double* nz = normals + 2 * faces;
  const double* px = points;
  const double* py = points + n;
  const double* pz = points + 2 * n;
  for (std::size_t k = 0; k < n; ++k) {
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t f = 0; f < faces; ++f) {
      const double e = ((nx[f] * px[k] + ny[f] * py[k]) + nz[f] * pz[k]) - offsets[f];
      worst = std::max(worst, e);
    }
    out[k] = worst;
  }
}

}  // namespace pmw::simd::scalar
