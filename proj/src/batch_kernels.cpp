#include "pmw/batch_kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace pmw::simd {

namespace {

Isa initial_isa() {
  const char* env = std::getenv("PMW_KERNEL");
  if (env != nullptr && std::string(env) == "scalar") return Isa::Scalar;
  return detected_isa();
}

std::atomic<Isa>& active() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::DimensionMismatch, what);
}

}  // namespace

std::string_view to_string(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

Isa detected_isa() { return avx2::available() ? Isa::Avx2 : Isa::Scalar; }

Isa active_isa() { return active().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (isa == Isa::Avx2 && !avx2::available()) throw Error(ErrorCode::InvalidArgument, "AVX2 is not available");
  active().store(isa, std::memory_order_relaxed);
}

void map_batch(const Matrix& m, std::span<const double> x, std::size_t n, std::span<double> y, Isa isa) {
  const auto rows = static_cast<std::size_t>(m.rows());
  const auto cols = static_cast<std::size_t>(m.cols());
  require(x.size() >= cols * n && y.size() >= rows * n, "batch buffers are too small for the map");
  // Eigen storage is column-major; the kernels read row-major coefficients.
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = m;
  if (isa == Isa::Avx2 && avx2::available())
    avx2::map_batch(rm.data(), rows, cols, x.data(), n, y.data());
  else
    scalar::map_batch(rm.data(), rows, cols, x.data(), n, y.data());
}

void map_batch(const Matrix& m, std::span<const double> x, std::size_t n, std::span<double> y) {
  map_batch(m, x, n, y, active_isa());
}

void abs_max_batch(std::span<const double> x, std::size_t rows, std::size_t n, std::span<double> out, Isa isa) {
  require(x.size() >= rows * n && out.size() >= n, "batch buffers are too small for abs-max");
  if (isa == Isa::Avx2 && avx2::available())
    avx2::abs_max_batch(x.data(), rows, n, out.data());
  else
    scalar::abs_max_batch(x.data(), rows, n, out.data());
}

void abs_max_batch(std::span<const double> x, std::size_t rows, std::size_t n, std::span<double> out) {
  abs_max_batch(x, rows, n, out, active_isa());
}

void plane_excess_batch(std::span<const double> normals, std::span<const double> offsets,
                        std::span<const double> points, std::size_t n, std::span<double> out, Isa isa) {
  const std::size_t faces = offsets.size();
  require(normals.size() == 3 * faces, "normals must be 3 x faces");
  require(points.size() >= 3 * n && out.size() >= n, "batch buffers are too small for plane excess");
  if (isa == Isa::Avx2 && avx2::available())
    avx2::plane_excess_batch(normals.data(), offsets.data(), faces, points.data(), n, out.data());
  else
    scalar::plane_excess_batch(normals.data(), offsets.data(), faces, points.data(), n, out.data());
}

void plane_excess_batch(std::span<const double> normals, std::span<const double> offsets,
                        std::span<const double> points, std::size_t n, std::span<double> out) {
  plane_excess_batch(normals, offsets, points, n, out, active_isa());
}

}  // namespace pmw::simd
