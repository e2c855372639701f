#pragma once
// Data-parallel kernels for the wrench-space sweeps. A batch of n vectors of
// dimension d is stored row-major as d rows of n contiguous values
// (structure-of-arrays), so lane k of every row belongs to vector k.
//
// Each kernel has a scalar reference and an AVX2 variant; the variant is
// picked at runtime. Both evaluate the same operations in the same order, so
// results are bitwise identical (the library is built with -ffp-contract=off).

#include <cstddef>
#include <span>
#include <string_view>

#include "pmw/numkernel.hpp"

namespace pmw::simd {

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa);

/// Best ISA supported by this CPU and build.
Isa detected_isa();

/// ISA used by the dispatching overloads. Defaults to detected_isa();
/// PMW_KERNEL=scalar in the environment forces the reference path.
Isa active_isa();
void set_active_isa(Isa isa);

/// y = m * x for every lane. x is cols x n, y is rows x n.
void map_batch(const Matrix& m, std::span<const double> x, std::size_t n, std::span<double> y, Isa isa);
void map_batch(const Matrix& m, std::span<const double> x, std::size_t n, std::span<double> y);

/// out[k] = max_r |x[r][k]|.
void abs_max_batch(std::span<const double> x, std::size_t rows, std::size_t n, std::span<double> out, Isa isa);
void abs_max_batch(std::span<const double> x, std::size_t rows, std::size_t n, std::span<double> out);

/// Half-spaces n_f . p <= d_f given as normals (3 x F, SoA) and offsets (F).
/// out[k] = max_f (n_f . p_k - d_f) for points p (3 x n, SoA).
void plane_excess_batch(std::span<const double> normals, std::span<const double> offsets,
                        std::span<const double> points, std::size_t n, std::span<double> out, Isa isa);
void plane_excess_batch(std::span<const double> normals, std::span<const double> offsets,
                        std::span<const double> points, std::size_t n, std::span<double> out);

namespace scalar {
void map_batch(const double* m, std::size_t rows, std::size_t cols, const double* x, std::size_t n, double* y);
void abs_max_batch(const double* x, std::size_t rows, std::size_t n, double* out);
void plane_excess_batch(const double* normals, const double* offsets, std::size_t faces, const double* points,
                        std::size_t n, double* out);
}  // namespace scalar

namespace avx2 {
bool available();
void map_batch(const double* m, std::size_t rows, std::size_t cols, const double* x, std::size_t n, double* y);
void abs_max_batch(const double* x, std::size_t rows, std::size_t n, double* out);
void plane_excess_batch(const double* normals, const double* offsets, std::size_t faces, const double* points,
                        std::size_t n, double* out);
}  // namespace avx2

}  // namespace pmw::simd
