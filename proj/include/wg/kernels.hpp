#pragma once

#include <cstddef>
#include <string>

// Double-precision vector primitives behind the CG solver and the
// coefficient-space norms. Scalar reference implementations live in
// kernels::ref and are always available; an AVX2/FMA variant is selected at
// runtime when the CPU supports it. Dispatched and reference results may
// differ by reduction order, i.e. by O(n * eps) relative rounding.

namespace wg::kernels {

namespace ref {
double dot(const double* a, const double* b, std::size_t n);
double nrm2_sq(const double* a, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);   // y += alpha x
void xpby(const double* x, double beta, double* y, std::size_t n);    // y = x + beta y
void hadamard(const double* a, const double* b, double* out, std::size_t n);
}  // namespace ref

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
double nrm2_sq(const double* a, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void xpby(const double* x, double beta, double* y, std::size_t n);
void hadamard(const double* a, const double* b, double* out, std::size_t n);
}  // namespace avx2
#endif

// Dispatched entry points.
double dot(const double* a, const double* b, std::size_t n);
double nrm2_sq(const double* a, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void xpby(const double* x, double beta, double* y, std::size_t n);
void hadamard(const double* a, const double* b, double* out, std::size_t n);

// Name of the active instruction set ("avx2" or "scalar").
const char* active_isa();

// Forces a specific backend ("avx2", "scalar"); throws std::invalid_argument
// for an unknown or unsupported name. Intended for equivalence tests.
void force_isa(const std::string& name);

}  // namespace wg::kernels
