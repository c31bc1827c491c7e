#include "wg/kernels.hpp"

#include <stdexcept>

namespace wg::kernels {

namespace {

struct Table {
  double (*dot)(const double*, const double*, std::size_t);
  double (*nrm2_sq)(const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*xpby)(const double*, double, double*, std::size_t);
  void (*hadamard)(const double*, const double*, double*, std::size_t);
  const char* isa;
};

constexpr Table kScalar{ref::dot, ref::nrm2_sq, ref::axpy, ref::xpby, ref::hadamard, "scalar"};

#if defined(__x86_64__) || defined(_M_X64)
constexpr Table kAvx2{avx2::dot, avx2::nrm2_sq, avx2::axpy, avx2::xpby, avx2::hadamard, "avx2"};

bool cpu_has_avx2() {
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}
#endif

Table pick_default() {
#if defined(__x86_64__) || defined(_M_X64)
  if (cpu_has_avx2()) return kAvx2;
#endif
  return kScalar;
}

Table& active() {
  static Table t = pick_default();
  return t;
}

}  // namespace

double dot(const double* a, const double* b, std::size_t n) { return active().dot(a, b, n); }
double nrm2_sq(const double* a, std::size_t n) { return active().nrm2_sq(a, n); }
void axpy(double alpha, const double* x, double* y, std::size_t n) {
  active().axpy(alpha, x, y, n);
}
void xpby(const double* x, double beta, double* y, std::size_t n) {
  active().xpby(x, beta, y, n);
}
void hadamard(const double* a, const double* b, double* out, std::size_t n) {
  active().hadamard(a, b, out, n);
}

const char* active_isa() { return active().isa; }

void force_isa(const std::string& name) {
  if (name == "scalar") {
    active() = kScalar;
    return;
  }
#if defined(__x86_64__) || defined(_M_X64)
  if (name == "avx2") {
    if (!cpu_has_avx2()) throw std::invalid_argument("kernels: avx2 not supported on this CPU");
    active() = kAvx2;
    return;
  }
#endif
  throw std::invalid_argument("kernels: unknown backend '" + name + "'");
}

}  // namespace wg::kernels
