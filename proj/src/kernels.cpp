#include "yannrl/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace yannrl {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scal_scalar(double alpha, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

void gemv_scalar(const double* A, std::size_t rows, std::size_t cols,
                 const double* x, double* y) {
  for (std::size_t i = 0; i < rows; ++i) y[i] = dot_scalar(A + i * cols, x, cols);
}

void gemv_t_scalar(const double* A, std::size_t rows, std::size_t cols,
                   const double* x, double* y) {
  std::memset(y, 0, cols * sizeof(double));
  for (std::size_t i = 0; i < rows; ++i) axpy_scalar(x[i], A + i * cols, y, cols);
}

void ger_scalar(double* A, std::size_t rows, std::size_t cols, double alpha,
                const double* x, const double* y) {
  for (std::size_t i = 0; i < rows; ++i) axpy_scalar(alpha * x[i], y, A + i * cols, cols);
}

void relu_scalar(const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

const Kernels kScalar = {
    "scalar",     dot_scalar, axpy_scalar, scal_scalar,
    gemv_scalar, gemv_t_scalar, ger_scalar, relu_scalar,
};

std::atomic<const Kernels*> g_active{nullptr};

const Kernels* pick_default() {
  if (const char* env = std::getenv("YANNRL_KERNELS")) {
    if (std::strcmp(env, "scalar") == 0) return &kScalar;
    if (std::strcmp(env, "avx2") == 0 && avx2_kernels()) return avx2_kernels();
  }
  if (const Kernels* k = avx2_kernels()) return k;
  return &kScalar;
}

}  // namespace

const Kernels& scalar_kernels() { return kScalar; }

const Kernels& kernels() {
  const Kernels* k = g_active.load(std::memory_order_acquire);
  if (!k) {
    k = pick_default();
    g_active.store(k, std::memory_order_release);
  }
  return *k;
}

bool select_kernels(std::string_view name) {
  if (name == "scalar") {
    g_active.store(&kScalar, std::memory_order_release);
    return true;
  }
  if (name == "avx2") {
    if (const Kernels* k = avx2_kernels()) {
      g_active.store(k, std::memory_order_release);
      return true;
    }
    return false;
  }
  if (name == "auto") {
    g_active.store(pick_default(), std::memory_order_release);
    return true;
  }
  return false;
}

}  // namespace yannrl
