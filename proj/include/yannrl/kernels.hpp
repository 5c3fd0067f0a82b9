#pragma once

#include <cstddef>
#include <string_view>

namespace yannrl {

// Dense double-precision kernels behind Matrix and the network passes.
// A scalar reference implementation always exists; an AVX2 variant is
// selected at runtime when the CPU supports it. The two are equivalence-
// tested; results may differ by reassociation round-off only.
struct Kernels {
  const char* name;
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // x *= alpha
  void (*scal)(double alpha, double* x, std::size_t n);
  // y = A x, A row-major (rows x cols)
  void (*gemv)(const double* A, std::size_t rows, std::size_t cols,
               const double* x, double* y);
  // y = A^T x, A row-major (rows x cols), y has cols entries
  void (*gemv_t)(const double* A, std::size_t rows, std::size_t cols,
                 const double* x, double* y);
  // A += alpha * x y^T, A row-major (rows x cols)
  void (*ger)(double* A, std::size_t rows, std::size_t cols, double alpha,
              const double* x, const double* y);
  // y = max(x, 0)
  void (*relu)(const double* x, double* y, std::size_t n);
};

// Active kernel set. First call decides via CPU detection, honoring the
// YANNRL_KERNELS environment variable ("scalar" or "avx2") when present.
const Kernels& kernels();

// Force a backend by name ("scalar", "avx2", "auto"). Returns false if the
// backend is unavailable on this machine. Intended for tests.
bool select_kernels(std::string_view name);

const Kernels& scalar_kernels();
const Kernels* avx2_kernels();  // nullptr when unsupported

}  // namespace yannrl
