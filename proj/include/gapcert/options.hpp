#pragma once

#include <cstdint>

namespace gapcert {

// Knobs shared by assembly, eigensolving and norm computations.
struct SolverOptions {
  // Dense matrices (full eigendecomposition, dense norms) up to this
  // Hilbert-space dimension; iterative methods above it.
  std::size_t dense_threshold = 4096;
  // Hard memory budget on the Hilbert-space dimension.
  std::size_t max_dim = std::size_t(1) << 22;
  // Kernel tolerance; 0 selects 1e-10 * max(1, term count).
  double kernel_tol = 0.0;
  double lanczos_tol = 1e-11;
  int lanczos_max_iter = 2000;
  double norm_tol = 1e-10;
  std::uint64_t seed = 12345;
};

}  // namespace gapcert
