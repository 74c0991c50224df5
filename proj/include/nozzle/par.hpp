#pragma once

#include <cstddef>
#include <vector>

namespace nozzle::par {

// Execution mode for the data-parallel kernels. Every kernel has a serial
// reference implementation and an OpenMP one producing bitwise-identical
// results (each output element is computed independently with a fixed
// accumulation order), so tests can compare them exactly.
enum class ExecMode { Serial, OpenMP };

// Default mode: OpenMP when compiled in, serial otherwise.
ExecMode default_mode();
void set_default_mode(ExecMode m);

// Number of worker threads the OpenMP mode would use.
int max_threads();

// parallel_for(n, f): calls f(i) for i in [0, n). Under OpenMP the iterations
// are distributed statically; f must write only to index-i slots.
template <class F>
void parallel_for(std::size_t n, F&& f, ExecMode mode) {
  if (mode == ExecMode::OpenMP) {
#ifdef NOZZLE_HAVE_OPENMP
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(n); ++i)
      f(static_cast<std::size_t>(i));
    return;
#endif
  }
  for (std::size_t i = 0; i < n; ++i) f(i);
}

template <class F>
void parallel_for(std::size_t n, F&& f) {
  parallel_for(n, f, default_mode());
}

// y = A*x for a CSR matrix. Row-wise accumulation order is fixed, so the
// OpenMP result is bitwise identical to the serial one.
struct Csr {
  std::size_t rows = 0;
  std::vector<int> ptr;      // size rows+1
  std::vector<int> col;      // size nnz
  std::vector<double> val;   // size nnz
};

void csr_matvec(const Csr& A, const double* x, double* y, ExecMode mode);

// max_i |v_i| with deterministic result under any thread count.
double max_abs(const double* v, std::size_t n, ExecMode mode);

}  // namespace nozzle::par
