#include "nozzle/par.hpp"

#include <algorithm>
#include <cmath>

#ifdef NOZZLE_HAVE_OPENMP
#include <omp.h>
#endif

namespace nozzle::par {

namespace {
ExecMode g_default =
#ifdef NOZZLE_HAVE_OPENMP
    ExecMode::OpenMP;
#else
    ExecMode::Serial;
#endif
}  // namespace

ExecMode default_mode() { return g_default; }
void set_default_mode(ExecMode m) { g_default = m; }

int max_threads() {
#ifdef NOZZLE_HAVE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void csr_matvec(const Csr& A, const double* x, double* y, ExecMode mode) {
  parallel_for(
      A.rows,
      [&](std::size_t i) {
        double s = 0.0;
        for (int k = A.ptr[i]; k < A.ptr[i + 1]; ++k) s += A.val[k] * x[A.col[k]];
        y[i] = s;
      },
      mode);
}

double max_abs(const double* v, std::size_t n, ExecMode mode) {
  if (mode == ExecMode::OpenMP) {
#ifdef NOZZLE_HAVE_OPENMP
    double m = 0.0;
#pragma omp parallel for reduction(max : m) schedule(static)
    for (long long i = 0; i < static_cast<long long>(n); ++i)
      m = std::max(m, std::fabs(v[i]));
    return m;
#endif
  }
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::fabs(v[i]));
  return m;
}

}  // namespace nozzle::par
