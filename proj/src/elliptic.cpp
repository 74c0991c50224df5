#include "nozzle/elliptic.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "nozzle/io.hpp"

namespace nozzle {

AijSample aij_background(double u0, const GasModel& gas) {
  const double q = gas.b0 - 0.5 * u0 * u0;
  if (q <= 0.0) throw EllipticityLost("aij_background: vacuum background state");
  const double g1 = gas.gamma - 1.0;
  const double app = std::pow(q, 1.0 / g1);
  const double arr = app - u0 * u0 * std::pow(q, (2.0 - gas.gamma) / g1) / g1;
  return {arr, app};
}

AijField assemble_aij(const RadialProfile& profile, const ShockFront& front,
                      const MappedGrid& grid, par::ExecMode mode) {
  AijField out;
  out.a_rr.assign(grid.n_nodes(), 0.0);
  out.a_pp.assign(grid.n_nodes(), 0.0);
  const int np = grid.npn();
  par::parallel_for(
      grid.n_nodes(),
      [&](std::size_t n) {
        const int i = int(n) / np, j = int(n) % np;
        const double r = grid.physical_r(front, grid.r_tilde(i), grid.phi(j));
        const AijSample a = aij_background(profile.u_plus(r), profile.gas());
        out.a_rr[n] = a.a_rr;
        out.a_pp[n] = a.a_pp;
      },
      mode);
  double mn = out.a_rr[0];
  for (std::size_t n = 0; n < grid.n_nodes(); ++n)
    mn = std::min(mn, std::min(out.a_rr[n], out.a_pp[n]));
  out.min_eigenvalue = mn;
  if (!(mn > 0.0))
    throw EllipticityLost(
        "assemble_aij: nodal eigenvalue " + std::to_string(mn) +
        " <= 0; the background is not subsonic on the mapped band");
  return out;
}

namespace {

struct Gauss2 {
  double x[2];
  Gauss2() {
    const double d = 0.5 / std::sqrt(3.0);
    x[0] = 0.5 - d;
    x[1] = 0.5 + d;
  }
};

// Bilinear shapes on [0,1]^2; local order (i,j),(i+1,j),(i,j+1),(i+1,j+1).
inline void shapes(double xi, double eta, double n[4], double dxi[4],
                   double deta[4]) {
  n[0] = (1 - xi) * (1 - eta);
  n[1] = xi * (1 - eta);
  n[2] = (1 - xi) * eta;
  n[3] = xi * eta;
  dxi[0] = -(1 - eta);
  dxi[1] = (1 - eta);
  dxi[2] = -eta;
  dxi[3] = eta;
  deta[0] = -(1 - xi);
  deta[1] = -xi;
  deta[2] = (1 - xi);
  deta[3] = xi;
}

struct ElemBlock {
  double K[4][4] = {};
  double rhs[4] = {};
};

enum class Kind { Conormal, Stream };

struct Assembled {
  Eigen::SparseMatrix<double> A;  // system (bordered for the conormal case)
  Eigen::VectorXd b;
  std::vector<double> anchor_w;   // shock-face weights (conormal)
  double anchor_sum = 0.0;
  std::size_t n_nodes = 0;
};

Assembled assemble(Kind kind, const ConormalProblem* cp, const StreamProblem* sp,
                   const MappedGrid& g, const EllipticOptions& opt) {
  const ShockFront& front = kind == Kind::Conormal ? *cp->front : *sp->front;
  const GasModel gas = kind == Kind::Conormal ? cp->profile->gas() : GasModel{};
  const int np = g.npn(), nrn = g.nrn();
  const std::size_t nn = g.n_nodes();
  const double hr = g.hr(), hp = g.hphi();
  const Gauss2 gp;

  const Field* Fr = nullptr;
  const Field* Fp = nullptr;
  const Field* Q = nullptr;
  if (kind == Kind::Conormal) {
    if (!cp->flux_r.empty()) Fr = &cp->flux_r;
    if (!cp->flux_phi.empty()) Fp = &cp->flux_phi;
    if (!cp->source.empty()) Q = &cp->source;
  } else {
    if (!sp->source.empty()) Q = &sp->source;
  }

  const std::size_t ne = std::size_t(g.nr) * g.nphi;
  std::vector<ElemBlock> blocks(ne);
  par::parallel_for(
      ne,
      [&](std::size_t e) {
        const int ie = int(e) / g.nphi, je = int(e) % g.nphi;
        ElemBlock blk;
        const std::size_t nd[4] = {g.idx(ie, je), g.idx(ie + 1, je),
                                   g.idx(ie, je + 1), g.idx(ie + 1, je + 1)};
        for (int a = 0; a < 2; ++a)
          for (int bq = 0; bq < 2; ++bq) {
            const double xi = gp.x[a], eta = gp.x[bq];
            double N[4], dxi[4], deta[4];
            shapes(xi, eta, N, dxi, deta);
            const double rt = g.r_tilde(ie) + xi * hr;
            const double ph = g.phi(je) + eta * hp;
            const double r = g.physical_r(front, rt, ph);
            const double b = g.map_b(front, ph);
            const double c = g.map_c(front, rt, ph);
            const double sph = std::sin(ph);
            const double w = r * r * sph / b;
            double arr = 1.0, app = 1.0, mass = 0.0;
            if (kind == Kind::Conormal) {
              const AijSample aij = aij_background(cp->profile->u_plus(r), gas);
              arr = aij.a_rr;
              app = aij.a_pp;
            } else {
              mass = w / (r * r * sph * sph);
            }
            const double A00 = w * (arr * b * b + app * c * c / (r * r));
            const double A01 = w * app * c / (r * r);
            const double A11 = w * app / (r * r);
            const double wq = 0.25 * hr * hp;
            double gradr[4], gradp[4];
            for (int l = 0; l < 4; ++l) {
              gradr[l] = dxi[l] / hr;
              gradp[l] = deta[l] / hp;
            }
            for (int l = 0; l < 4; ++l)
              for (int m = 0; m < 4; ++m)
                blk.K[l][m] += wq * (A00 * gradr[l] * gradr[m] +
                                     A01 * (gradr[l] * gradp[m] + gradp[l] * gradr[m]) +
                                     A11 * gradp[l] * gradp[m] + mass * N[l] * N[m]);
            // Volume RHS terms.
            double fr = 0.0, fp = 0.0, q = 0.0;
            for (int l = 0; l < 4; ++l) {
              if (Fr) fr += N[l] * (*Fr)[nd[l]];
              if (Fp) fp += N[l] * (*Fp)[nd[l]];
              if (Q) q += N[l] * (*Q)[nd[l]];
            }
            if (Fr || Fp) {
              const double Ftr = w * (b * fr + c / r * fp);
              const double Ftp = w * (fp / r);
              for (int l = 0; l < 4; ++l)
                blk.rhs[l] += wq * (Ftr * gradr[l] + Ftp * gradp[l]);
            }
            if (Q) {
              const double sgn = kind == Kind::Conormal ? -1.0 : 1.0;
              for (int l = 0; l < 4; ++l) blk.rhs[l] += wq * sgn * w * q * N[l];
            }
          }
        blocks[e] = blk;
      },
      opt.mode);

  // Deterministic scatter.
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(ne * 16 + 4 * nn);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(nn + (kind == Kind::Conormal ? 1 : 0));
  for (std::size_t e = 0; e < ne; ++e) {
    const int ie = int(e) / g.nphi, je = int(e) % g.nphi;
    const std::size_t nd[4] = {g.idx(ie, je), g.idx(ie + 1, je),
                               g.idx(ie, je + 1), g.idx(ie + 1, je + 1)};
    for (int l = 0; l < 4; ++l) {
      b[nd[l]] += blocks[e].rhs[l];
      for (int m = 0; m < 4; ++m)
        trips.emplace_back(int(nd[l]), int(nd[m]), blocks[e].K[l][m]);
    }
  }

  // Shock face r_tilde = r_sh: flux data (conormal) or Robin term (stream).
  std::vector<double> anchor_w(np, 0.0);
  for (int je = 0; je < g.nphi; ++je) {
    const std::size_t n0 = g.idx(0, je), n1 = g.idx(0, je + 1);
    for (int a = 0; a < 2; ++a) {
      const double eta = gp.x[a];
      const double ph = g.phi(je) + eta * hp;
      const double f = front(ph), fpr = front.slope(ph);
      const double meas = f * std::sqrt(f * f + fpr * fpr) * std::sin(ph);
      const double wq = 0.5 * hp * meas;
      const double N0 = 1 - eta, N1 = eta;
      if (kind == Kind::Conormal) {
        const double gam = (1 - eta) * cp->g_shock[je] + eta * cp->g_shock[je + 1];
        b[n0] += wq * gam * N0;
        b[n1] += wq * gam * N1;
        anchor_w[je] += wq * N0;
        anchor_w[je + 1] += wq * N1;
      } else {
        const double mu = (1 - eta) * sp->mu[je] + eta * sp->mu[je + 1];
        const double ar = (1 - eta) * sp->robin_rhs[je] + eta * sp->robin_rhs[je + 1];
        trips.emplace_back(int(n0), int(n0), wq * mu * N0 * N0);
        trips.emplace_back(int(n0), int(n1), wq * mu * N0 * N1);
        trips.emplace_back(int(n1), int(n0), wq * mu * N1 * N0);
        trips.emplace_back(int(n1), int(n1), wq * mu * N1 * N1);
        b[n0] += wq * ar * N0;
        b[n1] += wq * ar * N1;
      }
    }
  }

  if (kind == Kind::Conormal) {
    // Exit face r_tilde = r_ex.
    for (int je = 0; je < g.nphi; ++je) {
      const std::size_t n0 = g.idx(g.nr, je), n1 = g.idx(g.nr, je + 1);
      for (int a = 0; a < 2; ++a) {
        const double eta = gp.x[a];
        const double ph = g.phi(je) + eta * hp;
        const double meas = g.r_ex * g.r_ex * std::sin(ph);
        const double wq = 0.5 * hp * meas;
        const double gex =
            cp->g_exit.empty()
                ? 0.0
                : (1 - eta) * cp->g_exit[je] + eta * cp->g_exit[je + 1];
        b[n0] += wq * gex * (1 - eta);
        b[n1] += wq * gex * eta;
      }
    }
    // Wall face phi = phi0.
    if (!cp->g_wall.empty()) {
      for (int ie = 0; ie < g.nr; ++ie) {
        const std::size_t n0 = g.idx(ie, g.nphi), n1 = g.idx(ie + 1, g.nphi);
        for (int a = 0; a < 2; ++a) {
          const double xi = gp.x[a];
          const double rt = g.r_tilde(ie) + xi * hr;
          const double r = g.physical_r(front, rt, g.phi0);
          const double bmap = g.map_b(front, g.phi0);
          const double meas = r * std::sin(g.phi0) / bmap;
          const double wq = 0.5 * hr * meas;
          const double gw = (1 - xi) * cp->g_wall[ie] + xi * cp->g_wall[ie + 1];
          b[n0] += wq * gw * (1 - xi);
          b[n1] += wq * gw * xi;
        }
      }
    }
  }

  Assembled out;
  out.n_nodes = nn;
  if (kind == Kind::Conormal) {
    // Bordered system: surface-mean anchor on the shock.
    double asum = 0.0;
    for (int j = 0; j < np; ++j) asum += anchor_w[j];
    for (int j = 0; j < np; ++j) {
      if (anchor_w[j] == 0.0) continue;
      trips.emplace_back(int(nn), int(g.idx(0, j)), anchor_w[j]);
      trips.emplace_back(int(g.idx(0, j)), int(nn), anchor_w[j]);
    }
    b[nn] = cp->anchor_mean * asum;
    out.anchor_w = std::move(anchor_w);
    out.anchor_sum = asum;
    out.A.resize(nn + 1, nn + 1);
  } else {
    out.A.resize(nn, nn);
  }
  out.A.setFromTriplets(trips.begin(), trips.end());
  out.b = std::move(b);

  if (kind == Kind::Stream) {
    // Dirichlet psi = 0 on axis, wall and exit: zero row/column, unit diag.
    std::vector<char> diri(nn, 0);
    for (int i = 0; i < nrn; ++i) {
      diri[g.idx(i, 0)] = 1;
      diri[g.idx(i, g.nphi)] = 1;
    }
    for (int j = 0; j < np; ++j) diri[g.idx(g.nr, j)] = 1;
    for (int k = 0; k < out.A.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(out.A, k); it; ++it) {
        const bool dr = diri[it.row()], dc = diri[it.col()];
        if (dr || dc) it.valueRef() = (it.row() == it.col()) ? 1.0 : 0.0;
      }
    for (std::size_t n = 0; n < nn; ++n)
      if (diri[n]) out.b[n] = 0.0;
    out.A.prune(0.0);
  }
  return out;
}

void dump_matrix_market(const Eigen::SparseMatrix<double>& A,
                        const std::string& path) {
  std::string body = "%%MatrixMarket matrix coordinate real general\n";
  body += std::to_string(A.rows()) + " " + std::to_string(A.cols()) + " " +
          std::to_string(A.nonZeros()) + "\n";
  for (int k = 0; k < A.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(A, k); it; ++it)
      body += std::to_string(it.row() + 1) + " " + std::to_string(it.col() + 1) +
              " " + format_double(it.value()) + "\n";
  write_file_atomic(path, body);
}

par::Csr to_csr(const Eigen::SparseMatrix<double>& A) {
  Eigen::SparseMatrix<double, Eigen::RowMajor> R = A;
  R.makeCompressed();
  par::Csr csr;
  csr.rows = R.rows();
  csr.ptr.assign(R.outerIndexPtr(), R.outerIndexPtr() + R.rows() + 1);
  csr.col.assign(R.innerIndexPtr(), R.innerIndexPtr() + R.nonZeros());
  csr.val.assign(R.valuePtr(), R.valuePtr() + R.nonZeros());
  return csr;
}

// Diagonally preconditioned CG with optional removal of the constant null
// space (the anchored conormal system is pure Neumann).
int cg_solve(const par::Csr& A, const std::vector<double>& b,
             std::vector<double>& x, double rtol, int maxit,
             bool project_constants, par::ExecMode mode) {
  const std::size_t n = A.rows;
  std::vector<double> r(n), z(n), p(n), Ap(n);
  std::vector<double> dinv(n, 1.0);
  {
    for (std::size_t i = 0; i < n; ++i)
      for (int k = A.ptr[i]; k < A.ptr[i + 1]; ++k)
        if (A.col[k] == int(i) && A.val[k] != 0.0) dinv[i] = 1.0 / A.val[k];
  }
  auto project = [&](std::vector<double>& v) {
    if (!project_constants) return;
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    const double mean = s / double(n);
    for (std::size_t i = 0; i < n; ++i) v[i] -= mean;
  };
  par::csr_matvec(A, x.data(), Ap.data(), mode);
  double bnorm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    r[i] = b[i] - Ap[i];
    bnorm = std::max(bnorm, std::fabs(b[i]));
  }
  project(r);
  const double tol = rtol * std::max(1.0, bnorm);
  double rz = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    z[i] = dinv[i] * r[i];
    rz += r[i] * z[i];
  }
  p = z;
  int it = 0;
  for (; it < maxit; ++it) {
    double rmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) rmax = std::max(rmax, std::fabs(r[i]));
    if (rmax < tol) break;
    par::csr_matvec(A, p.data(), Ap.data(), mode);
    double pAp = 0.0;
    for (std::size_t i = 0; i < n; ++i) pAp += p[i] * Ap[i];
    if (pAp <= 0.0) throw NonConvergence("cg: operator not positive definite");
    const double alpha = rz / pAp;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * Ap[i];
    }
    project(r);
    double rz_new = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      z[i] = dinv[i] * r[i];
      rz_new += r[i] * z[i];
    }
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  if (it >= maxit) throw NonConvergence("cg: max iterations reached");
  return it;
}

Field finish_direct(const Assembled& sys, Kind kind, LinearSolveInfo* info,
                    const EllipticOptions& opt) {
  Eigen::SparseMatrix<double> A = sys.A;
  A.makeCompressed();
  if (!opt.dump_matrix_path.empty()) dump_matrix_market(A, opt.dump_matrix_path);
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.analyzePattern(A);
  lu.factorize(A);
  if (lu.info() != Eigen::Success)
    throw SingularSystem(kind == Kind::Conormal
                             ? "conormal system is singular (anchor missing?)"
                             : "stream system is singular");
  Eigen::VectorXd x = lu.solve(sys.b);
  const Eigen::VectorXd resid = sys.b - A * x;
  if (info) {
    info->residual = resid.lpNorm<Eigen::Infinity>() /
                     std::max(1.0, sys.b.lpNorm<Eigen::Infinity>());
    info->used_iterative = false;
    info->iterations = 0;
    if (kind == Kind::Conormal) info->multiplier = x[sys.n_nodes];
  }
  if (info && info->residual > 1e-8)
    throw NonConvergence("direct solve residual " +
                         std::to_string(info->residual));
  return Field(x.data(), x.data() + sys.n_nodes);
}

}  // namespace

Field solve_conormal(const ConormalProblem& pb, const MappedGrid& grid,
                     LinearSolveInfo* info, const EllipticOptions& opt) {
  if (!pb.profile || !pb.front)
    throw Error("solve_conormal: profile and front are required");
  if (pb.g_shock.size() != std::size_t(grid.npn()))
    throw Error("solve_conormal: g_shock must have one entry per phi node");
  Assembled sys = assemble(Kind::Conormal, &pb, nullptr, grid, opt);
  const bool iterative =
      opt.force_iterative || grid.n_nodes() > opt.direct_limit;
  if (!iterative) return finish_direct(sys, Kind::Conormal, info, opt);

  // CG path: drop the border, solve the singular Neumann system in the
  // complement of constants, then shift to meet the anchor.
  Eigen::SparseMatrix<double> K = sys.A.topLeftCorner(sys.n_nodes, sys.n_nodes);
  K.makeCompressed();
  const par::Csr csr = to_csr(K);
  std::vector<double> b(sys.b.data(), sys.b.data() + sys.n_nodes);
  // Consistency: remove the incompatible constant component of b.
  double bsum = 0.0;
  for (double v : b) bsum += v;
  const double defect = bsum / double(sys.n_nodes);
  for (double& v : b) v -= defect;
  std::vector<double> x(sys.n_nodes, 0.0);
  const int iters =
      cg_solve(csr, b, x, opt.cg_rtol, opt.cg_max_iter, true, opt.mode);
  // Anchor: surface mean on the shock equals anchor_mean.
  double mx = 0.0;
  for (std::size_t j = 0; j < sys.anchor_w.size(); ++j)
    mx += sys.anchor_w[j] * x[j];  // shock nodes are idx(0, j) = j
  const double shift = pb.anchor_mean - mx / sys.anchor_sum;
  for (double& v : x) v += shift;
  if (info) {
    info->used_iterative = true;
    info->iterations = iters;
    info->multiplier = defect;
    info->residual = opt.cg_rtol;
  }
  return x;
}

Field solve_stream(const StreamProblem& pb, const MappedGrid& grid,
                   LinearSolveInfo* info, const EllipticOptions& opt) {
  if (!pb.front) throw Error("solve_stream: front is required");
  if (pb.mu.size() != std::size_t(grid.npn()) ||
      pb.robin_rhs.size() != std::size_t(grid.npn()))
    throw Error("solve_stream: mu and robin_rhs must have one entry per phi node");
  Assembled sys = assemble(Kind::Stream, nullptr, &pb, grid, opt);
  const bool iterative =
      opt.force_iterative || grid.n_nodes() > opt.direct_limit;
  if (!iterative) return finish_direct(sys, Kind::Stream, info, opt);
  const par::Csr csr = to_csr(sys.A);
  std::vector<double> b(sys.b.data(), sys.b.data() + sys.n_nodes);
  std::vector<double> x(sys.n_nodes, 0.0);
  const int iters =
      cg_solve(csr, b, x, opt.cg_rtol, opt.cg_max_iter, false, opt.mode);
  if (info) {
    info->used_iterative = true;
    info->iterations = iters;
    info->residual = opt.cg_rtol;
    info->multiplier = 0.0;
  }
  return x;
}

double conormal_flux_balance(const ConormalProblem& pb, const MappedGrid& grid,
                             const Field& chi, const EllipticOptions& opt) {
  Assembled sys = assemble(Kind::Conormal, &pb, nullptr, grid, opt);
  Eigen::SparseMatrix<double> K = sys.A.topLeftCorner(sys.n_nodes, sys.n_nodes);
  Eigen::Map<const Eigen::VectorXd> x(chi.data(), chi.size());
  const Eigen::VectorXd Kx = K * x;
  double scale = 1.0;
  for (std::size_t n = 0; n < sys.n_nodes; ++n)
    scale = std::max(scale, std::fabs(Kx[n]));
  return std::fabs(Kx.sum()) / scale;
}

}  // namespace nozzle
