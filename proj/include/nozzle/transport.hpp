#pragma once

#include "nozzle/geometry.hpp"
#include "nozzle/spline.hpp"

namespace nozzle {

// Stream-function machinery of the transport step. The flux components
// feeding it are the physical (e_r, e_phi) components of A(grad phi, t) at
// the rectangle nodes. A_rt carries an explicit sin(phi) factor; nu is the
// same coefficient with that factor removed, finite on the axis.
struct StreamFunctionField {
  MappedGrid grid;
  Field a_rt;                    // A_rtilde at nodes
  Field a_phi;                   // A_phi at nodes
  Field nu;                      // A_rtilde / sin(phi)
  Field w;                       // phi-trapezoid integral of A_rt per row
  std::vector<double> g_table;   // G(phi_j) = w(r_sh, phi_j)
  double nu_min = 0.0;           // min of nu over the closure
  double total_flux_dev = 0.0;   // sup_i |w(i, phi0) - w(0, phi0)| (relative)

  double w_at(double rt, double phi) const;  // bilinear
};

// Assembles A_rt, A_phi, w and the boundary table G from nodal flux
// components. Throws ReversedFlowError when A_rt/sin(phi) loses positivity.
StreamFunctionField build_stream_function(const Field& flux_r,
                                          const Field& flux_phi,
                                          const ShockFront& front,
                                          const MappedGrid& grid,
                                          par::ExecMode mode = par::default_mode());

// Footpoint K(rt, phi) on the shock: the unique angle with G(K) = w(rt, phi),
// solved on the monotone table by bracketing plus secant polish.
double footpoint(const StreamFunctionField& sf, double rt, double phi);

struct TransportSolution {
  Field value;        // shock_data composed with the footpoint map
  Field dvalue_dphi;  // chain rule through the footpoint map
  Field foot;         // K at nodes
  double mu_star_lo = 0.0, mu_star_hi = 0.0;  // bi-Lipschitz bounds observed
};

// Steady transport of scalar shock data along the stream function's level
// sets. shock_data is a function of the footpoint angle on [0, phi0].
TransportSolution transport_scalar(const CubicSpline& shock_data,
                                   const StreamFunctionField& sf,
                                   par::ExecMode mode = par::default_mode());

}  // namespace nozzle
