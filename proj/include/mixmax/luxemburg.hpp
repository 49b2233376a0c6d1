#pragma once

#include "mixmax/mesh.hpp"
#include "mixmax/young.hpp"

namespace mixmax {

struct LuxResult {
  double norm = 0.0;
  int iterations = 0;
  double residual = 0.0;  // defining average evaluated at the returned norm
  bool zero_input = false;
};

// ||f||_{phi,Q} = inf{ lambda > 0 : (1/|Q|) \int_Q phi(|f|/lambda) <= 1 },
// with |Q| the clipped measure |Q ∩ box|. Bracketing bisection at relative
// tolerance 1e-10; pure powers are solved in closed form.
LuxResult lux_norm(const MeshFn& f, const DyadicCube& q, const YoungFn& phi);

// Same with the measure w dx: (1/w(Q)) \int_Q phi(|f|/lambda) w <= 1.
LuxResult weighted_lux_norm(const MeshFn& f, const DyadicCube& q, const YoungFn& phi,
                            const MeshFn& w);

// inf_{tau>0} { tau + (tau/w(Q)) \int_Q phi(|f|/tau) w }, by golden-section
// search on log tau. The objective is the perspective of a convex function,
// hence convex in tau; the bracket spans [1e-6, 1e6] times the Luxemburg norm.
double lux_infimum_form(const MeshFn& f, const DyadicCube& q, const YoungFn& phi,
                        const MeshFn& w);

struct HolderCheck {
  double ratio = 0.0;            // ||fg||_phi / (||f||_psi ||g||_phi2)
  bool zero_over_zero = false;
  bool hypothesis_ok = true;     // psi^{-1} phi2^{-1} <~ phi^{-1} on samples
  double hypothesis_const = 0.0; // measured sup of the inverse-product ratio
};

// Generalized Hoelder inequality check on one cube.
HolderCheck gen_holder_check(const MeshFn& f, const MeshFn& g, const DyadicCube& q,
                             const YoungFn& phi, const YoungFn& psi, const YoungFn& phi2);

// ||f||_{phi,Q}^r / ||f^r||_{phi,Q}; the proof of the Jensen-type lemma bounds
// this by (phi(1)+1)^r.
double jensen_check(const MeshFn& f, const DyadicCube& q, const YoungFn& phi, double r);

}  // namespace mixmax
