#pragma once

#include "mixmax/luxemburg.hpp"
#include "mixmax/mesh.hpp"
#include "mixmax/young.hpp"

namespace mixmax {

enum class GridScope { Grid0, AllGrids };

// M_{gamma,phi} f on the mesh: for each cell, the sup over in-scope cubes
// containing the cell center of |Q|^{gamma/n} ||f||_{phi,Q}. Cubes run over
// levels [K-J, K] of one grid (Grid0) or of all 3^n shifted grids. Per-cube
// norms are computed once and broadcast to the covered cells.
MeshFn maximal_field(const MeshFn& f, const YoungFn& phi, double gamma, GridScope scope);

// sup over cells of (anchored-cube maximal surrogate) / (sum over the 3^n
// single-grid dyadic maximal fields). Finiteness quantifies the dyadic
// control constant; the surrogate ranges over all axis-aligned cubes with
// dyadic side anchored at mesh cell corners.
double dyadic_control_check(const MeshFn& f, const YoungFn& phi);

// Hedberg-type pointwise control: sup over cells of
//   M_{gamma,Phi}(f/w) / [ M_xi(f^{p/q}/w) (∫ f^p)^{gamma/n} ],
// with Phi = t^r (1+log+ t)^delta and xi the matching auxiliary function
// (the spliced one for r < p, the q-power one for p = r). 0/0 counts as 0.
double hedberg_check(const MeshFn& f, const MeshFn& w, int n, double r, double delta,
                     double gamma, double p);

// sup over cells of (M_xi(v^beta))^{1/beta} / M_eta(v); the lemma step of the
// fractional estimate's proof.
double maximal_embedding_check(const MeshFn& v, const YoungFn& xi, const YoungFn& eta,
                               double beta);

}  // namespace mixmax
