#pragma once

#include <map>
#include <optional>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "mixmax/mesh.hpp"
#include "mixmax/young.hpp"

namespace mixmax {

// Maximal cubes of one dyadic grid with ||g||_{phi,Q} > lambda; their union
// is the level set {M_{phi,D} g > lambda} (cellwise, by cell centers), and
// every strict ancestor within the grid has norm <= lambda.
std::vector<DyadicCube> cz_levelset(const MeshFn& g, const YoungFn& phi, int grid_id,
                                    double lambda);

struct SubCube {
  DyadicCube cube;   // Q_{j,i}^k from the CZ of v^r at height a^{kr}
  double vr_avg = 0.0;
  bool gamma_flag = false;
};

struct StratCube {
  DyadicCube cube;   // Q_j^k
  double g_norm = 0.0;
  double vr_avg = 0.0;
  int ell = 0;       // class index, -1 or >= 0
  bool gamma_flag = false;
  std::vector<SubCube> subcubes;  // populated only for ell == -1
};

struct StratLevel {
  int k = 0;
  std::vector<StratCube> cubes;
  std::vector<std::uint8_t> omega_mask;  // cells of Omega_k
  std::vector<std::uint8_t> ek_mask;     // cells of E_k
};

struct Stratification {
  double a = 2.0;
  double r = 1.0;
  int grid_id = 0;
  int N = 0;       // lowest stratum
  int k_max = -1;  // highest nonempty stratum; k_max < N means no strata
  YoungFn phi;
  MeshFn g;        // |f| v
  MeshFn v;
  MeshFn vr;       // v^r
  MeshFn mfield;   // single-grid M_{phi,D} g
  std::vector<StratLevel> levels;
};

// Builds the full level-set stratification of g = f v at heights a^k,
// k in [N, k_max]. N defaults to the smallest k with Omega_k != box, which is
// exactly the range where the maximality sandwich holds on a finite mesh.
Stratification stratify(const MeshFn& f, const MeshFn& v, double r, const YoungFn& phi, double a,
                        std::optional<int> N, int grid_id);

// max over Gamma-cubes Q of |union of strict Gamma-subcubes| / |Q|; asserts
// the proof bound 2^n/(a-1) and nesting-level monotonicity along the way.
double sparsity_check(const Stratification& strat);

struct ForestMember {
  DyadicCube cube;
  int strat_k = 0;
  int ell = 0;
  DyadicCube lambda_parent;       // for ell == -1: the containing Lambda cube
  bool has_lambda_parent = false;
  int parent = -1;                // smallest strict ancestor within the class
  int home = -1;                  // smallest principal cube containing this one
  bool principal = false;
  double avg_u = 0.0;
};

struct PrincipalForest {
  double beta = 0.0;
  std::map<int, std::vector<ForestMember>> classes;  // keyed by ell (incl. -1)
  std::map<int, MeshFn> h1;                          // per ell >= 0
  std::optional<MeshFn> h2;
};

// Principal cubes of every class: growth factor 2 for ell >= 0 and
// a^{(k-t) beta r} for the class -1, with 0 < beta below the fitted A_inf
// exponent of v^r.
PrincipalForest principal_cubes(const Stratification& strat, const MeshFn& u, double beta);

struct ClaimsReport {
  double claim1 = 0.0;  // sup a^{kr}|Q| / ∫_Q Phi(|f|) v^r over Gamma_{l,k}, l >= 0
  double claim2 = 0.0;  // sup_l sup_x h1/u
  double claim3 = 0.0;  // claim 1 for the Lambda_{-1,k} cubes
  double claim4 = 0.0;  // sup_x h2/u
  double lem23_c1 = 0.0;
  double lem23_c2 = 0.0;
  double lem23_max_residual = 0.0;
  int lem23_points = 0;
  int claim1_cubes = 0;
  int claim3_cubes = 0;
  nlohmann::json to_json() const;
};

ClaimsReport claims_check(const Stratification& strat, const PrincipalForest& forest,
                          const MeshFn& u, const MeshFn& v, double r, const YoungFn& phi,
                          const MeshFn& f);

// Offline-inspection exports: cube id, level, class, parent, averages.
nlohmann::json stratification_to_json(const Stratification& strat);
nlohmann::json forest_to_json(const PrincipalForest& forest);

}  // namespace mixmax
