#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "mixmax/maximal.hpp"
#include "mixmax/mesh.hpp"
#include "mixmax/young.hpp"

namespace mixmax {

enum class Variant { Theorem1, StrongForm, Corollary, Sawyer, Theorem3, Theorem4 };
std::string to_string(Variant v);
Variant variant_from_string(const std::string& s);

struct SweepSpec {
  double t_lo_rel = 1e-3;
  double t_hi_rel = 1e3;
  int count = 48;
};

// Geometric t grid anchored at max f; falls back to an absolute grid when
// f vanishes identically.
std::vector<double> make_sweep(const SweepSpec& spec, double f_max);

struct RatioRow {
  double t = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool has_ratio = false;
  double ratio = 0.0;
  bool clamped = false;
};

struct RatioReport {
  std::string variant;
  std::vector<RatioRow> rows;
  double sup_ratio = 0.0;
  bool hard_failure = false;  // some row had LHS > 0 with RHS = 0
  bool monotone_ok = true;    // LHS and RHS nonincreasing along the sweep
  std::map<std::string, double> refinement_deltas;  // "J+1", "K+2"
  double ratio_ceiling = 0.0;
  bool pass = true;
  nlohmann::json extra() const;
  std::map<std::string, double> extra_scalars;
};

// Inputs materialized on one mesh.
struct TheoremData {
  MeshFn u, v, f;
  double r = 1.0;
  YoungFn phi;
  GridScope scope = GridScope::AllGrids;
};

// One sweep of the main mixed inequality
//   u v^r({ M_phi(f v)/M_phi v > t }) <= C ∫ Phi(|f|/t) u v^r.
RatioReport theorem1_curve(const TheoremData& d, const std::vector<double>& ts);

// Stronger form with denominator v instead of M_phi v. The Sawyer case is
// this curve with phi(t) = t and r = 1.
RatioReport strong_form_curve(const TheoremData& d, const std::vector<double>& ts);

// Corollary: psi equivalent to phi for large t; the right-hand side uses
// Psi(C2 |f|/t) with C2 chosen from {1,2,4,8} to minimize the sup ratio.
RatioReport corollary_curve(const TheoremData& d, const YoungFn& psi,
                            const std::vector<double>& ts);

struct FractionalData {
  MeshFn u, v, f;
  int n = 1;
  double r = 1.0, delta = 0.0, gamma = 0.5, p = 1.0;  // p ignored for theorem 4
  GridScope scope = GridScope::AllGrids;
};

RatioReport theorem3_curve(const FractionalData& d, const std::vector<double>& ts);
RatioReport theorem4_curve(const FractionalData& d, const std::vector<double>& ts);

// Weak-modular-implication lemma: T sub-additive with a weak modular bound
// and an L-infinity bound C0. The prior sweep measures the hypothesis
// constant on the truncated inputs; the conclusion re-runs the sweep with the
// domain restricted to {|f| > t/(2 C0)} and argument 2c|f|/t.
struct ModularLemmaReport {
  bool pass = true;
  double C_hyp = 0.0;
  double C0 = 1.0;
  std::vector<RatioRow> rows;  // lhs vs restricted rhs
};
using FieldOperator = std::function<MeshFn(const MeshFn&)>;
ModularLemmaReport verify_modular_lemma(const FieldOperator& op, const MeshFn& mu_density,
                                        const MeshFn& f, const YoungFn& phi,
                                        const std::vector<double>& ts, double C0_claimed,
                                        double c = 1.0);

// sup over cells of M_psi(f v)/M_psi v against max |f|; the corollary's
// L-infinity contract, checked before any corollary sweep.
double linfty_contract(const MeshFn& f, const MeshFn& v, const YoungFn& psi, GridScope scope);

}  // namespace mixmax
