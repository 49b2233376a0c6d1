#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "mixmax/mesh.hpp"

namespace mixmax {

enum class Verdict { Member, NonMember, Inconclusive };
std::string to_string(Verdict v);

// max over cubes of (avg_Q w)(avg_Q w^{1-p'})^{p-1}.
double ap_constant(const MeshFn& w, double p, std::span<const DyadicCube> cubes);

// max over cubes of avg_Q w / essinf_Q w.
double a1_constant(const MeshFn& w, std::span<const DyadicCube> cubes);

// max over cubes of (avg_Q w^s)^{1/s} / avg_Q w.
double rh_constant(const MeshFn& w, double s, std::span<const DyadicCube> cubes);

// Fits (C, eps) with w(E)/w(Q) <= C (|E|/|Q|)^eps over sampled subsets
// (random cell unions, dyadic sub-boxes, level sets of w). eps is the largest
// exponent in (0, 1] whose required C stays below ten times the observed
// ratio at |E|/|Q| ~ 1/2; deterministic under the seed.
std::pair<double, double> ainf_pair(const MeshFn& w, std::span<const DyadicCube> cubes,
                                    int subsets_per_cube, std::uint64_t seed);

// max over cubes of (avg_Q w) exp(-avg_Q log w): the scale-invariant A_inf
// quantity the refinement trend is judged on. Blows up under refinement
// exactly for the mass-concentrating (non-A_inf) weights.
double ainf_exp_constant(const MeshFn& w, std::span<const DyadicCube> cubes);

struct WeightReport {
  std::map<double, double> ap_constants;
  double a1_constant = 0.0;
  std::pair<double, double> ainf_pair{0.0, 0.0};
  double ainf_exp_constant = 0.0;
  std::map<double, double> rh_constants;
  std::map<std::string, Verdict> verdicts;
  std::map<std::string, double> growth;  // worst refinement growth per class
  std::string cube_family;               // descriptor of the scanned family
  nlohmann::json to_json() const;
  std::string table() const;
};

using WeightGen = std::function<MeshFn(const Box&, int J)>;

struct ClassifyOptions {
  std::vector<double> ps{2.0, 4.0};
  std::vector<double> ss{1.5, 2.0};
  int subsets_per_cube = 16;
  // Refinement trend thresholds: member when every growth factor stays within
  // [1/1.25, 1.25], non-member when any exceeds 2.
  double stable_factor = 1.25;
  double blowup_factor = 2.0;
};

// Estimates all constants on the (J, K) mesh and judges membership from the
// refinement trend at (J+1, K) and (J, K+2).
WeightReport classify_weight(const WeightGen& gen, int n, int K, int J, bool centered,
                             std::uint64_t seed, const ClassifyOptions& opt = {});

}  // namespace mixmax
