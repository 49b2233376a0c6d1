#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace mixmax {

// Symbolic Young function. Immutable, value-semantic; the closed families
// needed here are powers t^p, the L log L family t^r (1+log+ t)^delta, splices
// of two members, outer powers, and the variant with an inner power
// t^r (1+log+ (t^s))^delta used by the limit-case fractional estimates.
class YoungFn {
 public:
  enum class Kind { Power, LLogL, LLogLInner, Spliced, Powered };

  static YoungFn power(double p);                            // t^p, p >= 1
  static YoungFn llogl(double r, double delta);              // t^r (1+log+ t)^delta
  static YoungFn llogl_inner(double r, double delta, double inner);
  static YoungFn spliced(const YoungFn& low, const YoungFn& high, double t0);
  static YoungFn powered(const YoungFn& base, double exponent);

  double operator()(double t) const;  // throws std::domain_error for t < 0

  // Generalized inverse inf{s >= 0 : eval(s) >= t} by bracketing bisection,
  // relative tolerance 1e-10. Requires a nondecreasing eval.
  double inverse(double t) const;

  // False only for the inner-power variant with a negative inner exponent,
  // which can dip below its running maximum; such functions are evaluated
  // pointwise only and never drive a bisection.
  bool monotone_eval() const;

  Kind kind() const;
  double power_exponent() const;  // Power kind only
  nlohmann::json to_json() const;
  static YoungFn from_json(const nlohmann::json& j);
  std::string describe() const;

  bool operator==(const YoungFn& o) const;

  struct Node;  // defined in young.cpp

 private:
  explicit YoungFn(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
  friend struct YoungAccess;
};

// Empirical membership data for the family F_r: submultiplicative Young
// functions of lower type r with eval(t)/t^r <= C0 (log t)^delta above t*.
struct FrCertificate {
  double r = 1.0;
  double C0 = 1.0;
  double delta = 0.0;
  double t_star = 1.0;
  double submult_const = 1.0;
  double lower_type_const = 1.0;
};

enum class TypeSide { Lower, Upper };

// Smallest empirical constant for the lower/upper type inequality
// eval(s t) <= C s^p eval(t) over the sample grid.
double check_type(const YoungFn& phi, double p, TypeSide side,
                  const std::vector<std::pair<double, double>>& samples);
std::vector<std::pair<double, double>> default_type_grid(TypeSide side, int s_count = 40,
                                                         int t_count = 40, double s_hi = 1e3);

// Smallest empirical constant for eval(s t) <= C eval(s) eval(t).
double check_submultiplicative(const YoungFn& phi,
                               const std::vector<std::pair<double, double>>& samples);
std::vector<std::pair<double, double>> default_submult_grid(int per_axis = 48,
                                                            double lo = 1.352e-1,
                                                            double hi = 5.46e1);

// Fits the smallest C0 over log-spaced t in [t_star, 1e6]; no certificate when
// the fitted ratio keeps growing across the top decade for every candidate
// delta (the function then outgrows every t^r log-power).
std::optional<FrCertificate> certify_Fr(const YoungFn& phi, double r, double t_star);

// Tightest empirical A, B with A psi(t) <= phi(t) <= B psi(t) on log-spaced
// t >= t0. Non-equivalence shows up as A -> 0 or B -> infinity under
// sample-range extension, not as an error.
std::pair<double, double> check_equivalence(const YoungFn& phi, const YoungFn& psi, double t0,
                                            double t_hi = 1e6, int count = 301);

// Parameter pack of the fractional mixed estimate for r < p < n/gamma.
struct Thm3Params {
  double q = 0, sigma = 0, nu = 0, beta = 0;
  YoungFn xi;
  YoungFn eta;
  // Measured two-sided band of xi^{-1}(t) t^{gamma/n} / Phi^{-1}(t) on t >= 1.
  double inv_ratio_lo = 0, inv_ratio_hi = 0;
};
Thm3Params thm3_params(int n, double r, double delta, double gamma, double p);

// Parameter pack of the limit case p = r.
struct Thm4Params {
  double q = 0, nu = 0;
  YoungFn xi;
  YoungFn eta;
  YoungFn phi_mod;    // applied outside the integral
  YoungFn psi_weight; // applied to u^{1/q} v inside the integral
  YoungFn phi_gamma;  // applied to |f|/t inside the integral
  double split_slack = 0;    // max of xi(t^{r/q}) / phi_gamma(t) over samples
  double compose_slack = 0;  // max of t phi_gamma(t^{gamma q/(n r)}) / phi_mod(t)
};
Thm4Params thm4_params(int n, double r, double delta, double gamma);

// (1 + 1/x)^{x/(1+x)} for x > 0, 1 at x = 0; always within [1, e^{1/e}].
double ratio_lemma_f(double x);

}  // namespace mixmax
