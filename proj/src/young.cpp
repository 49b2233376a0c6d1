#include "mixmax/young.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "mixmax/util.hpp"

namespace mixmax {

struct YoungFn::Node {
  Kind kind;
  double a = 0, b = 0, c = 0;  // Power: a=p; LLogL: a=r, b=delta; LLogLInner: +c=inner;
                               // Spliced: c=t0; Powered: c=exponent
  std::shared_ptr<const Node> lo, hi;
};

struct YoungAccess {
  static const YoungFn::Node& node(const YoungFn& f) { return *f.node_; }
  static YoungFn wrap(std::shared_ptr<const YoungFn::Node> n) { return YoungFn(std::move(n)); }
};

namespace {

using Node = YoungFn::Node;

double eval_node(const Node& n, double t) {
  switch (n.kind) {
    case YoungFn::Kind::Power:
      return std::pow(t, n.a);
    case YoungFn::Kind::LLogL: {
      if (t == 0.0) return 0.0;
      double lp = t > 1.0 ? std::log(t) : 0.0;
      return std::pow(t, n.a) * std::pow(1.0 + lp, n.b);
    }
    case YoungFn::Kind::LLogLInner: {
      if (t == 0.0) return 0.0;
      double lp = std::max(0.0, n.c * std::log(t));
      return std::pow(t, n.a) * std::pow(1.0 + lp, n.b);
    }
    case YoungFn::Kind::Spliced:
      return t <= n.c ? eval_node(*n.lo, t) : eval_node(*n.hi, t);
    case YoungFn::Kind::Powered:
      return std::pow(eval_node(*n.lo, t), n.c);
  }
  throw std::logic_error("young: bad kind");
}

bool monotone_node(const Node& n) {
  switch (n.kind) {
    case YoungFn::Kind::Power:
    case YoungFn::Kind::LLogL:
      return true;
    case YoungFn::Kind::LLogLInner:
      return n.c >= 0.0 || n.b == 0.0;
    case YoungFn::Kind::Spliced:
      return monotone_node(*n.lo) && monotone_node(*n.hi);
    case YoungFn::Kind::Powered:
      return monotone_node(*n.lo);
  }
  return false;
}

bool grows_monotonically_top_decade(const std::vector<double>& t,
                                    const std::vector<double>& ratio) {
  // Strict growth across every consecutive pair in the top decade of samples.
  double t_hi = t.back();
  bool any = false;
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (t[i] < t_hi / 10.0) continue;
    if (!(ratio[i] > ratio[i - 1])) return false;
    any = true;
  }
  return any;
}

}  // namespace

YoungFn YoungFn::power(double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("young: power exponent must be >= 1");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Power;
  n->a = p;
  return YoungFn(std::move(n));
}

YoungFn YoungFn::llogl(double r, double delta) {
  if (!(r >= 1.0) || !(delta >= 0.0)) throw std::invalid_argument("young: llogl needs r>=1, delta>=0");
  auto n = std::make_shared<Node>();
  n->kind = Kind::LLogL;
  n->a = r;
  n->b = delta;
  return YoungFn(std::move(n));
}

YoungFn YoungFn::llogl_inner(double r, double delta, double inner) {
  if (!(r >= 0.0) || !(delta >= 0.0))
    throw std::invalid_argument("young: llogl_inner needs r>=0, delta>=0");
  auto n = std::make_shared<Node>();
  n->kind = Kind::LLogLInner;
  n->a = r;
  n->b = delta;
  n->c = inner;
  return YoungFn(std::move(n));
}

YoungFn YoungFn::spliced(const YoungFn& low, const YoungFn& high, double t0) {
  if (!(t0 > 0.0)) throw std::invalid_argument("young: splice point must be > 0");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Spliced;
  n->c = t0;
  n->lo = low.node_;
  n->hi = high.node_;
  return YoungFn(std::move(n));
}

YoungFn YoungFn::powered(const YoungFn& base, double exponent) {
  if (!(exponent > 0.0)) throw std::invalid_argument("young: outer exponent must be > 0");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Powered;
  n->c = exponent;
  n->lo = base.node_;
  return YoungFn(std::move(n));
}

double YoungFn::operator()(double t) const {
  if (!(t >= 0.0)) throw std::domain_error("young: eval needs t >= 0");
  return eval_node(*node_, t);
}

bool YoungFn::monotone_eval() const { return monotone_node(*node_); }

YoungFn::Kind YoungFn::kind() const { return node_->kind; }

double YoungFn::power_exponent() const {
  if (node_->kind != Kind::Power) throw std::logic_error("young: not a pure power");
  return node_->a;
}

double YoungFn::inverse(double t) const {
  if (!(t >= 0.0)) throw std::domain_error("young: inverse needs t >= 0");
  if (!monotone_eval()) throw std::logic_error("young: inverse of non-monotone function");
  if (t == 0.0) return 0.0;
  double hi = 1.0;
  int guard = 0;
  while (eval_node(*node_, hi) < t) {
    hi *= 2.0;
    if (++guard > 4000) throw std::runtime_error("young: inverse bracket overflow");
  }
  double lo = 0.0;
  for (int i = 0; i < 300 && hi - lo > 1e-12 * hi; ++i) {
    double mid = 0.5 * (lo + hi);
    if (eval_node(*node_, mid) >= t)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

bool YoungFn::operator==(const YoungFn& o) const { return to_json() == o.to_json(); }

nlohmann::json YoungFn::to_json() const {
  const Node& n = *node_;
  switch (n.kind) {
    case Kind::Power:
      return {{"kind", "power"}, {"p", n.a}};
    case Kind::LLogL:
      return {{"kind", "llogl"}, {"r", n.a}, {"delta", n.b}};
    case Kind::LLogLInner:
      return {{"kind", "llogl_inner"}, {"r", n.a}, {"delta", n.b}, {"inner", n.c}};
    case Kind::Spliced:
      return {{"kind", "spliced"},
              {"low", YoungAccess::wrap(n.lo).to_json()},
              {"high", YoungAccess::wrap(n.hi).to_json()},
              {"t0", n.c}};
    case Kind::Powered:
      return {{"kind", "powered"}, {"base", YoungAccess::wrap(n.lo).to_json()}, {"exponent", n.c}};
  }
  throw std::logic_error("young: bad kind");
}

YoungFn YoungFn::from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  auto expect_keys = [&](std::initializer_list<const char*> keys) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      bool ok = std::string(it.key()) == "kind";
      for (const char* k : keys) ok = ok || it.key() == k;
      if (!ok) throw std::invalid_argument("young: unknown key '" + it.key() + "' in descriptor");
    }
  };
  if (kind == "power") {
    expect_keys({"p"});
    return power(j.at("p").get<double>());
  }
  if (kind == "llogl") {
    expect_keys({"r", "delta"});
    return llogl(j.at("r").get<double>(), j.at("delta").get<double>());
  }
  if (kind == "llogl_inner") {
    expect_keys({"r", "delta", "inner"});
    return llogl_inner(j.at("r").get<double>(), j.at("delta").get<double>(),
                       j.at("inner").get<double>());
  }
  if (kind == "spliced") {
    expect_keys({"low", "high", "t0"});
    return spliced(from_json(j.at("low")), from_json(j.at("high")), j.at("t0").get<double>());
  }
  if (kind == "powered") {
    expect_keys({"base", "exponent"});
    return powered(from_json(j.at("base")), j.at("exponent").get<double>());
  }
  throw std::invalid_argument("young: unknown kind '" + kind + "'");
}

std::string YoungFn::describe() const { return to_json().dump(); }

double check_type(const YoungFn& phi, double p, TypeSide side,
                  const std::vector<std::pair<double, double>>& samples) {
  if (samples.empty()) throw std::invalid_argument("check_type: empty sample grid");
  double worst = 0.0;
  for (auto [s, t] : samples) {
    if (!(t > 0.0)) throw std::invalid_argument("check_type: t must be > 0");
    if (side == TypeSide::Lower && !(s > 0.0 && s <= 1.0))
      throw std::invalid_argument("check_type: lower side needs 0 < s <= 1");
    if (side == TypeSide::Upper && !(s >= 1.0))
      throw std::invalid_argument("check_type: upper side needs s >= 1");
    double denom = std::pow(s, p) * phi(t);
    if (denom <= 0.0) continue;
    worst = std::max(worst, phi(s * t) / denom);
  }
  return worst;
}

std::vector<std::pair<double, double>> default_type_grid(TypeSide side, int s_count, int t_count,
                                                         double s_hi) {
  auto ts = log_space(0.1, 100.0, t_count);
  auto ss = side == TypeSide::Lower ? log_space(1e-4, 1.0, s_count) : log_space(1.0, s_hi, s_count);
  std::vector<std::pair<double, double>> grid;
  grid.reserve(ss.size() * ts.size());
  for (double s : ss)
    for (double t : ts) grid.emplace_back(s, t);
  return grid;
}

double check_submultiplicative(const YoungFn& phi,
                               const std::vector<std::pair<double, double>>& samples) {
  if (samples.empty()) throw std::invalid_argument("check_submultiplicative: empty sample grid");
  double worst = 0.0;
  for (auto [s, t] : samples) {
    if (!(s > 0.0 && t > 0.0))
      throw std::invalid_argument("check_submultiplicative: samples must be > 0");
    double denom = phi(s) * phi(t);
    if (denom <= 0.0) continue;
    worst = std::max(worst, phi(s * t) / denom);
  }
  return worst;
}

std::vector<std::pair<double, double>> default_submult_grid(int per_axis, double lo, double hi) {
  auto xs = log_space(lo, hi, per_axis);
  std::vector<std::pair<double, double>> grid;
  grid.reserve(xs.size() * xs.size());
  for (double s : xs)
    for (double t : xs) grid.emplace_back(s, t);
  return grid;
}

std::optional<FrCertificate> certify_Fr(const YoungFn& phi, double r, double t_star) {
  if (!(r >= 1.0)) throw std::invalid_argument("certify_Fr: r must be >= 1");
  if (!(t_star >= std::exp(1.0))) throw std::invalid_argument("certify_Fr: t_star must be >= e");
  auto ts = log_space(t_star, 1e6, 241);
  for (double delta = 0.0; delta <= 4.0 + 1e-9; delta += 0.25) {
    std::vector<double> ratios;
    ratios.reserve(ts.size());
    double c0 = 0.0;
    for (double t : ts) {
      double v = phi(t) / (std::pow(t, r) * std::pow(std::log(t), delta));
      ratios.push_back(v);
      c0 = std::max(c0, v);
    }
    if (!grows_monotonically_top_decade(ts, ratios)) {
      FrCertificate cert;
      cert.r = r;
      cert.C0 = c0;
      cert.delta = delta;
      cert.t_star = t_star;
      cert.submult_const = check_submultiplicative(phi, default_submult_grid());
      cert.lower_type_const = check_type(phi, r, TypeSide::Lower, default_type_grid(TypeSide::Lower));
      return cert;
    }
  }
  return std::nullopt;
}

std::pair<double, double> check_equivalence(const YoungFn& phi, const YoungFn& psi, double t0,
                                            double t_hi, int count) {
  if (!(t0 >= 0.0)) throw std::invalid_argument("check_equivalence: t0 must be >= 0");
  auto ts = log_space(std::max(t0, 1e-8), t_hi, count);
  double A = std::numeric_limits<double>::infinity(), B = 0.0;
  for (double t : ts) {
    double pv = phi(t), qv = psi(t);
    if (qv <= 0.0) continue;
    double ratio = pv / qv;
    A = std::min(A, ratio);
    B = std::max(B, ratio);
  }
  return {A, B};
}

Thm3Params thm3_params(int n, double r, double delta, double gamma, double p) {
  if (n < 1 || n > 2) throw std::invalid_argument("thm3_params: n must be 1 or 2");
  if (!(r >= 1.0) || !(delta >= 0.0)) throw std::invalid_argument("thm3_params: need r>=1, delta>=0");
  if (!(gamma > 0.0 && gamma < n / r))
    throw std::invalid_argument("thm3_params: need 0 < gamma < n/r");
  if (!(p > r && p < n / gamma))
    throw std::invalid_argument("thm3_params: need r < p < n/gamma");
  const double q = 1.0 / (1.0 / p - gamma / n);
  const double sigma = n * r / (n - r * gamma);
  const double nu = n * delta / (n - r * gamma);
  const double inv_rp = 1.0 - 1.0 / r;  // 1/r'
  const double beta = (q / sigma) * (1.0 / p + inv_rp);
  if (!(beta > 1.0)) throw std::logic_error("thm3_params: beta <= 1");

  YoungFn xi = YoungFn::spliced(YoungFn::power(q / beta), YoungFn::llogl(sigma, nu), 1.0);
  YoungFn eta = YoungFn::llogl(q / p + q * inv_rp, nu);
  YoungFn phi = YoungFn::llogl(r, delta);

  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (double t : log_space(1.0, 1e6, 61)) {
    double ratio = xi.inverse(t) * std::pow(t, gamma / n) / phi.inverse(t);
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  if (!(lo > 1.0 / 64.0 && hi < 64.0))
    throw std::logic_error("thm3_params: inverse comparability band violated");

  Thm3Params out{q, sigma, nu, beta, xi, eta, lo, hi};
  return out;
}

Thm4Params thm4_params(int n, double r, double delta, double gamma) {
  if (n < 1 || n > 2) throw std::invalid_argument("thm4_params: n must be 1 or 2");
  if (!(r >= 1.0) || !(delta >= 0.0)) throw std::invalid_argument("thm4_params: need r>=1, delta>=0");
  if (!(gamma > 0.0 && gamma < n / r))
    throw std::invalid_argument("thm4_params: need 0 < gamma < n/r");
  const double q = 1.0 / (1.0 / r - gamma / n);
  const double nu = delta * q / r;

  YoungFn xi = YoungFn::llogl(q, nu);
  YoungFn phi_mod = YoungFn::powered(YoungFn::llogl(1.0, delta), q / r);
  YoungFn psi_weight = YoungFn::llogl_inner(r, n * delta / (n - r * gamma), 1.0 - q / r);
  YoungFn phi_gamma = YoungFn::llogl(r, delta + delta * r * gamma / (n - r * gamma));

  double split_slack = 0.0, compose_slack = 0.0;
  for (double t : log_space(1e-3, 1e6, 121)) {
    double pg = phi_gamma(t);
    if (pg > 0.0) split_slack = std::max(split_slack, xi(std::pow(t, r / q)) / pg);
    double pm = phi_mod(t);
    if (pm > 0.0)
      compose_slack =
          std::max(compose_slack, t * phi_gamma(std::pow(t, gamma * q / (n * r))) / pm);
  }
  if (!(split_slack <= 1.0 + 1e-9))
    throw std::logic_error("thm4_params: xi(t^{r/q}) <= Phi_gamma(t) violated");
  const double compose_bound = std::pow(std::max(1.0, gamma / (n - r * gamma)), nu);
  if (!(compose_slack <= compose_bound * (1.0 + 1e-9)))
    throw std::logic_error("thm4_params: t Phi_gamma(t^{gamma q/(n r)}) bound violated");

  Thm4Params out{q, nu, xi, xi, phi_mod, psi_weight, phi_gamma, split_slack, compose_slack};
  return out;
}

double ratio_lemma_f(double x) {
  if (!(x >= 0.0)) throw std::domain_error("ratio_lemma_f: x must be >= 0");
  if (x == 0.0) return 1.0;
  return std::exp(x / (1.0 + x) * std::log1p(1.0 / x));
}

}  // namespace mixmax
