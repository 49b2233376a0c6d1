#include "mixmax/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace mixmax {

std::string to_string(Variant v) {
  switch (v) {
    case Variant::Theorem1: return "theorem1";
    case Variant::StrongForm: return "strong_form";
    case Variant::Corollary: return "corollary";
    case Variant::Sawyer: return "sawyer";
    case Variant::Theorem3: return "theorem3";
    case Variant::Theorem4: return "theorem4";
  }
  return "?";
}

Variant variant_from_string(const std::string& s) {
  if (s == "theorem1") return Variant::Theorem1;
  if (s == "strong_form") return Variant::StrongForm;
  if (s == "corollary") return Variant::Corollary;
  if (s == "sawyer") return Variant::Sawyer;
  if (s == "theorem3") return Variant::Theorem3;
  if (s == "theorem4") return Variant::Theorem4;
  throw std::invalid_argument("unknown variant '" + s + "'");
}

std::vector<double> make_sweep(const SweepSpec& spec, double f_max) {
  if (spec.count < 1 || !(spec.t_lo_rel > 0.0) || !(spec.t_hi_rel >= spec.t_lo_rel))
    throw std::invalid_argument("sweep: bad specification");
  double anchor = f_max > 0.0 ? f_max : 1.0;
  return log_space(spec.t_lo_rel * anchor, spec.t_hi_rel * anchor, spec.count);
}

namespace {

struct CellMeasure {
  std::vector<double> w;  // per-cell mass of the target measure
  double cell_vol;
};

CellMeasure cell_measure(const MeshFn& density) {
  CellMeasure m;
  m.cell_vol = density.cell_volume();
  m.w.resize(density.cell_count());
  for (std::size_t i = 0; i < m.w.size(); ++i) m.w[i] = density.at(i) * m.cell_vol;
  return m;
}

double superlevel_mass(const std::vector<double>& field, const CellMeasure& mu, double t) {
  CompensatedSum s;
  for (std::size_t i = 0; i < field.size(); ++i)
    if (field[i] > t) s.add(mu.w[i]);
  return s.value();
}

void finalize(RatioReport& rep) {
  double sup = 0.0;
  bool hard = false;
  for (const auto& row : rep.rows) {
    if (row.has_ratio) sup = std::max(sup, row.ratio);
    if (row.lhs > 0.0 && row.rhs == 0.0) hard = true;
  }
  // Weak-type curves fall as t grows; tolerate rounding-level wiggle.
  bool mono = true;
  for (std::size_t i = 1; i < rep.rows.size(); ++i) {
    if (rep.rows[i].clamped || rep.rows[i - 1].clamped) continue;
    if (rep.rows[i].lhs > rep.rows[i - 1].lhs * (1.0 + 1e-12)) mono = false;
    if (rep.rows[i].rhs > rep.rows[i - 1].rhs * (1.0 + 1e-12)) mono = false;
  }
  rep.sup_ratio = sup;
  rep.hard_failure = hard;
  rep.monotone_ok = mono;
}

std::vector<double> ratio_field(const MeshFn& num, const MeshFn& den) {
  std::vector<double> out(num.cell_count());
  for (std::size_t i = 0; i < out.size(); ++i) {
    double d = den.at(i);
    if (d <= 0.0) throw std::domain_error("experiments: vanishing denominator field");
    out[i] = num.at(i) / d;
  }
  return out;
}

RatioReport weak_type_curve(const char* name, const std::vector<double>& quotient,
                            const CellMeasure& mu, const MeshFn& f, const YoungFn& phi,
                            const std::vector<double>& ts, double rhs_arg_scale) {
  RatioReport rep;
  rep.variant = name;
  for (double t : ts) {
    RatioRow row;
    row.t = t;
    row.lhs = superlevel_mass(quotient, mu, t);
    CompensatedSum s;
    for (std::size_t i = 0; i < mu.w.size(); ++i) {
      double x = f.at(i);
      if (x > 0.0 && mu.w[i] > 0.0) s.add(mu.w[i] * phi(rhs_arg_scale * x / t));
    }
    row.rhs = s.value();
    if (row.rhs > 0.0) {
      row.has_ratio = true;
      row.ratio = row.lhs / row.rhs;
    }
    rep.rows.push_back(row);
  }
  finalize(rep);
  return rep;
}

}  // namespace

RatioReport theorem1_curve(const TheoremData& d, const std::vector<double>& ts) {
  MeshFn num = maximal_field(d.f.multiply(d.v), d.phi, 0.0, d.scope);
  MeshFn den = maximal_field(d.v, d.phi, 0.0, d.scope);
  CellMeasure mu = cell_measure(d.u.multiply(d.v.pow(d.r)));
  return weak_type_curve("theorem1", ratio_field(num, den), mu, d.f, d.phi, ts, 1.0);
}

RatioReport strong_form_curve(const TheoremData& d, const std::vector<double>& ts) {
  MeshFn num = maximal_field(d.f.multiply(d.v), d.phi, 0.0, d.scope);
  CellMeasure mu = cell_measure(d.u.multiply(d.v.pow(d.r)));
  return weak_type_curve("strong_form", ratio_field(num, d.v), mu, d.f, d.phi, ts, 1.0);
}

double linfty_contract(const MeshFn& f, const MeshFn& v, const YoungFn& psi, GridScope scope) {
  MeshFn num = maximal_field(f.multiply(v), psi, 0.0, scope);
  MeshFn den = maximal_field(v, psi, 0.0, scope);
  double worst = 0.0;
  for (std::size_t i = 0; i < num.cell_count(); ++i) {
    double dd = den.at(i);
    if (dd > 0.0) worst = std::max(worst, num.at(i) / dd);
  }
  double fmax = f.max_value();
  return fmax > 0.0 ? worst / fmax : 0.0;
}

RatioReport corollary_curve(const TheoremData& d, const YoungFn& psi,
                            const std::vector<double>& ts) {
  MeshFn num = maximal_field(d.f.multiply(d.v), psi, 0.0, d.scope);
  MeshFn den = maximal_field(d.v, psi, 0.0, d.scope);
  std::vector<double> quot = ratio_field(num, den);
  CellMeasure mu = cell_measure(d.u.multiply(d.v.pow(d.r)));

  RatioReport best;
  double best_sup = std::numeric_limits<double>::infinity();
  for (double c2 : {1.0, 2.0, 4.0, 8.0}) {
    RatioReport rep = weak_type_curve("corollary", quot, mu, d.f, psi, ts, c2);
    double score = rep.hard_failure ? std::numeric_limits<double>::infinity() : rep.sup_ratio;
    if (score < best_sup || best.rows.empty()) {
      best_sup = score;
      rep.extra_scalars["C2"] = c2;
      rep.extra_scalars["C1_surrogate"] = rep.sup_ratio;
      best = std::move(rep);
    }
  }
  best.extra_scalars["linfty_contract"] = linfty_contract(d.f, d.v, psi, d.scope);
  return best;
}

RatioReport theorem3_curve(const FractionalData& d, const std::vector<double>& ts) {
  Thm3Params par = thm3_params(d.n, d.r, d.delta, d.gamma, d.p);
  YoungFn phi = YoungFn::llogl(d.r, d.delta);
  MeshFn num = maximal_field(d.f.multiply(d.v), phi, d.gamma, d.scope);
  MeshFn den = maximal_field(d.v, par.eta, 0.0, d.scope);
  std::vector<double> quot = ratio_field(num, den);

  const double lhs_exp = par.beta * par.sigma;  // q (1/p + 1/r')
  const double inv_rp = 1.0 - 1.0 / d.r;
  CellMeasure lhs_mu = cell_measure(d.u.multiply(d.v.pow(lhs_exp)));
  MeshFn rhs_density = d.u.pow(d.p / par.q).multiply(d.v.pow(1.0 + d.p * inv_rp));
  CellMeasure rhs_mu = cell_measure(rhs_density);

  RatioReport rep;
  rep.variant = "theorem3";
  rep.extra_scalars["q"] = par.q;
  rep.extra_scalars["sigma"] = par.sigma;
  rep.extra_scalars["nu"] = par.nu;
  rep.extra_scalars["beta"] = par.beta;
  for (double t : ts) {
    RatioRow row;
    row.t = t;
    row.lhs = std::pow(superlevel_mass(quot, lhs_mu, t), 1.0 / par.q);
    CompensatedSum s;
    for (std::size_t i = 0; i < rhs_mu.w.size(); ++i) {
      double x = d.f.at(i);
      if (x > 0.0 && rhs_mu.w[i] > 0.0) s.add(rhs_mu.w[i] * std::pow(x / t, d.p));
    }
    row.rhs = std::pow(s.value(), 1.0 / d.p);
    if (row.rhs > 0.0) {
      row.has_ratio = true;
      row.ratio = row.lhs / row.rhs;
    }
    rep.rows.push_back(row);
  }
  finalize(rep);
  return rep;
}

RatioReport theorem4_curve(const FractionalData& d, const std::vector<double>& ts) {
  Thm4Params par = thm4_params(d.n, d.r, d.delta, d.gamma);
  YoungFn phi = YoungFn::llogl(d.r, d.delta);
  MeshFn num = maximal_field(d.f.multiply(d.v), phi, d.gamma, d.scope);
  MeshFn den = maximal_field(d.v, par.eta, 0.0, d.scope);
  std::vector<double> quot = ratio_field(num, den);

  CellMeasure lhs_mu = cell_measure(d.u.multiply(d.v.pow(par.q)));
  // Psi(u^{1/q} v) cell by cell; Psi is evaluated pointwise only.
  MeshFn uv = d.u.pow(1.0 / par.q).multiply(d.v);
  std::vector<double> psi_w(uv.cell_count());
  for (std::size_t i = 0; i < psi_w.size(); ++i) psi_w[i] = par.psi_weight(uv.at(i));
  double cell_vol = d.f.cell_volume();

  RatioReport rep;
  rep.variant = "theorem4";
  rep.extra_scalars["q"] = par.q;
  rep.extra_scalars["nu"] = par.nu;
  for (double t : ts) {
    RatioRow row;
    row.t = t;
    row.lhs = superlevel_mass(quot, lhs_mu, t);
    CompensatedSum s;
    for (std::size_t i = 0; i < psi_w.size(); ++i) {
      double x = d.f.at(i);
      if (x > 0.0 && psi_w[i] > 0.0) s.add(cell_vol * psi_w[i] * par.phi_gamma(x / t));
    }
    double integral = s.value();
    double rhs = par.phi_mod(integral);
    if (!std::isfinite(rhs)) {
      // Over-range application of the outer modular function: clamp and flag
      // rather than guessing a normalization.
      row.clamped = true;
      rhs = std::numeric_limits<double>::max();
    }
    row.rhs = rhs;
    if (row.rhs > 0.0) {
      row.has_ratio = true;
      row.ratio = row.lhs / row.rhs;
    }
    rep.rows.push_back(row);
  }
  finalize(rep);
  return rep;
}

ModularLemmaReport verify_modular_lemma(const FieldOperator& op, const MeshFn& mu_density,
                                        const MeshFn& f, const YoungFn& phi,
                                        const std::vector<double>& ts, double C0_claimed,
                                        double c) {
  if (!(C0_claimed > 0.0)) throw std::invalid_argument("modular lemma: C0 must be > 0");
  ModularLemmaReport rep;
  rep.C0 = C0_claimed;
  CellMeasure mu = cell_measure(mu_density);

  MeshFn tf = op(f);
  std::vector<double> tf_field(tf.cell_count());
  for (std::size_t i = 0; i < tf_field.size(); ++i) tf_field[i] = tf.at(i);

  // Prior sweep: the weak modular bound measured on the truncated inputs
  // f_t = f 1_{f > t/(2 C0)} at threshold t/2.
  double c_hyp = 0.0;
  std::vector<double> restricted_rhs(ts.size(), 0.0);
  std::vector<MeshFn> truncated;
  truncated.reserve(ts.size());
  for (std::size_t j = 0; j < ts.size(); ++j) {
    double t = ts[j];
    double cut = t / (2.0 * C0_claimed);
    MeshFn f1 = f.map([cut](double x) { return x > cut ? x : 0.0; });
    CompensatedSum s;
    for (std::size_t i = 0; i < mu.w.size(); ++i) {
      double x = f1.at(i);
      if (x > 0.0 && mu.w[i] > 0.0) s.add(mu.w[i] * phi(2.0 * c * x / t));
    }
    restricted_rhs[j] = s.value();
    truncated.push_back(std::move(f1));
  }
  for (std::size_t j = 0; j < ts.size(); ++j) {
    double t = ts[j];
    if (truncated[j].max_value() == 0.0) continue;
    MeshFn tf1 = op(truncated[j]);
    std::vector<double> field(tf1.cell_count());
    for (std::size_t i = 0; i < field.size(); ++i) field[i] = tf1.at(i);
    double lhs1 = superlevel_mass(field, mu, t / 2.0);
    if (lhs1 == 0.0) continue;
    if (restricted_rhs[j] == 0.0) {
      rep.pass = false;
      continue;
    }
    c_hyp = std::max(c_hyp, lhs1 / restricted_rhs[j]);
  }
  rep.C_hyp = c_hyp;

  for (std::size_t j = 0; j < ts.size(); ++j) {
    RatioRow row;
    row.t = ts[j];
    row.lhs = superlevel_mass(tf_field, mu, ts[j]);
    row.rhs = c_hyp * restricted_rhs[j];
    if (row.rhs > 0.0) {
      row.has_ratio = true;
      row.ratio = row.lhs / row.rhs;
    }
    if (row.lhs > row.rhs * (1.0 + 1e-9)) rep.pass = false;
    rep.rows.push_back(row);
  }
  return rep;
}

nlohmann::json RatioReport::extra() const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : extra_scalars) j[k] = v;
  return j;
}

}  // namespace mixmax
