#include "hypflux/numflux.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hypflux {

namespace {

double x_value(const SystemModel& sys, const State& u, const State& g, const Vec2& n) {
  return sys.entropy_flux_n(u, n) + sys.entropy_gradient(u).dot(g - sys.flux_n(u, n));
}

}  // namespace

RusanovFlux::RusanovFlux(SystemPtr sys, double c) : FluxScheme(std::move(sys), 2.0 * c), c_(c) {}

State RusanovFlux::g_only(const State& u, const State& v, const Vec2& n) const {
  return 0.5 * (sys_->flux_n(u, n) + sys_->flux_n(v, n)) - (0.5 * c_) * (v - u);
}

FluxPair RusanovFlux::evaluate(const State& u, const State& v, const Vec2& n) const {
  FluxPair p;
  p.g = g_only(u, v, n);
  const State mg = -p.g;
  const Vec2 mn = -n;
  p.xi = 0.5 * (x_value(*sys_, u, p.g, n) - x_value(*sys_, v, mg, mn));
  return p;
}

GodunovScalarFlux::GodunovScalarFlux(SystemPtr sys) : FluxScheme(std::move(sys), 0.0) {
  lambda_star_ = 1.05 * sampled_wave_speed(*sys_, kDefaultSamples, kDefaultSeed);
  if (!(lambda_star_ > 0.0)) lambda_star_ = 1e-12;
}

double GodunovScalarFlux::riemann_state(double u, double v, const Vec2& n) const {
  // Minimise phi = s f.n over [lo, hi]; s flips for the decreasing case so that
  // (u, v, n) and (v, u, -n) see the very same phi and interval.
  const double s = u <= v ? 1.0 : -1.0;
  const double lo = std::min(u, v);
  const double hi = std::max(u, v);
  State w(1);
  auto phi = [&](double x) {
    w[0] = x;
    return s * sys_->flux_n(w, n)[0];
  };
  double best_w = lo;
  double best = phi(lo);
  auto consider = [&](double x) {
    if (!(x >= lo && x <= hi)) return;
    const double f = phi(x);
    if (f < best || (f == best && x < best_w)) {
      best = f;
      best_w = x;
    }
  };
  consider(hi);
  for (double c : sys_->flux_critical_points(n)) consider(c);
  if (hi > lo) {
    const int grid = 16;
    int arg = 0;
    double gbest = phi(lo);
    for (int i = 1; i <= grid; ++i) {
      const double x = lo + (hi - lo) * i / grid;
      const double f = phi(x);
      if (f < gbest) {
        gbest = f;
        arg = i;
      }
    }
    double a = lo + (hi - lo) * std::max(0, arg - 1) / grid;
    double b = lo + (hi - lo) * std::min(grid, arg + 1) / grid;
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - r * (b - a);
    double d = a + r * (b - a);
    double fc = phi(c), fd = phi(d);
    while (b - a > 1e-12 * std::max(1.0, std::abs(a) + std::abs(b))) {
      if (fc <= fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - r * (b - a);
        fc = phi(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + r * (b - a);
        fd = phi(d);
      }
    }
    consider(0.5 * (a + b));
  }
  return best_w;
}

FluxPair GodunovScalarFlux::evaluate(const State& u, const State& v, const Vec2& n) const {
  State w(1);
  w[0] = riemann_state(u[0], v[0], n);
  return {sys_->flux_n(w, n), sys_->entropy_flux_n(w, n)};
}

std::shared_ptr<RusanovFlux> make_rusanov(SystemPtr sys, double c) {
  const double sup = sampled_wave_speed(*sys, kDefaultSamples, kDefaultSeed);
  if (c <= 0.0) {
    c = 1.05 * sup;
    if (!(c > 0.0)) c = 1e-12;
  } else if (c < sup) {
    throw ValidationError("rusanov: speed " + std::to_string(c) +
                          " is below the sampled wave speed " + std::to_string(sup));
  }
  return std::make_shared<RusanovFlux>(std::move(sys), c);
}

std::shared_ptr<GodunovScalarFlux> make_godunov_scalar(SystemPtr sys) {
  if (sys->m() != 1) throw ValidationError("godunov: only scalar systems are supported");
  return std::make_shared<GodunovScalarFlux>(std::move(sys));
}

SchemePtr make_scheme(const std::string& name, SystemPtr sys, double rusanov_c) {
  if (name == "rusanov") return make_rusanov(std::move(sys), rusanov_c);
  if (name == "godunov") return make_godunov_scalar(std::move(sys));
  throw ValidationError("unknown flux '" + name + "'");
}

double x_flux(const FluxScheme& scheme, const State& u, const State& v, const Vec2& n) {
  return x_value(scheme.system(), u, scheme.flux(u, v, n), n);
}

GapCheck dissipation_gap_check(const FluxScheme& scheme, const State& u, const State& v,
                               const Vec2& n) {
  const SystemModel& sys = scheme.system();
  const FluxPair p = scheme.evaluate(u, v, n);
  GapCheck r;
  r.gap = x_value(sys, u, p.g, n) - p.xi;
  const double defect = (p.g - sys.flux_n(u, n)).norm();
  r.lower_bound = sys.beta0() / (2.0 * scheme.lambda_star()) * defect * defect;
  r.pass = r.gap >= r.lower_bound - 1e-10 * std::max(1.0, std::abs(r.gap));
  return r;
}

bool omega_stability_check(const FluxScheme& scheme, const State& u, const State& v,
                           const Vec2& n, double lambda) {
  const SystemModel& sys = scheme.system();
  const State shifted = u - (scheme.flux(u, v, n) - sys.flux_n(u, n)) / lambda;
  return sys.omega_contains(shifted);
}

EntropyIneqCheck interfacial_entropy_check(const FluxScheme& scheme, const State& u,
                                           const State& v, const Vec2& n, double lambda) {
  const SystemModel& sys = scheme.system();
  const FluxPair p = scheme.evaluate(u, v, n);
  const State shifted = u - (p.g - sys.flux_n(u, n)) / lambda;
  EntropyIneqCheck r;
  r.lhs = p.xi - sys.entropy_flux_n(u, n);
  if (!sys.in_domain(shifted)) {
    r.rhs = -std::numeric_limits<double>::infinity();
    r.pass = false;
    return r;
  }
  r.rhs = -lambda * (sys.entropy(shifted) - sys.entropy(u));
  r.pass = r.lhs <= r.rhs + 1e-10;
  return r;
}

InterfaceFluxRecord make_interface_record(const FluxScheme& scheme, int id, const State& u,
                                          const State& v, const Vec2& n, const FluxPair& gx) {
  const SystemModel& sys = scheme.system();
  InterfaceFluxRecord r;
  r.id = id;
  r.g = gx.g;
  r.xi = gx.xi;
  r.x_kl = x_value(sys, u, gx.g, n);
  const State mg = -gx.g;
  const Vec2 mn = -n;
  r.x_lk = x_value(sys, v, mg, mn);
  r.gap_kl = r.x_kl - gx.xi;
  r.gap_lk = r.x_lk + gx.xi;
  r.defect_kl = (gx.g - sys.flux_n(u, n)).norm();
  r.defect_lk = (gx.g - sys.flux_n(v, n)).norm();
  const double k = sys.beta0() / (2.0 * scheme.lambda_star());
  r.bound_kl = k * r.defect_kl * r.defect_kl;
  r.bound_lk = k * r.defect_lk * r.defect_lk;
  r.gap_pass = r.gap_kl >= r.bound_kl - 1e-10 * std::max(1.0, std::abs(r.gap_kl)) &&
               r.gap_lk >= r.bound_lk - 1e-10 * std::max(1.0, std::abs(r.gap_lk));
  return r;
}

}  // namespace hypflux
