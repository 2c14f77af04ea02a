#include "hypflux/systems.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace hypflux {

AdmissibleSet AdmissibleSet::box(State lo, State hi) {
  if (lo.size() != hi.size() || lo.size() < 1 || lo.size() > kMaxComponents)
    throw ValidationError("admissible box: bounds must have matching size 1..4");
  for (Eigen::Index i = 0; i < lo.size(); ++i)
    if (!(lo[i] < hi[i])) throw ValidationError("admissible box: empty interval");
  AdmissibleSet s;
  s.kind = Kind::Box;
  s.lower = std::move(lo);
  s.upper = std::move(hi);
  return s;
}

AdmissibleSet AdmissibleSet::box_from_range(const State& lo, const State& hi, double inflate) {
  State l = lo, u = hi;
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    double w = hi[i] - lo[i];
    if (!(w > 0.0)) w = std::max(1.0, std::abs(lo[i]));
    l[i] = lo[i] - inflate * w;
    u[i] = hi[i] + inflate * w;
  }
  return box(l, u);
}

bool AdmissibleSet::contains(const State& u) const {
  if (u.size() != lower.size()) return false;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (!std::isfinite(u[i])) return false;
    const double scale = std::max({std::abs(lower[i]), std::abs(upper[i]), upper[i] - lower[i]});
    const double tol = rtol * scale;
    if (u[i] < lower[i] - tol || u[i] > upper[i] + tol) return false;
  }
  return true;
}

std::vector<State> AdmissibleSet::corners() const {
  const int mm = m();
  std::vector<State> out;
  for (int mask = 0; mask < (1 << mm); ++mask) {
    State c(mm);
    for (int i = 0; i < mm; ++i) c[i] = (mask >> i) & 1 ? upper[i] : lower[i];
    out.push_back(c);
  }
  return out;
}

State AdmissibleSet::sample(std::mt19937_64& rng) const {
  State s(m());
  for (int i = 0; i < m(); ++i) s[i] = uniform_in(rng, lower[i], upper[i]);
  return s;
}

std::string to_string(AdmissibleSet::Kind kind) {
  return kind == AdmissibleSet::Kind::Box ? "box" : "positivity_constrained";
}

double SystemModel::max_wave_speed(const State& u, const Vec2& n) const {
  StateMatrix J = StateMatrix::Zero(m(), m());
  for (int a = 0; a < d(); ++a) J += n[a] * flux_jacobian(u, a);
  if (m() == 1) return std::abs(J(0, 0));
  Eigen::EigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(J), false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

std::vector<double> SystemModel::flux_critical_points(const Vec2&) const { return {}; }

State SystemModel::flux_n(const State& u, const Vec2& n) const {
  State r = n[0] * flux(u, 0);
  for (int a = 1; a < d(); ++a) r += n[a] * flux(u, a);
  return r;
}

double SystemModel::entropy_flux_n(const State& u, const Vec2& n) const {
  double r = n[0] * entropy_flux(u, 0);
  for (int a = 1; a < d(); ++a) r += n[a] * entropy_flux(u, a);
  return r;
}

void SystemModel::estimate_betas(int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  auto visit = [&](const State& u) {
    const StateMatrix H = entropy_hessian(u);
    Eigen::SelfAdjointEigenSolver<StateMatrix> es(H, Eigen::EigenvaluesOnly);
    lo = std::min(lo, es.eigenvalues().minCoeff());
    hi = std::max(hi, es.eigenvalues().maxCoeff());
  };
  for (const State& c : omega_.corners()) visit(c);
  for (int i = 0; i < samples; ++i) visit(omega_.sample(rng));
  if (!(lo > 0.0)) throw ValidationError(name() + ": entropy Hessian is not positive on Omega");
  if (lo == hi) {
    beta0_ = lo;
    beta1_ = hi;
  } else {
    beta0_ = 0.99 * lo;
    beta1_ = 1.01 * hi;
  }
}

namespace {

void require_in_omega(const SystemModel& sys, const State& s, const char* what) {
  if (!sys.omega_contains(s))
    throw AdmissibilityError(std::string(what) + ": state outside the admissible set");
}

std::vector<Vec2> sample_directions(int d) {
  std::vector<Vec2> dirs;
  if (d == 1) {
    dirs.emplace_back(1.0, 0.0);
    dirs.emplace_back(-1.0, 0.0);
    return dirs;
  }
  const int k = 180;
  const double pi = std::acos(-1.0);
  for (int i = 0; i < k; ++i) {
    const double th = 2.0 * pi * i / k;
    dirs.emplace_back(std::cos(th), std::sin(th));
  }
  return dirs;
}

}  // namespace

double relative_entropy(const SystemModel& sys, const State& v, const State& u) {
  require_in_omega(sys, v, "relative_entropy");
  require_in_omega(sys, u, "relative_entropy");
  return sys.entropy(v) - sys.entropy(u) - sys.entropy_gradient(u).dot(v - u);
}

double relative_entropy_flux(const SystemModel& sys, const State& v, const State& u, int alpha) {
  require_in_omega(sys, v, "relative_entropy_flux");
  require_in_omega(sys, u, "relative_entropy_flux");
  return sys.entropy_flux(v, alpha) - sys.entropy_flux(u, alpha) -
         sys.entropy_gradient(u).dot(sys.flux(v, alpha) - sys.flux(u, alpha));
}

State relative_z(const SystemModel& sys, const State& v, const State& u, int alpha) {
  require_in_omega(sys, v, "relative_z");
  require_in_omega(sys, u, "relative_z");
  const State r = sys.flux(v, alpha) - sys.flux(u, alpha) - sys.flux_jacobian(u, alpha) * (v - u);
  return sys.entropy_hessian(u) * r;
}

double compute_lf(SystemModel& sys, int samples, std::uint64_t seed) {
  if (samples < 1000) throw ValidationError("compute_lf: need at least 1000 samples");
  const int m = sys.m();
  double best = 0.0;
  auto visit = [&](const State& u, const State& v) {
    const StateMatrix M = sys.entropy_hessian(v);
    for (int a = 0; a < sys.d(); ++a) {
      const StateMatrix P = M * sys.flux_jacobian(u, a);
      const StateMatrix S = 0.5 * (P + P.transpose());
      if (m == 1) {
        best = std::max(best, std::abs(S(0, 0) / M(0, 0)));
        continue;
      }
      Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(
          Eigen::MatrixXd(S), Eigen::MatrixXd(M), Eigen::EigenvaluesOnly);
      best = std::max(best, es.eigenvalues().cwiseAbs().maxCoeff());
    }
  };
  const auto corners = sys.omega().corners();
  for (const State& u : corners)
    for (const State& v : corners) visit(u, v);
  std::mt19937_64 rng(seed);
  for (int i = 0; i < samples; ++i) {
    const State u = sys.omega().sample(rng);
    const State v = sys.omega().sample(rng);
    visit(u, v);
  }
  sys.set_lf(best);
  return best;
}

double estimate_cz(const SystemModel& sys, int samples, std::uint64_t seed) {
  const int m = sys.m();
  std::vector<State> dirs;
  if (m == 1) {
    dirs.push_back(State::Ones(1));
  } else if (m == 2) {
    const double pi = std::acos(-1.0);
    for (int i = 0; i < 360; ++i) {
      State w(2);
      w << std::cos(pi * i / 360.0), std::sin(pi * i / 360.0);
      dirs.push_back(w);
    }
  } else {
    std::mt19937_64 wr(seed ^ 0x9e3779b97f4a7c15ULL);
    for (int i = 0; i < m; ++i) dirs.push_back(State::Unit(m, i));
    for (int i = 0; i < 512; ++i) {
      State w(m);
      for (int j = 0; j < m; ++j) w[j] = uniform_in(wr, -1.0, 1.0);
      if (w.norm() > 1e-3) dirs.push_back(w / w.norm());
    }
  }
  double sup_h = 0.0;
  double sup_f = 0.0;
  const double eps = 1e-5;
  auto visit = [&](const State& u) {
    Eigen::SelfAdjointEigenSolver<StateMatrix> es(sys.entropy_hessian(u), Eigen::EigenvaluesOnly);
    sup_h = std::max(sup_h, es.eigenvalues().cwiseAbs().maxCoeff());
    for (int a = 0; a < sys.d(); ++a)
      for (const State& w : dirs) {
        const StateMatrix dJ =
            (sys.flux_jacobian(u + eps * w, a) - sys.flux_jacobian(u - eps * w, a)) / (2 * eps);
        sup_f = std::max(sup_f, (dJ * w).norm());
      }
  };
  for (const State& c : sys.omega().corners()) visit(c);
  std::mt19937_64 rng(seed);
  for (int i = 0; i < samples; ++i) visit(sys.omega().sample(rng));
  return 1.01 * 0.5 * sup_h * sup_f;
}

double sampled_wave_speed(const SystemModel& sys, int samples, std::uint64_t seed) {
  const auto dirs = sample_directions(sys.d());
  double best = 0.0;
  auto visit = [&](const State& u) {
    for (const Vec2& n : dirs) best = std::max(best, sys.max_wave_speed(u, n));
  };
  for (const State& c : sys.omega().corners()) visit(c);
  std::mt19937_64 rng(seed);
  for (int i = 0; i < samples; ++i) visit(sys.omega().sample(rng));
  return best;
}

namespace {

class Advection final : public SystemModel {
 public:
  Advection(int d, std::vector<double> c, AdmissibleSet omega)
      : SystemModel(std::move(omega)), d_(d), c_(std::move(c)) {}
  std::string name() const override { return d_ == 1 ? "advection1d" : "advection2d"; }
  int m() const override { return 1; }
  int d() const override { return d_; }
  State flux(const State& u, int a) const override { return c_[static_cast<std::size_t>(a)] * u; }
  StateMatrix flux_jacobian(const State&, int a) const override {
    return StateMatrix::Constant(1, 1, c_[static_cast<std::size_t>(a)]);
  }
  double entropy(const State& u) const override { return 0.5 * u[0] * u[0]; }
  State entropy_gradient(const State& u) const override { return u; }
  StateMatrix entropy_hessian(const State&) const override { return StateMatrix::Ones(1, 1); }
  double entropy_flux(const State& u, int a) const override {
    return 0.5 * c_[static_cast<std::size_t>(a)] * u[0] * u[0];
  }
  double max_wave_speed(const State&, const Vec2& n) const override {
    double s = 0.0;
    for (int a = 0; a < d_; ++a) s += c_[static_cast<std::size_t>(a)] * n[a];
    return std::abs(s);
  }

 private:
  int d_;
  std::vector<double> c_;
};

class Burgers final : public SystemModel {
 public:
  explicit Burgers(AdmissibleSet omega) : SystemModel(std::move(omega)) {}
  std::string name() const override { return "burgers1d"; }
  int m() const override { return 1; }
  int d() const override { return 1; }
  State flux(const State& u, int) const override { return State::Constant(1, 0.5 * u[0] * u[0]); }
  StateMatrix flux_jacobian(const State& u, int) const override {
    return StateMatrix::Constant(1, 1, u[0]);
  }
  double entropy(const State& u) const override { return 0.5 * u[0] * u[0]; }
  State entropy_gradient(const State& u) const override { return u; }
  StateMatrix entropy_hessian(const State&) const override { return StateMatrix::Ones(1, 1); }
  double entropy_flux(const State& u, int) const override { return u[0] * u[0] * u[0] / 3.0; }
  double max_wave_speed(const State& u, const Vec2& n) const override {
    return std::abs(u[0] * n[0]);
  }
  std::vector<double> flux_critical_points(const Vec2&) const override { return {0.0}; }
};

class Friedrichs final : public SystemModel {
 public:
  Friedrichs(std::vector<StateMatrix> a, AdmissibleSet omega)
      : SystemModel(std::move(omega)), a_(std::move(a)) {}
  std::string name() const override { return "friedrichs" + std::to_string(d()) + "d"; }
  int m() const override { return static_cast<int>(a_[0].rows()); }
  int d() const override { return static_cast<int>(a_.size()); }
  State flux(const State& u, int a) const override { return A(a) * u; }
  StateMatrix flux_jacobian(const State&, int a) const override { return A(a); }
  double entropy(const State& u) const override { return u.squaredNorm(); }
  State entropy_gradient(const State& u) const override { return 2.0 * u; }
  StateMatrix entropy_hessian(const State&) const override {
    return 2.0 * StateMatrix::Identity(m(), m());
  }
  double entropy_flux(const State& u, int a) const override { return u.dot(A(a) * u); }
  double max_wave_speed(const State&, const Vec2& n) const override {
    StateMatrix J = StateMatrix::Zero(m(), m());
    for (int a = 0; a < d(); ++a) J += n[a] * A(a);
    Eigen::SelfAdjointEigenSolver<StateMatrix> es(J, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }

 private:
  const StateMatrix& A(int a) const { return a_[static_cast<std::size_t>(a)]; }
  std::vector<StateMatrix> a_;
};

class ShallowWater1d final : public SystemModel {
 public:
  ShallowWater1d(double g, AdmissibleSet omega) : SystemModel(std::move(omega)), g_(g) {}
  std::string name() const override { return "shallow_water1d"; }
  int m() const override { return 2; }
  int d() const override { return 1; }
  State flux(const State& u, int) const override {
    const double h = u[0], q = u[1];
    State f(2);
    f << q, q * q / h + 0.5 * g_ * h * h;
    return f;
  }
  StateMatrix flux_jacobian(const State& u, int) const override {
    const double h = u[0], q = u[1];
    StateMatrix J(2, 2);
    J << 0.0, 1.0, -q * q / (h * h) + g_ * h, 2.0 * q / h;
    return J;
  }
  double entropy(const State& u) const override {
    const double h = u[0], q = u[1];
    return 0.5 * q * q / h + 0.5 * g_ * h * h;
  }
  State entropy_gradient(const State& u) const override {
    const double h = u[0], q = u[1];
    State r(2);
    r << -0.5 * q * q / (h * h) + g_ * h, q / h;
    return r;
  }
  StateMatrix entropy_hessian(const State& u) const override {
    const double h = u[0], q = u[1];
    StateMatrix H(2, 2);
    H << q * q / (h * h * h) + g_, -q / (h * h), -q / (h * h), 1.0 / h;
    return H;
  }
  double entropy_flux(const State& u, int) const override {
    const double h = u[0], q = u[1];
    return (0.5 * q * q / h + g_ * h * h) * (q / h);
  }
  double max_wave_speed(const State& u, const Vec2& n) const override {
    return (std::abs(u[1] / u[0]) + std::sqrt(g_ * u[0])) * std::abs(n[0]);
  }
  bool in_domain(const State& u) const override { return u.allFinite() && u[0] > 0.0; }

 private:
  double g_;
};

void finish(SystemModel& s) {
  s.estimate_betas(kDefaultSamples, kDefaultSeed);
  compute_lf(s, kDefaultSamples, kDefaultSeed);
}

}  // namespace

SystemPtr make_advection(int d, const std::vector<double>& speed, AdmissibleSet omega) {
  if (d != 1 && d != 2) throw ValidationError("advection: d must be 1 or 2");
  if (static_cast<int>(speed.size()) != d)
    throw ValidationError("advection: speed vector must have d components");
  if (omega.m() != 1) throw ValidationError("advection: admissible set must be scalar");
  auto s = std::make_shared<Advection>(d, speed, std::move(omega));
  finish(*s);
  return s;
}

SystemPtr make_burgers(AdmissibleSet omega) {
  if (omega.m() != 1) throw ValidationError("burgers: admissible set must be scalar");
  auto s = std::make_shared<Burgers>(std::move(omega));
  finish(*s);
  return s;
}

SystemPtr make_friedrichs(const std::vector<StateMatrix>& a_list, AdmissibleSet omega) {
  if (a_list.empty() || a_list.size() > 2)
    throw ValidationError("friedrichs: need one or two matrices");
  const Eigen::Index m = a_list[0].rows();
  if (m < 1 || m > kMaxComponents) throw ValidationError("friedrichs: m must be in 1..4");
  for (const StateMatrix& A : a_list) {
    if (A.rows() != m || A.cols() != m) throw ValidationError("friedrichs: matrices must be m x m");
    if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-14)
      throw ValidationError("friedrichs: matrix is not symmetric");
  }
  if (omega.m() != m) throw ValidationError("friedrichs: admissible set has wrong size");
  auto s = std::make_shared<Friedrichs>(a_list, std::move(omega));
  finish(*s);
  return s;
}

SystemPtr make_shallow_water_1d(double g, double h_min, double h_max, double q_max) {
  if (!(g > 0.0)) throw ValidationError("shallow water: gravity must be positive");
  if (!(h_min > 0.0)) throw ValidationError("shallow water: h_min must be positive");
  if (!(h_max > h_min)) throw ValidationError("shallow water: need h_max > h_min");
  if (!(q_max > 0.0)) throw ValidationError("shallow water: q_max must be positive");
  State lo(2), hi(2);
  lo << h_min, -q_max;
  hi << h_max, q_max;
  AdmissibleSet om = AdmissibleSet::box(lo, hi);
  om.kind = AdmissibleSet::Kind::PositivityConstrained;
  auto s = std::make_shared<ShallowWater1d>(g, std::move(om));
  finish(*s);
  return s;
}

}  // namespace hypflux
