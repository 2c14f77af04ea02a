#include "hypflux/reference.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace hypflux {

State ReferenceSolution::cell_mean(const Mesh& mesh, int k, double t, QuadratureRule rule) const {
  State acc;
  bool first = true;
  for (const QuadraturePoint& q : cell_quadrature(mesh, k, rule)) {
    const State v = eval(q.x, t);
    if (first) {
      acc = q.w * v;
      first = false;
    } else {
      acc += q.w * v;
    }
  }
  return acc / mesh.cell(k).volume;
}

namespace {

Vec2 wrap(const Vec2& x, const std::vector<double>& dom) {
  Vec2 r = x;
  for (std::size_t a = 0; a < dom.size(); ++a) {
    const auto i = static_cast<Eigen::Index>(a);
    r[i] -= dom[a] * std::floor(r[i] / dom[a]);
  }
  return r;
}

class ExactAdvection final : public ReferenceSolution {
 public:
  ExactAdvection(Vec2 c, InitialDataPtr u0, std::vector<double> dom)
      : c_(c), u0_(std::move(u0)), dom_(std::move(dom)) {}
  std::string kind() const override { return "exact-advection"; }
  State eval(const Vec2& x, double t) const override { return u0_->value(wrap(x - c_ * t, dom_)); }
  double lipschitz_bound() const override { return u0_->lipschitz() * (1.0 + c_.norm()); }

 private:
  Vec2 c_;
  InitialDataPtr u0_;
  std::vector<double> dom_;
};

class ExactFriedrichs final : public ReferenceSolution {
 public:
  ExactFriedrichs(const StateMatrix& A, InitialDataPtr u0, std::vector<double> dom)
      : u0_(std::move(u0)), dom_(std::move(dom)) {
    Eigen::SelfAdjointEigenSolver<StateMatrix> es(A);
    R_ = es.eigenvectors();
    lam_ = es.eigenvalues();
  }
  std::string kind() const override { return "exact-friedrichs"; }
  State eval(const Vec2& x, double t) const override {
    const Eigen::Index m = lam_.size();
    State w(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      const Vec2 y = wrap(x - Vec2(lam_[i] * t, 0.0), dom_);
      w[i] = R_.col(i).dot(u0_->value(y));
    }
    return R_ * w;
  }
  double lipschitz_bound() const override {
    const double s = std::sqrt(static_cast<double>(lam_.size()));
    return s * u0_->lipschitz() * (1.0 + lam_.cwiseAbs().maxCoeff());
  }

 private:
  InitialDataPtr u0_;
  std::vector<double> dom_;
  StateMatrix R_;
  State lam_;
};

class ExactBurgers final : public ReferenceSolution {
 public:
  ExactBurgers(InitialDataPtr u0, std::vector<double> dom) : u0_(std::move(u0)), dom_(std::move(dom)) {
    const int n = 100000;
    double mn = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = dom_[0] * i / n;
      mn = std::min(mn, u0_->derivative(Vec2(x, 0.0), 0)[0]);
    }
    min_slope_ = mn;
    valid_until_ = mn < 0.0 ? 0.9 / (-mn) : std::numeric_limits<double>::infinity();
    const auto r = u0_->range();
    umin_ = r.first[0];
    umax_ = r.second[0];
  }
  std::string kind() const override { return "exact-burgers-characteristics"; }
  double valid_until() const override { return valid_until_; }
  double lipschitz_bound() const override {
    const double umag = std::max(std::abs(umin_), std::abs(umax_));
    return 10.0 * u0_->lipschitz() * (1.0 + umag);
  }
  State eval(const Vec2& x, double t) const override {
    if (t > valid_until_)
      throw HorizonError("burgers reference: t = " + std::to_string(t) +
                         " is beyond the shock guard " + std::to_string(valid_until_));
    if (t == 0.0) return u0_->value(x);
    const double X = x[0];
    auto F = [&](double y) { return y + t * u0_->value(Vec2(y, 0.0))[0] - X; };
    double lo = X - t * umax_, hi = X - t * umin_;
    double flo = F(lo), fhi = F(hi);
    if (flo > 0.0 || fhi < 0.0) {
      // range() is exact for the catalog; widen in case of rounding
      lo -= 1e-9;
      hi += 1e-9;
      flo = F(lo);
      fhi = F(hi);
    }
    if (std::abs(flo) <= 1e-13) return u0_->value(Vec2(lo, 0.0));
    if (std::abs(fhi) <= 1e-13) return u0_->value(Vec2(hi, 0.0));
    double y = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
      const double f = F(y);
      if (std::abs(f) <= 1e-13) return u0_->value(Vec2(y, 0.0));
      if (f > 0.0) hi = y; else lo = y;
      const double df = 1.0 + t * u0_->derivative(Vec2(y, 0.0), 0)[0];
      double yn = y - f / df;
      if (!(yn > lo && yn < hi)) yn = 0.5 * (lo + hi);
      if (hi - lo <= 4e-16 * std::max(1.0, std::abs(y))) return u0_->value(Vec2(yn, 0.0));
      y = yn;
    }
    throw NumericalError("burgers reference: characteristic solve did not converge");
  }
  double min_slope() const { return min_slope_; }

 private:
  InitialDataPtr u0_;
  std::vector<double> dom_;
  double min_slope_ = 0.0;
  double valid_until_ = 0.0;
  double umin_ = 0.0, umax_ = 0.0;
};

class FineGrid final : public ReferenceSolution {
 public:
  FineGrid(const Mesh& mesh, Trajectory tr, double T)
      : mesh_(mesh), tr_(std::move(tr)), T_(T) {
    for (const StateField& f : tr_.snapshots) times_.push_back(f.time);
    double gx = 0.0, gt = 0.0;
    for (std::size_t s = 0; s < tr_.snapshots.size(); ++s) {
      const auto& v = tr_.snapshots[s].values;
      for (const Interface& f : mesh_.interfaces()) {
        const double dx = (mesh_.cell(f.right).centroid - mesh_.cell(f.left).centroid).norm();
        const double span = std::min(dx, mesh_.periodic_distance(mesh_.cell(f.right).centroid,
                                                                 mesh_.cell(f.left).centroid));
        gx = std::max(gx, (v[static_cast<std::size_t>(f.right)] - v[static_cast<std::size_t>(f.left)]).norm() / span);
      }
      if (s > 0) {
        const double dt = times_[s] - times_[s - 1];
        for (std::size_t k = 0; k < v.size(); ++k)
          gt = std::max(gt, (v[k] - tr_.snapshots[s - 1].values[k]).norm() / dt);
      }
    }
    lip_ = 1.01 * (gx + gt);
  }
  std::string kind() const override { return "fine-grid"; }
  bool numerical() const override { return true; }
  double valid_until() const override { return T_; }
  double lipschitz_bound() const override { return lip_; }

  State eval(const Vec2& x, double t) const override {
    const StateField& f = at(t);
    int best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (const Cell& c : mesh_.cells()) {
      const double d = mesh_.periodic_distance(c.centroid, x);
      if (d < bd) {
        bd = d;
        best = c.id;
      }
    }
    return f.values[static_cast<std::size_t>(best)];
  }

  State cell_mean(const Mesh& coarse, int k, double t, QuadratureRule) const override {
    const auto& members = cover(coarse)[static_cast<std::size_t>(k)];
    if (members.empty()) throw StructuralError("fine-grid reference: coarse cell holds no fine cell");
    const StateField& f = at(t);
    State acc = State::Zero(f.values[0].size());
    double vol = 0.0;
    for (int j : members) {
      acc += mesh_.cell(j).volume * f.values[static_cast<std::size_t>(j)];
      vol += mesh_.cell(j).volume;
    }
    return acc / vol;
  }

 private:
  const StateField& at(double t) const {
    if (t > T_ * (1.0 + 1e-12))
      throw HorizonError("fine-grid reference: t beyond the computed horizon");
    auto it = std::upper_bound(times_.begin(), times_.end(), t + 1e-12 * std::max(1.0, T_));
    const std::size_t i = it == times_.begin() ? 0 : static_cast<std::size_t>(it - times_.begin()) - 1;
    return tr_.snapshots[i];
  }

  static bool inside(const Cell& c, const Vec2& p, int dim) {
    if (dim == 1) return p.x() >= c.vertices[0].x() && p.x() < c.vertices[1].x();
    const auto& v = c.vertices;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const Vec2 e = v[(i + 1) % v.size()] - v[i];
      const Vec2 r = p - v[i];
      if (e.x() * r.y() - e.y() * r.x() < 0.0) return false;
    }
    return true;
  }

  const std::vector<std::vector<int>>& cover(const Mesh& coarse) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(coarse.id());
    if (it != cache_.end()) return it->second;
    std::vector<std::vector<int>> m(coarse.num_cells());
    for (const Cell& fc : mesh_.cells())
      for (const Cell& cc : coarse.cells())
        if (inside(cc, fc.centroid, coarse.dim())) {
          m[static_cast<std::size_t>(cc.id)].push_back(fc.id);
          break;
        }
    return cache_.emplace(coarse.id(), std::move(m)).first->second;
  }

  Mesh mesh_;
  Trajectory tr_;
  double T_;
  std::vector<double> times_;
  double lip_ = 0.0;
  mutable std::mutex mu_;
  mutable std::map<std::uint64_t, std::vector<std::vector<int>>> cache_;
};

}  // namespace

ReferencePtr exact_advection(const Vec2& speed, InitialDataPtr u0, std::vector<double> domain) {
  return std::make_shared<ExactAdvection>(speed, std::move(u0), std::move(domain));
}

ReferencePtr exact_friedrichs(const StateMatrix& A, InitialDataPtr u0, std::vector<double> domain) {
  if (A.rows() != A.cols() || (A - A.transpose()).cwiseAbs().maxCoeff() > 1e-14)
    throw ValidationError("friedrichs reference: matrix must be square and symmetric");
  if (A.rows() != u0->m()) throw ValidationError("friedrichs reference: size mismatch with u0");
  return std::make_shared<ExactFriedrichs>(A, std::move(u0), std::move(domain));
}

ReferencePtr exact_burgers(InitialDataPtr u0, std::vector<double> domain) {
  if (u0->m() != 1 || domain.size() != 1)
    throw ValidationError("burgers reference: scalar one-dimensional data required");
  return std::make_shared<ExactBurgers>(std::move(u0), std::move(domain));
}

ReferencePtr fine_grid_reference(const Mesh& fine_mesh, const FluxScheme& scheme,
                                 const InitialFunction& u0, const RunConfig& cfg, int factor,
                                 bool enforce_min_factor) {
  if (enforce_min_factor && factor < 8)
    throw ValidationError("fine-grid reference: refinement factor must be at least 8");
  RunConfig c = cfg;
  const TimeStep ts = compute_dt(fine_mesh, scheme, c);
  const int cap = 4096;
  c.record_every = std::max(1, (ts.n_steps + cap - 1) / cap);
  Trajectory tr = run(fine_mesh, scheme, u0, c);
  return std::make_shared<FineGrid>(fine_mesh, std::move(tr), cfg.final_time);
}

}  // namespace hypflux
