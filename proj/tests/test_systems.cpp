#include "hypflux/systems.hpp"

#include "oracles.hpp"

#include <catch_amalgamated.hpp>

#include <Eigen/Eigenvalues>

#include <cmath>

using namespace hypflux;
using Catch::Approx;

namespace {

State s1(double a) { return State::Constant(1, a); }
State s2(double a, double b) {
  State s(2);
  s << a, b;
  return s;
}

AdmissibleSet box1(double lo, double hi) { return AdmissibleSet::box(s1(lo), s1(hi)); }

StateMatrix mat2(double a, double b, double c, double d) {
  StateMatrix M(2, 2);
  M << a, b, c, d;
  return M;
}

std::vector<SystemPtr> catalog() {
  StateMatrix A3(3, 3);
  A3 << 0.5, 1.0, 0.0, 1.0, -0.2, 0.3, 0.0, 0.3, 1.5;
  return {
      make_advection(1, {1.3}, box1(-1.0, 2.0)),
      make_advection(2, {1.0, -0.5}, box1(-0.5, 1.5)),
      make_burgers(box1(-1.0, 1.0)),
      make_burgers(box1(0.225, 0.775)),
      make_friedrichs({mat2(1, 2, 2, -1)}, AdmissibleSet::box(s2(-1, -1), s2(1, 1))),
      make_friedrichs({A3}, AdmissibleSet::box(State::Constant(3, -1.0), State::Constant(3, 2.0))),
      make_shallow_water_1d(9.81, 0.5, 1.5, 1.0),
      make_shallow_water_1d(9.81, 0.1, 2.0, 2.0),
  };
}

}  // namespace

TEST_CASE("relative entropy examples", "[systems]") {
  auto fr = make_friedrichs({mat2(1, 0, 0, -1)}, AdmissibleSet::box(s2(-1, -1), s2(1, 1)));
  CHECK(relative_entropy(*fr, s2(0, 1), s2(1, 0)) == Approx(2.0).epsilon(1e-15));
  auto bu = make_burgers(box1(-2.0, 2.0));
  CHECK(relative_entropy(*bu, s1(1), s1(0)) == 0.5);
  CHECK(relative_entropy(*bu, s1(0.3), s1(0.3)) == 0.0);
  CHECK_THROWS_AS(relative_entropy(*bu, s1(3.0), s1(0.0)), AdmissibilityError);
}

TEST_CASE("relative entropy flux examples", "[systems]") {
  auto fr = make_friedrichs({mat2(1, 0, 0, -1)}, AdmissibleSet::box(s2(-1, -1), s2(1, 1)));
  CHECK(relative_entropy_flux(*fr, s2(0, 1), s2(1, 0), 0) == Approx(0.0).margin(1e-15));
  // Q(v,u) = Q(u,v) for Friedrichs
  CHECK(relative_entropy_flux(*fr, s2(1, 0), s2(0, 1), 0) ==
        Approx(relative_entropy_flux(*fr, s2(0, 1), s2(1, 0), 0)).margin(1e-15));
  auto bu = make_burgers(box1(-2.0, 2.0));
  CHECK(relative_entropy_flux(*bu, s1(1), s1(0), 0) == Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(relative_entropy_flux(*bu, s1(0.7), s1(0.7), 0) == 0.0);
}

TEST_CASE("relative z examples", "[systems]") {
  auto fr = make_friedrichs({mat2(1, 2, 2, -1)}, AdmissibleSet::box(s2(-1, -1), s2(1, 1)));
  CHECK(relative_z(*fr, s2(0.3, -0.9), s2(1, 0.2), 0).norm() <= 1e-14);
  auto bu = make_burgers(box1(-2.0, 2.0));
  CHECK(relative_z(*bu, s1(2), s1(0), 0)[0] == 2.0);
  CHECK(relative_z(*bu, s1(1.1), s1(1.1), 0)[0] == 0.0);
}

TEST_CASE("compute_lf", "[systems]") {
  auto adv = make_advection(1, {-2.5}, box1(-1, 1));
  CHECK(compute_lf(*adv, 2000, 3) == 2.5);
  CHECK(adv->lf() == 2.5);

  auto bu = make_burgers(box1(-1, 1));
  // D2eta = 1, so the quotient is |u|; dense grid oracle
  double grid = 0.0;
  for (int i = 0; i <= 10000; ++i) grid = std::max(grid, std::abs(-1.0 + 2.0 * i / 10000));
  CHECK(compute_lf(*bu, 4096, 3) == Approx(grid).margin(0.01));

  const StateMatrix A = mat2(0.5, 1.5, 1.5, -2.0);
  auto fr = make_friedrichs({A}, AdmissibleSet::box(s2(-1, -1), s2(1, 1)));
  Eigen::SelfAdjointEigenSolver<StateMatrix> es(A);
  CHECK(fr->lf() == Approx(es.eigenvalues().cwiseAbs().maxCoeff()).epsilon(1e-12));
  CHECK_THROWS_AS(compute_lf(*bu, 999, 1), ValidationError);
}

TEST_CASE("factories reject bad input", "[systems]") {
  CHECK_THROWS_AS(make_friedrichs({mat2(1, 2, 0, 1)}, AdmissibleSet::box(s2(-1, -1), s2(1, 1))),
                  ValidationError);
  CHECK_THROWS_AS(make_shallow_water_1d(9.81, 0.0, 1.0, 1.0), ValidationError);
  CHECK_THROWS_AS(make_advection(2, {1.0}, box1(0, 1)), ValidationError);
}

TEST_CASE("shallow water hessian is positive on samples", "[systems]") {
  auto sw = make_shallow_water_1d(9.81, 0.1, 2.0, 2.0);
  std::mt19937_64 rng(99);
  for (int i = 0; i < 2000; ++i) {
    const State u = oracle::sample_box(rng, sw->omega().lower, sw->omega().upper);
    Eigen::SelfAdjointEigenSolver<StateMatrix> es(sw->entropy_hessian(u));
    CHECK(es.eigenvalues().minCoeff() > 0.0);
    CHECK(es.eigenvalues().minCoeff() >= sw->beta0());
    CHECK(es.eigenvalues().maxCoeff() <= sw->beta1());
  }
}

TEST_CASE("compatibility, symmetry and derivatives on samples", "[systems][property]") {
  for (const SystemPtr& sp : catalog()) {
    const SystemModel& sys = *sp;
    INFO(sys.name());
    std::mt19937_64 rng(1234);
    double worst_xi = 0.0, worst_sym = 0.0, worst_dj = 0.0, worst_de = 0.0, worst_he = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const State u = oracle::sample_box(rng, sys.omega().lower, sys.omega().upper);
      CHECK(sys.entropy(u) >= 0.0);
      const State de = sys.entropy_gradient(u);
      const StateMatrix he = sys.entropy_hessian(u);
      worst_de = std::max(worst_de, (oracle::fd_gradient([&](const State& w) { return sys.entropy(w); }, u) - de).norm());
      worst_he = std::max(worst_he, (oracle::fd_jacobian([&](const State& w) { return sys.entropy_gradient(w); }, u) - he).norm());
      for (int a = 0; a < sys.d(); ++a) {
        const StateMatrix J = sys.flux_jacobian(u, a);
        const State dxi = oracle::fd_gradient([&](const State& w) { return sys.entropy_flux(w, a); }, u);
        const double scale = std::max(1.0, (de.transpose() * J).norm());
        worst_xi = std::max(worst_xi, (dxi.transpose() - de.transpose() * J).norm() / scale);
        worst_sym = std::max(worst_sym, (he * J - J.transpose() * he).norm());
        worst_dj = std::max(worst_dj, (oracle::fd_jacobian([&](const State& w) { return sys.flux(w, a); }, u) - J).norm());
      }
    }
    CHECK(worst_xi <= 1e-8);
    CHECK(worst_sym <= 1e-8);
    CHECK(worst_dj <= 1e-7);
    CHECK(worst_de <= 1e-8);
    CHECK(worst_he <= 1e-7);
  }
}

TEST_CASE("relative entropy bracket and finite speed on samples", "[systems][property]") {
  for (const SystemPtr& sp : catalog()) {
    const SystemModel& sys = *sp;
    INFO(sys.name());
    const double cz = estimate_cz(sys, 2000, 17);
    std::mt19937_64 rng(4321);
    int bad_bracket = 0, bad_q = 0, bad_z = 0;
    for (int i = 0; i < 10000; ++i) {
      const State u = oracle::sample_box(rng, sys.omega().lower, sys.omega().upper);
      const State v = oracle::sample_box(rng, sys.omega().lower, sys.omega().upper);
      const double H = relative_entropy(sys, v, u);
      const double d2 = (v - u).squaredNorm();
      const double tol = 1e-10 * std::max(1.0, std::abs(H));
      if (H < 0.5 * sys.beta0() * d2 - tol || H > 0.5 * sys.beta1() * d2 + tol) ++bad_bracket;
      for (int a = 0; a < sys.d(); ++a) {
        if (std::abs(relative_entropy_flux(sys, v, u, a)) > 1.01 * sys.lf() * H + 1e-12) ++bad_q;
        if (relative_z(sys, v, u, a).norm() > cz * d2 + 1e-12) ++bad_z;
      }
    }
    CHECK(bad_bracket == 0);
    CHECK(bad_q == 0);
    CHECK(bad_z == 0);
  }
}

TEST_CASE("friedrichs specialisation is exact", "[systems][property]") {
  StateMatrix A3(3, 3);
  A3 << 0.5, 1.0, 0.0, 1.0, -0.2, 0.3, 0.0, 0.3, 1.5;
  auto fr = make_friedrichs({A3}, AdmissibleSet::box(State::Constant(3, -1.0), State::Constant(3, 2.0)));
  CHECK(fr->beta0() == 2.0);
  CHECK(fr->beta1() == 2.0);
  std::mt19937_64 rng(8);
  for (int i = 0; i < 2000; ++i) {
    const State u = oracle::sample_box(rng, fr->omega().lower, fr->omega().upper);
    const State v = oracle::sample_box(rng, fr->omega().lower, fr->omega().upper);
    const double d2 = (u - v).squaredNorm();
    CHECK(std::abs(relative_entropy(*fr, v, u) - d2) <= 1e-14 * std::max(1.0, d2) * 10);
    CHECK(std::abs(relative_entropy(*fr, u, v) - d2) <= 1e-14 * std::max(1.0, d2) * 10);
    CHECK(relative_z(*fr, v, u, 0).norm() <= 1e-14);
  }
}

TEST_CASE("admissible set", "[systems]") {
  const AdmissibleSet b = AdmissibleSet::box_from_range(s1(0.25), s1(0.75), 0.05);
  CHECK(b.lower[0] == Approx(0.225));
  CHECK(b.upper[0] == Approx(0.775));
  CHECK(b.contains(s1(0.5)));
  CHECK_FALSE(b.contains(s1(0.8)));
  CHECK_FALSE(b.contains(s1(std::nan(""))));
  const AdmissibleSet q = AdmissibleSet::box(s2(0, 0), s2(1, 2));
  CHECK(q.corners().size() == 4);
  CHECK_THROWS_AS(AdmissibleSet::box(s1(1), s1(0)), ValidationError);
}
