#include "hypflux/mesh.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace hypflux;
using Catch::Approx;

namespace {

void check_invariants(const Mesh& m) {
  REQUIRE_NOTHROW(validate_mesh(m));
  std::vector<int> refs(m.num_interfaces(), 0);
  for (const Cell& c : m.cells()) {
    Vec2 s = Vec2::Zero();
    double per = 0.0;
    for (int f : c.interface_ids) {
      s += m.interface(f).area * m.outward_normal(c.id, f);
      per += m.interface(f).area;
      ++refs[static_cast<std::size_t>(f)];
    }
    CHECK(s.norm() <= 1e-12 * per);
    const double hd = m.dim() == 1 ? m.h() : m.h() * m.h();
    const double hd1 = m.dim() == 1 ? 1.0 : m.h();
    CHECK(c.volume >= m.a() * hd * (1 - 1e-14));
    CHECK(per <= hd1 / m.a() * (1 + 1e-14));
  }
  for (int r : refs) CHECK(r == 2);
  for (const Interface& f : m.interfaces()) {
    CHECK(f.left != f.right);
    CHECK(std::abs(f.normal.norm() - 1.0) <= 1e-14);
    CHECK((m.outward_normal(f.left, f.id) + m.outward_normal(f.right, f.id)).norm() == 0.0);
  }
}

}  // namespace

TEST_CASE("uniform 1d mesh", "[mesh]") {
  const Mesh m = build_uniform_1d(4, 1.0);
  CHECK(m.num_cells() == 4);
  CHECK(m.num_interfaces() == 4);
  CHECK(m.h() == 0.25);
  for (const Cell& c : m.cells()) CHECK(c.volume == 0.25);
  // |K| = h >= a h and |dK| = 2 <= 1/a with a = 1/2
  CHECK(m.a() == 0.5);
  CHECK(regularity_constant(m) == 0.5);
  for (const Interface& f : m.interfaces()) {
    CHECK(f.area == 1.0);
    CHECK(f.normal.x() == 1.0);
  }
  check_invariants(m);
  CHECK_THROWS_AS(build_uniform_1d(2, 1.0), ValidationError);
}

TEST_CASE("uniform quad mesh", "[mesh]") {
  const Mesh m = build_uniform_quad_2d(4, 4, 1.0, 1.0);
  CHECK(m.num_cells() == 16);
  CHECK(m.num_interfaces() == 32);
  for (const Cell& c : m.cells()) CHECK(c.volume == Approx(0.0625).epsilon(1e-15));
  CHECK(m.h() == Approx(0.25 * std::sqrt(2.0)).epsilon(1e-15));
  CHECK(m.a() == Approx(1.0 / (2.0 * std::sqrt(2.0))).epsilon(1e-14));
  check_invariants(m);

  const Mesh r = build_uniform_quad_2d(4, 8, 1.0, 1.0);
  for (const Interface& f : r.interfaces()) {
    const Cell& L = r.cell(f.left);
    const Cell& R = r.cell(f.right);
    const bool vertical = std::abs(L.centroid.y() - R.centroid.y()) < 1e-12;
    if (vertical) {
      CHECK(std::abs(f.normal.x()) == 1.0);
      CHECK(f.normal.y() == 0.0);
    }
  }
  CHECK_THROWS_AS(build_uniform_quad_2d(2, 4, 1.0, 1.0), ValidationError);
}

TEST_CASE("perturbed quad mesh", "[mesh]") {
  const Mesh z = build_perturbed_quad_2d(8, 8, 1, 1, 0.0, 7);
  const Mesh u = build_uniform_quad_2d(8, 8, 1, 1);
  REQUIRE(z.num_cells() == u.num_cells());
  for (std::size_t k = 0; k < z.num_cells(); ++k) {
    CHECK(z.cells()[k].volume == u.cells()[k].volume);
    CHECK(z.cells()[k].centroid == u.cells()[k].centroid);
  }
  CHECK(z.id() == u.id());

  const Mesh p = build_perturbed_quad_2d(8, 8, 1, 1, 0.2, 7);
  for (const Cell& c : p.cells()) CHECK(cell_is_convex(c));
  CHECK(p.a() >= 0.05);
  check_invariants(p);

  const Mesh q = build_perturbed_quad_2d(8, 8, 1, 1, 0.2, 7);
  CHECK(mesh_to_json(p) == mesh_to_json(q));
  const Mesh other = build_perturbed_quad_2d(8, 8, 1, 1, 0.2, 8);
  CHECK(other.id() != p.id());
  CHECK_THROWS_AS(build_perturbed_quad_2d(8, 8, 1, 1, 0.25, 7), ValidationError);
}

TEST_CASE("regularity constant re-checks", "[mesh]") {
  for (const Mesh& m : {build_uniform_1d(17, 2.0), build_uniform_quad_2d(5, 7, 1.0, 3.0),
                        build_perturbed_quad_2d(10, 6, 2.0, 1.0, 0.15, 3)})
    check_invariants(m);
}

TEST_CASE("mesh json round trip is bit exact", "[mesh]") {
  for (const Mesh& m : {build_uniform_1d(9, 1.0), build_perturbed_quad_2d(6, 5, 1.0, 1.3, 0.2, 11)}) {
    const std::string a = mesh_to_json(m);
    const Mesh back = mesh_from_json(a);
    CHECK(mesh_to_json(back) == a);
    CHECK(back.id() == m.id());
    CHECK(back.h() == m.h());
    CHECK(back.a() == m.a());
  }
  CHECK_THROWS_AS(mesh_from_json("{not json"), ParseError);
}

TEST_CASE("cell quadrature", "[mesh]") {
  const Mesh m = build_perturbed_quad_2d(6, 6, 1.0, 1.0, 0.2, 5);
  for (const Cell& c : m.cells()) {
    for (auto rule : {QuadratureRule::Midpoint, QuadratureRule::Gauss3}) {
      double w = 0.0;
      Vec2 first = Vec2::Zero();
      for (const auto& q : cell_quadrature(m, c.id, rule, 3)) {
        w += q.w;
        first += q.w * q.x;
      }
      CHECK(w == Approx(c.volume).epsilon(1e-13));
      // Gauss first moments reproduce the polygon centroid
      if (rule == QuadratureRule::Gauss3) CHECK((first / w - c.centroid).norm() < 1e-12);
    }
  }
  const Mesh l = build_uniform_1d(4, 1.0);
  double s = 0.0;
  for (const auto& q : cell_quadrature(l, 0, QuadratureRule::Gauss3)) s += q.w * q.x.x() * q.x.x();
  CHECK(s == Approx(std::pow(0.25, 3) / 3.0).epsilon(1e-14));
}
