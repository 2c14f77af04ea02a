#include "hypflux/mesh.hpp"
#include "hypflux/random.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

namespace hypflux {

namespace {

double polygon_area(const std::vector<Vec2>& p) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Vec2& a = p[i];
    const Vec2& b = p[(i + 1) % p.size()];
    s += a.x() * b.y() - b.x() * a.y();
  }
  return 0.5 * s;
}

Vec2 polygon_centroid(const std::vector<Vec2>& p, double area) {
  Vec2 c = Vec2::Zero();
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Vec2& a = p[i];
    const Vec2& b = p[(i + 1) % p.size()];
    const double cr = a.x() * b.y() - b.x() * a.y();
    c += (a + b) * cr;
  }
  return c / (6.0 * area);
}

double diameter(const Cell& c) {
  double d = 0.0;
  for (std::size_t i = 0; i < c.vertices.size(); ++i)
    for (std::size_t j = i + 1; j < c.vertices.size(); ++j)
      d = std::max(d, (c.vertices[i] - c.vertices[j]).norm());
  return d;
}

struct Fnv {
  std::uint64_t h = 1469598103934665603ULL;
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 1099511628211ULL;
    }
  }
  void f64(double x) { bytes(&x, sizeof x); }
  void i64(std::int64_t x) { bytes(&x, sizeof x); }
};

Mesh assemble_quad_grid(int nx, int ny, double lx, double ly,
                        const std::vector<Vec2>& vtx) {
  auto V = [&](int i, int j) -> const Vec2& {
    return vtx[static_cast<std::size_t>(j * (nx + 1) + i)];
  };
  std::vector<Cell> cells(static_cast<std::size_t>(nx * ny));
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      Cell& c = cells[static_cast<std::size_t>(j * nx + i)];
      c.id = j * nx + i;
      c.vertices = {V(i, j), V(i + 1, j), V(i + 1, j + 1), V(i, j + 1)};
      c.volume = polygon_area(c.vertices);
      c.centroid = polygon_centroid(c.vertices, c.volume);
    }
  std::vector<Interface> ifaces;
  ifaces.reserve(static_cast<std::size_t>(2 * nx * ny));
  auto add_edge = [&](int left, int right, const Vec2& p, const Vec2& q) {
    Interface s;
    s.id = static_cast<int>(ifaces.size());
    s.left = left;
    s.right = right;
    const Vec2 e = q - p;
    s.area = e.norm();
    s.normal = Vec2(e.y(), -e.x()) / s.area;
    s.midpoint = 0.5 * (p + q);
    cells[static_cast<std::size_t>(left)].interface_ids.push_back(s.id);
    cells[static_cast<std::size_t>(right)].interface_ids.push_back(s.id);
    ifaces.push_back(s);
  };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int k = j * nx + i;
      add_edge(k, j * nx + (i + 1) % nx, V(i + 1, j), V(i + 1, j + 1));
      add_edge(k, ((j + 1) % ny) * nx + i, V(i + 1, j + 1), V(i, j + 1));
    }
  return Mesh(2, std::move(cells), std::move(ifaces), {lx, ly});
}

std::vector<Vec2> grid_vertices(int nx, int ny, double lx, double ly) {
  std::vector<Vec2> v;
  v.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1)));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      v.emplace_back(lx * static_cast<double>(i) / nx, ly * static_cast<double>(j) / ny);
  return v;
}

}  // namespace

Mesh::Mesh(int dim, std::vector<Cell> cells, std::vector<Interface> interfaces,
           std::vector<double> domain)
    : dim_(dim),
      cells_(std::move(cells)),
      interfaces_(std::move(interfaces)),
      domain_(std::move(domain)) {
  for (const Cell& c : cells_) h_ = std::max(h_, diameter(c));
  a_ = regularity_constant(*this);
  Fnv f;
  f.i64(dim_);
  for (double x : domain_) f.f64(x);
  for (const Cell& c : cells_) {
    f.f64(c.volume);
    f.f64(c.centroid.x());
    f.f64(c.centroid.y());
    for (int s : c.interface_ids) f.i64(s);
  }
  for (const Interface& s : interfaces_) {
    f.i64(s.left);
    f.i64(s.right);
    f.f64(s.area);
    f.f64(s.normal.x());
    f.f64(s.normal.y());
  }
  id_ = f.h;
}

int Mesh::neighbor(int k, int s) const {
  const Interface& f = interface(s);
  return f.left == k ? f.right : f.left;
}

Vec2 Mesh::outward_normal(int k, int s) const {
  const Interface& f = interface(s);
  return f.left == k ? f.normal : Vec2(-f.normal);
}

double Mesh::perimeter(int k) const {
  double p = 0.0;
  for (int s : cell(k).interface_ids) p += interface(s).area;
  return p;
}

std::string Mesh::id_hex() const {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << id_;
  return os.str();
}

double Mesh::periodic_distance(const Vec2& x, const Vec2& y) const {
  double d2 = 0.0;
  for (int i = 0; i < dim_; ++i) {
    const double L = domain_[static_cast<std::size_t>(i)];
    double d = std::fmod(std::abs(x[i] - y[i]), L);
    d = std::min(d, L - d);
    d2 += d * d;
  }
  return std::sqrt(d2);
}

Mesh build_uniform_1d(int n_cells, double length) {
  if (n_cells < 3) throw ValidationError("build_uniform_1d: need at least 3 cells");
  if (!(length > 0.0)) throw ValidationError("build_uniform_1d: length must be positive");
  const double dx = length / n_cells;
  std::vector<Cell> cells(static_cast<std::size_t>(n_cells));
  std::vector<Interface> ifaces(static_cast<std::size_t>(n_cells));
  for (int i = 0; i < n_cells; ++i) {
    Cell& c = cells[static_cast<std::size_t>(i)];
    c.id = i;
    const double x0 = length * static_cast<double>(i) / n_cells;
    const double x1 = length * static_cast<double>(i + 1) / n_cells;
    c.vertices = {Vec2(x0, 0.0), Vec2(x1, 0.0)};
    c.volume = dx;
    c.centroid = Vec2(0.5 * (x0 + x1), 0.0);
    c.interface_ids = {(i + n_cells - 1) % n_cells, i};
    Interface& s = ifaces[static_cast<std::size_t>(i)];
    s.id = i;
    s.left = i;
    s.right = (i + 1) % n_cells;
    s.area = 1.0;
    s.normal = Vec2(1.0, 0.0);
    s.midpoint = Vec2(x1, 0.0);
  }
  Mesh m(1, std::move(cells), std::move(ifaces), {length});
  validate_mesh(m);
  return m;
}

Mesh build_uniform_quad_2d(int nx, int ny, double lx, double ly) {
  if (nx < 3 || ny < 3) throw ValidationError("build_uniform_quad_2d: need nx, ny >= 3");
  if (!(lx > 0.0) || !(ly > 0.0))
    throw ValidationError("build_uniform_quad_2d: extents must be positive");
  Mesh m = assemble_quad_grid(nx, ny, lx, ly, grid_vertices(nx, ny, lx, ly));
  validate_mesh(m);
  return m;
}

Mesh build_perturbed_quad_2d(int nx, int ny, double lx, double ly, double jitter,
                             std::uint64_t seed) {
  if (nx < 3 || ny < 3) throw ValidationError("build_perturbed_quad_2d: need nx, ny >= 3");
  if (!(lx > 0.0) || !(ly > 0.0))
    throw ValidationError("build_perturbed_quad_2d: extents must be positive");
  if (!(jitter >= 0.0 && jitter < 0.25))
    throw ValidationError("build_perturbed_quad_2d: jitter must lie in [0, 0.25)");
  std::vector<Vec2> vtx = grid_vertices(nx, ny, lx, ly);
  const double dmax = jitter * std::min(lx / nx, ly / ny);
  std::mt19937_64 rng(seed);
  const double two_pi = 2.0 * std::acos(-1.0);
  for (int j = 1; j < ny; ++j)
    for (int i = 1; i < nx; ++i) {
      const double r = dmax * unit_draw(rng);
      const double th = two_pi * unit_draw(rng);
      vtx[static_cast<std::size_t>(j * (nx + 1) + i)] += Vec2(r * std::cos(th), r * std::sin(th));
    }
  Mesh m = assemble_quad_grid(nx, ny, lx, ly, vtx);
  for (const Cell& c : m.cells())
    if (!cell_is_convex(c))
      throw ValidationError("build_perturbed_quad_2d: cell " + std::to_string(c.id) +
                            " is not convex");
  if (m.a() <= 0.05)
    throw ValidationError("build_perturbed_quad_2d: regularity constant fell to " +
                          std::to_string(m.a()));
  validate_mesh(m);
  return m;
}

double regularity_constant(const Mesh& mesh) {
  const double h = mesh.h();
  if (!(h > 0.0)) return 0.0;
  const double hd = mesh.dim() == 1 ? h : h * h;
  const double hd1 = mesh.dim() == 1 ? 1.0 : h;
  double a = std::numeric_limits<double>::infinity();
  for (const Cell& c : mesh.cells()) {
    a = std::min(a, c.volume / hd);
    a = std::min(a, hd1 / mesh.perimeter(c.id));
  }
  return a;
}

bool cell_is_convex(const Cell& cell) {
  const auto& p = cell.vertices;
  if (p.size() < 3) return true;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Vec2 e0 = p[(i + 1) % p.size()] - p[i];
    const Vec2 e1 = p[(i + 2) % p.size()] - p[(i + 1) % p.size()];
    if (e0.x() * e1.y() - e0.y() * e1.x() <= 0.0) return false;
  }
  return true;
}

void validate_mesh(const Mesh& mesh) {
  auto fail = [](const std::string& what) { throw StructuralError("mesh: " + what); };
  const int nc = static_cast<int>(mesh.num_cells());
  std::vector<int> refs(mesh.num_interfaces(), 0);
  for (const Interface& s : mesh.interfaces()) {
    if (s.left == s.right) fail("interface " + std::to_string(s.id) + " joins a cell to itself");
    if (s.left < 0 || s.right < 0 || s.left >= nc || s.right >= nc)
      fail("interface " + std::to_string(s.id) + " has an invalid cell id");
    if (!(s.area > 0.0)) fail("interface " + std::to_string(s.id) + " has zero area");
    if (std::abs(s.normal.norm() - 1.0) > 1e-14)
      fail("interface " + std::to_string(s.id) + " normal is not unit");
  }
  const double a = mesh.a();
  const double h = mesh.h();
  const double hd = mesh.dim() == 1 ? h : h * h;
  const double hd1 = mesh.dim() == 1 ? 1.0 : h;
  for (const Cell& c : mesh.cells()) {
    if (!(c.volume > 0.0)) fail("cell " + std::to_string(c.id) + " has nonpositive volume");
    if (c.interface_ids.empty()) fail("cell " + std::to_string(c.id) + " has no interfaces");
    Vec2 closure = Vec2::Zero();
    double per = 0.0;
    for (int s : c.interface_ids) {
      const Interface& f = mesh.interface(s);
      if (f.left != c.id && f.right != c.id)
        fail("cell " + std::to_string(c.id) + " lists a foreign interface");
      ++refs[static_cast<std::size_t>(s)];
      closure += f.area * mesh.outward_normal(c.id, s);
      per += f.area;
    }
    if (closure.norm() > 1e-12 * per) fail("cell " + std::to_string(c.id) + " is not closed");
    const double slack = 1e-12;
    if (c.volume < a * hd * (1.0 - slack) || per > hd1 / a * (1.0 + slack))
      fail("cell " + std::to_string(c.id) + " breaks the regularity bound");
  }
  for (std::size_t s = 0; s < refs.size(); ++s)
    if (refs[s] != 2) fail("interface " + std::to_string(s) + " is not shared by exactly two cells");
}

std::vector<QuadraturePoint> cell_quadrature(const Mesh& mesh, int k, QuadratureRule rule,
                                             int subdiv) {
  static const double g = std::sqrt(0.15);
  static const double gx[3] = {0.5 - g, 0.5, 0.5 + g};
  static const double gw[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
  const Cell& c = mesh.cell(k);
  std::vector<QuadraturePoint> out;
  if (subdiv < 1) subdiv = 1;
  if (rule == QuadratureRule::Midpoint && subdiv == 1) {
    out.push_back({c.centroid, c.volume});
    return out;
  }
  const int nq = rule == QuadratureRule::Midpoint ? 1 : 3;
  const double mx[1] = {0.5};
  const double mw[1] = {1.0};
  const double* qx = nq == 1 ? mx : gx;
  const double* qw = nq == 1 ? mw : gw;
  const double step = 1.0 / subdiv;
  if (mesh.dim() == 1) {
    const double x0 = c.vertices[0].x();
    const double len = c.vertices[1].x() - x0;
    for (int s = 0; s < subdiv; ++s)
      for (int q = 0; q < nq; ++q) {
        const double t = (s + qx[q]) * step;
        out.push_back({Vec2(x0 + t * len, 0.0), qw[q] * step * len});
      }
    return out;
  }
  if (c.vertices.size() != 4)
    throw StructuralError("cell_quadrature: only quadrilateral cells are supported in 2D");
  const Vec2& p0 = c.vertices[0];
  const Vec2& p1 = c.vertices[1];
  const Vec2& p2 = c.vertices[2];
  const Vec2& p3 = c.vertices[3];
  for (int sj = 0; sj < subdiv; ++sj)
    for (int si = 0; si < subdiv; ++si)
      for (int qj = 0; qj < nq; ++qj)
        for (int qi = 0; qi < nq; ++qi) {
          const double xi = (si + qx[qi]) * step;
          const double et = (sj + qx[qj]) * step;
          const Vec2 x = (1 - xi) * (1 - et) * p0 + xi * (1 - et) * p1 + xi * et * p2 +
                         (1 - xi) * et * p3;
          const Vec2 dxi = (1 - et) * (p1 - p0) + et * (p2 - p3);
          const Vec2 det = (1 - xi) * (p3 - p0) + xi * (p2 - p1);
          const double J = dxi.x() * det.y() - dxi.y() * det.x();
          out.push_back({x, qw[qi] * qw[qj] * step * step * J});
        }
  return out;
}

std::string to_string(QuadratureRule rule) {
  return rule == QuadratureRule::Midpoint ? "midpoint" : "gauss3";
}

QuadratureRule quadrature_from_string(const std::string& name) {
  if (name == "midpoint") return QuadratureRule::Midpoint;
  if (name == "gauss3") return QuadratureRule::Gauss3;
  throw ValidationError("unknown quadrature rule '" + name + "'");
}

}  // namespace hypflux
