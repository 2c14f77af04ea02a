#include "hypflux/mesh.hpp"

#include <json.hpp>

namespace hypflux {

using nlohmann::json;

namespace {

json point(const Vec2& p, int dim) {
  json a = json::array();
  for (int i = 0; i < dim; ++i) a.push_back(p[i]);
  return a;
}

Vec2 read_point(const json& a, int dim) {
  if (!a.is_array() || static_cast<int>(a.size()) != dim)
    throw ParseError("mesh json: point has wrong arity");
  Vec2 p = Vec2::Zero();
  for (int i = 0; i < dim; ++i) p[i] = a[static_cast<std::size_t>(i)].get<double>();
  return p;
}

}  // namespace

std::string mesh_to_json(const Mesh& mesh) {
  const int d = mesh.dim();
  json j;
  j["dim"] = d;
  j["h"] = mesh.h();
  j["a"] = mesh.a();
  j["domain"] = mesh.domain();
  json cells = json::array();
  for (const Cell& c : mesh.cells()) {
    json v = json::array();
    for (const Vec2& p : c.vertices) v.push_back(point(p, d));
    cells.push_back({{"id", c.id},
                     {"volume", c.volume},
                     {"centroid", point(c.centroid, d)},
                     {"interfaces", c.interface_ids},
                     {"vertices", v}});
  }
  j["cells"] = std::move(cells);
  json ifs = json::array();
  for (const Interface& s : mesh.interfaces())
    ifs.push_back({{"id", s.id},
                   {"left", s.left},
                   {"right", s.right},
                   {"area", s.area},
                   {"normal", point(s.normal, d)},
                   {"midpoint", point(s.midpoint, d)}});
  j["interfaces"] = std::move(ifs);
  return j.dump(1) + "\n";
}

Mesh mesh_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("mesh json: ") + e.what());
  }
  try {
    const int d = j.at("dim").get<int>();
    if (d != 1 && d != 2) throw ParseError("mesh json: dim must be 1 or 2");
    std::vector<Cell> cells;
    for (const json& jc : j.at("cells")) {
      Cell c;
      c.id = jc.at("id").get<int>();
      c.volume = jc.at("volume").get<double>();
      c.centroid = read_point(jc.at("centroid"), d);
      c.interface_ids = jc.at("interfaces").get<std::vector<int>>();
      for (const json& p : jc.at("vertices")) c.vertices.push_back(read_point(p, d));
      if (c.id != static_cast<int>(cells.size())) throw ParseError("mesh json: cell ids out of order");
      cells.push_back(std::move(c));
    }
    std::vector<Interface> ifs;
    for (const json& js : j.at("interfaces")) {
      Interface s;
      s.id = js.at("id").get<int>();
      s.left = js.at("left").get<int>();
      s.right = js.at("right").get<int>();
      s.area = js.at("area").get<double>();
      s.normal = read_point(js.at("normal"), d);
      s.midpoint = read_point(js.at("midpoint"), d);
      if (s.id != static_cast<int>(ifs.size()))
        throw ParseError("mesh json: interface ids out of order");
      ifs.push_back(s);
    }
    Mesh m(d, std::move(cells), std::move(ifs), j.at("domain").get<std::vector<double>>());
    validate_mesh(m);
    return m;
  } catch (const json::exception& e) {
    throw ParseError(std::string("mesh json: ") + e.what());
  }
}

}  // namespace hypflux
