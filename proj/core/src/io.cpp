#include "circlestab/io.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "circlestab/error.hpp"

namespace circlestab {

using json = nlohmann::json;

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

// nlohmann prints the shortest round-trip form; we want fixed 17 digits.
void dump(const json& j, std::string& out, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close(static_cast<std::size_t>(indent * depth), ' ');
  const bool flat = [&] {
    if (!j.is_array()) return false;
    for (const auto& e : j)
      if (e.is_structured()) return false;
    return true;
  }();
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad + json(it.key()).dump() + ": ";
        dump(it.value(), out, indent, depth + 1);
      }
      out += "\n" + close + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      if (flat) {
        out += "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out += ", ";
          dump(j[i], out, indent, depth + 1);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += pad;
        dump(j[i], out, indent, depth + 1);
      }
      out += "\n" + close + "]";
      return;
    }
    case json::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

std::string to_text(const json& j) {
  std::string out;
  dump(j, out, 2, 0);
  out += '\n';
  return out;
}

json parse(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::exception& e) {
    fail(ErrorCode::ParseError, e.what());
  }
}

void only_keys(const json& j, std::initializer_list<const char*> allowed, const char* what) {
  require(j.is_object(), ErrorCode::ParseError, std::string(what) + " must be an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    require(ok.count(it.key()) > 0, ErrorCode::ParseError, std::string("unknown key in ") + what + ": " + it.key());
}

const json& field(const json& j, const char* key, const char* what) {
  auto it = j.find(key);
  require(it != j.end(), ErrorCode::ParseError, std::string(what) + " is missing \"" + key + "\"");
  return *it;
}

template <class T>
T get(const json& j, const char* what) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    fail(ErrorCode::ParseError, std::string("bad ") + what + ": " + e.what());
  }
}

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 read_vec(const json& j, const char* what) {
  const auto v = get<std::vector<double>>(j, what);
  require(v.size() == 3, ErrorCode::ParseError, std::string(what) + " needs three coordinates");
  return {v[0], v[1], v[2]};
}

json tolerances_json(const Tolerances& t) {
  return {{"radius", t.radius}, {"unit", t.unit},         {"separation", t.separation}, {"plane", t.plane},
          {"box", t.box},       {"distance", t.distance}, {"shell", t.shell}};
}

Tolerances read_tolerances(const json& j) {
  only_keys(j, {"radius", "unit", "separation", "plane", "box", "distance", "shell"}, "tolerances");
  Tolerances t;
  auto opt = [&](const char* key, double& slot) {
    if (j.contains(key)) slot = get<double>(j[key], key);
  };
  opt("radius", t.radius);
  opt("unit", t.unit);
  opt("separation", t.separation);
  opt("plane", t.plane);
  opt("box", t.box);
  opt("distance", t.distance);
  opt("shell", t.shell);
  return t;
}

json arc_json(const Arc& arc) {
  json pts = json::array();
  for (const auto& p : arc.polyline) pts.push_back(vec_json(p));
  return {{"t", arc.t}, {"lambda", arc.lambda}, {"eta", arc.eta}, {"target", arc.target}, {"polyline", pts}};
}

Arc arc_from(const json& j) {
  only_keys(j, {"t", "lambda", "eta", "target", "polyline"}, "arc");
  Arc arc;
  arc.t = get<double>(field(j, "t", "arc"), "t");
  arc.lambda = get<double>(field(j, "lambda", "arc"), "lambda");
  arc.eta = get<double>(field(j, "eta", "arc"), "eta");
  arc.target = get<std::size_t>(field(j, "target", "arc"), "target");
  for (const auto& p : field(j, "polyline", "arc")) arc.polyline.push_back(read_vec(p, "polyline point"));
  return arc;
}

json complex_json(const SimplicialComplex& k) { return {{"vertices", k.vertices()}, {"maximal", k.maximal()}}; }

SimplicialComplex complex_from(const json& j) {
  only_keys(j, {"vertices", "maximal"}, "complex");
  std::vector<Vertex> vertices;
  if (j.contains("vertices")) vertices = get<std::vector<Vertex>>(j["vertices"], "vertices");
  auto faces = get<std::vector<Simplex>>(field(j, "maximal", "complex"), "maximal");
  return SimplicialComplex(std::move(faces), std::move(vertices));
}

}  // namespace

std::string write_configuration(const Configuration& cfg) {
  json circles = json::array();
  for (const auto& c : cfg.circles())
    circles.push_back({{"center", vec_json(c.center())}, {"radius", c.radius()}, {"normal", vec_json(c.normal())}});
  json j = {{"circles", circles}};
  if (!(cfg.tolerances() == Tolerances{})) j["tolerances"] = tolerances_json(cfg.tolerances());
  return to_text(j);
}

Configuration read_configuration(std::string_view text) {
  const json j = parse(text);
  only_keys(j, {"circles", "tolerances"}, "configuration");
  const Tolerances tol = j.contains("tolerances") ? read_tolerances(j["tolerances"]) : Tolerances{};
  std::vector<Circle> circles;
  for (const auto& c : field(j, "circles", "configuration")) {
    only_keys(c, {"center", "radius", "normal"}, "circle");
    circles.emplace_back(read_vec(field(c, "center", "circle"), "center"),
                         get<double>(field(c, "radius", "circle"), "radius"),
                         read_vec(field(c, "normal", "circle"), "normal"), tol);
  }
  return Configuration(std::move(circles), tol);
}

std::string write_arc(const Arc& arc) { return to_text(arc_json(arc)); }
Arc read_arc(std::string_view text) { return arc_from(parse(text)); }

std::string write_simplex(const ArcSimplex& simplex) {
  json arr = json::array();
  for (const auto& a : simplex.arcs) arr.push_back(arc_json(a));
  return to_text(arr);
}

ArcSimplex read_simplex(std::string_view text) {
  const json j = parse(text);
  require(j.is_array(), ErrorCode::ParseError, "a simplex file is an array of arcs");
  ArcSimplex s;
  for (const auto& a : j) s.arcs.push_back(arc_from(a));
  return s;
}

std::string write_complex(const SimplicialComplex& complex) { return to_text(complex_json(complex)); }
SimplicialComplex read_complex(std::string_view text) { return complex_from(parse(text)); }

std::string write_semisimplicial(const SemiSimplicialSet& set) {
  json faces = json::object();
  for (std::size_t p = 1; p < set.faces().size(); ++p) faces[std::to_string(p)] = set.faces()[p];
  return to_text({{"cells", set.cells()}, {"faces", faces}});
}

SemiSimplicialSet read_semisimplicial(std::string_view text) {
  const json j = parse(text);
  only_keys(j, {"cells", "faces"}, "semisimplicial set");
  auto cells = get<std::vector<std::vector<std::int64_t>>>(field(j, "cells", "semisimplicial set"), "cells");
  std::vector<std::vector<std::vector<std::size_t>>> faces(cells.size());
  if (j.contains("faces")) {
    const json& f = j["faces"];
    require(f.is_object(), ErrorCode::ParseError, "faces must map degrees to index arrays");
    for (auto it = f.begin(); it != f.end(); ++it) {
      std::size_t p = 0;
      try {
        p = std::stoul(it.key());
      } catch (const std::exception&) {
        fail(ErrorCode::ParseError, "bad face degree: " + it.key());
      }
      require(p >= 1 && p < cells.size(), ErrorCode::ParseError, "face degree out of range: " + it.key());
      faces[p] = get<std::vector<std::vector<std::size_t>>>(it.value(), "faces");
    }
  }
  return SemiSimplicialSet(std::move(cells), std::move(faces));
}

std::string write_presentation(const Presentation& presentation) {
  return to_text({{"generators", presentation.generators}, {"relators", presentation.relators}});
}

Presentation read_presentation(std::string_view text) {
  const json j = parse(text);
  only_keys(j, {"generators", "relators"}, "presentation");
  Presentation p;
  p.generators = get<std::size_t>(field(j, "generators", "presentation"), "generators");
  p.relators = get<std::vector<std::vector<int>>>(field(j, "relators", "presentation"), "relators");
  validate(p);
  return p;
}

std::string write_diagram(const Diagram& diagram) {
  json columns = json::array();
  for (const auto& k : diagram.columns) columns.push_back(complex_json(k));
  json faces = json::object();
  for (std::size_t p = 0; p < diagram.faces.size(); ++p) {
    json maps = json::array();
    for (const auto& m : diagram.faces[p]) {
      json pairs = json::array();
      for (const auto& [from, to] : m) pairs.push_back({from, to});
      maps.push_back(pairs);
    }
    faces[std::to_string(p)] = maps;
  }
  return to_text({{"columns", columns}, {"faces", faces}});
}

Diagram read_diagram(std::string_view text) {
  const json j = parse(text);
  only_keys(j, {"columns", "faces"}, "diagram");
  Diagram d;
  for (const auto& c : field(j, "columns", "diagram")) d.columns.push_back(complex_from(c));
  require(!d.columns.empty(), ErrorCode::ParseError, "a diagram needs at least the augmentation column");
  d.faces.resize(d.columns.size() - 1);
  if (j.contains("faces")) {
    const json& f = j["faces"];
    require(f.is_object(), ErrorCode::ParseError, "faces must map columns to arrays of vertex maps");
    for (auto it = f.begin(); it != f.end(); ++it) {
      std::size_t p = 0;
      try {
        p = std::stoul(it.key());
      } catch (const std::exception&) {
        fail(ErrorCode::ParseError, "bad face column: " + it.key());
      }
      require(p < d.faces.size(), ErrorCode::ParseError, "face column out of range: " + it.key());
      for (const auto& m : it.value()) {
        VertexMap map;
        for (const auto& pair : get<std::vector<std::pair<Vertex, Vertex>>>(m, "vertex map"))
          require(map.emplace(pair.first, pair.second).second, ErrorCode::ParseError,
                  "vertex map repeats a source vertex");
        d.faces[p].push_back(std::move(map));
      }
    }
  }
  validate(d);
  return d;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::ParseError, "cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorCode::InvalidArgument, "cannot write " + path);
  out << content;
  require(out.good(), ErrorCode::InvalidArgument, "failed writing " + path);
}

}  // namespace circlestab
