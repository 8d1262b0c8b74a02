#include "brs/json_io.hpp"

#include <fstream>
#include <sstream>

#include "brs/constructions.hpp"
#include "brs/error.hpp"

namespace brs {

namespace {

Error bad(const std::string& what) { return Error(Errc::parse_error, what); }

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw bad(std::string("missing field '") + key + "'");
  return j.at(key);
}

const Json& array_field(const Json& j, const char* key) {
  const Json& a = field(j, key);
  if (!a.is_array()) throw bad(std::string("field '") + key + "' must be an array");
  return a;
}

Json vectors_to_json(const std::vector<ModuleVector>& vs) {
  Json a = Json::array();
  for (const auto& v : vs) a.push_back(to_json(v));
  return a;
}

std::vector<ModuleVector> vectors_from_json(const Json& a) {
  if (!a.is_array()) throw bad("expected an array of module vectors");
  std::vector<ModuleVector> out;
  for (const auto& v : a) out.push_back(vector_from_json(v));
  return out;
}

Json recipe_to_json(const CylinderRecipe& r) {
  Json levels = Json::array();
  for (const auto& l : r.levels) levels.push_back({{"prism", l.prism}, {"q", l.q}, {"p", l.p}});
  return {{"base_q", r.base_q},
          {"base_p", r.base_p},
          {"start_q", to_json(r.start_q)},
          {"start_p", to_json(r.start_p)},
          {"levels", levels}};
}

CylinderRecipe recipe_from_json(const Json& j) {
  CylinderRecipe r;
  r.base_q = field(j, "base_q").get<long>();
  r.base_p = field(j, "base_p").get<long>();
  r.start_q = rational_from_json(field(j, "start_q"));
  r.start_p = rational_from_json(field(j, "start_p"));
  for (const auto& l : array_field(j, "levels"))
    r.levels.push_back({field(l, "prism").get<bool>(), field(l, "q").get<long>(),
                        field(l, "p").get<std::vector<long>>()});
  return r;
}

Json parallelepiped_json(const char* kind, const ModuleVector& base, const std::vector<ModuleVector>& gens) {
  return {{"kind", kind}, {"base", to_json(base)}, {"gens", vectors_to_json(gens)}};
}

}  // namespace

Json to_json(const Rational& q) { return to_string(q); }
Json to_json(const ScalarModule& s) { return format_scalar(s); }

Json to_json(const ModuleVector& v) {
  Json m = Json::array();
  for (const auto& x : v.m()) m.push_back(to_string(x));
  return {{"r", to_string(v.r())}, {"m", m}};
}

Rational rational_from_json(const Json& j) {
  if (j.is_number_integer()) return Rational(Integer(std::to_string(j.get<long long>())));
  if (j.is_string()) return parse_rational(j.get<std::string>());
  throw bad("rationals are \"p/q\" strings or integers, got " + j.dump());
}

ScalarModule scalar_from_json(const Json& j, int d) {
  if (j.is_string()) return parse_scalar(j.get<std::string>(), d);
  if (j.is_number_integer()) return ScalarModule::constant(d, rational_from_json(j));
  throw bad("expected a module scalar string, got " + j.dump());
}

ModuleVector vector_from_json(const Json& j) {
  std::vector<Rational> m;
  for (const auto& x : array_field(j, "m")) m.push_back(rational_from_json(x));
  return ModuleVector(rational_from_json(field(j, "r")), std::move(m));
}

Json to_json(const Certificate& c) {
  Json params = Json::object();
  for (const auto& [k, v] : c.params) params[k] = v;
  return {{"theorem", c.theorem}, {"params", params}};
}

Json shape_to_json(const SetDescription& s) {
  Json j = std::visit(
      [](const auto& x) -> Json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, IntervalUnion1D>) {
          Json iv = Json::array();
          for (const auto& i : x.intervals) iv.push_back({to_json(i.a), to_json(i.b)});
          return {{"kind", "interval_union"}, {"intervals", iv}};
        } else if constexpr (std::is_same_v<T, Polygon2D>) {
          return {{"kind", "polygon"}, {"vertices", vectors_to_json(x.vertices)}};
        } else if constexpr (std::is_same_v<T, Parallelepiped>) {
          return parallelepiped_json("parallelepiped", x.base, x.gens);
        } else if constexpr (std::is_same_v<T, Zonotope>) {
          return parallelepiped_json("zonotope", x.base, x.gens);
        } else if constexpr (std::is_same_v<T, Polyhedron3D>) {
          return {{"kind", "polyhedron"}, {"vertices", vectors_to_json(x.vertices)}, {"faces", x.faces}};
        } else if constexpr (std::is_same_v<T, RealParallelepiped>) {
          Json out = {{"kind", "real_parallelepiped"}, {"base", x.base}, {"gens", x.gens}};
          if (x.recipe) out["recipe"] = recipe_to_json(*x.recipe);
          return out;
        } else if constexpr (std::is_same_v<T, FramedPolygon>) {
          Json region = Json::array();
          for (const auto& [a, b] : x.region) region.push_back({to_json(a), to_json(b)});
          return {{"kind", "framed_polygon"},
                  {"frame", parallelepiped_json("parallelepiped", x.frame.base, x.frame.gens)},
                  {"j", x.j},
                  {"k", x.k},
                  {"region", region}};
        } else {
          Json members = Json::array();
          for (const auto& m : x.members) members.push_back(shape_to_json(m));
          return {{"kind", "disjoint_union"}, {"members", members}};
        }
      },
      s.shape);
  if (s.certificate) j["certificate"] = to_json(*s.certificate);
  return j;
}

SetDescription shape_from_json(const Json& j) {
  const std::string kind = field(j, "kind").get<std::string>();
  SetDescription s;
  if (kind == "interval_union") {
    IntervalUnion1D u;
    for (const auto& iv : array_field(j, "intervals")) {
      if (!iv.is_array() || iv.size() != 2) throw bad("an interval is a pair [a, b]");
      u.intervals.push_back({scalar_from_json(iv[0], 1), scalar_from_json(iv[1], 1)});
    }
    s = SetDescription(std::move(u));
  } else if (kind == "polygon") {
    s = SetDescription(Polygon2D{vectors_from_json(field(j, "vertices"))});
  } else if (kind == "parallelepiped") {
    s = SetDescription(Parallelepiped{vector_from_json(field(j, "base")), vectors_from_json(field(j, "gens"))});
  } else if (kind == "zonotope") {
    s = SetDescription(Zonotope{vector_from_json(field(j, "base")), vectors_from_json(field(j, "gens"))});
  } else if (kind == "polyhedron") {
    s = SetDescription(Polyhedron3D{vectors_from_json(field(j, "vertices")),
                                    field(j, "faces").get<std::vector<std::vector<int>>>()});
  } else if (kind == "real_parallelepiped") {
    RealParallelepiped p{field(j, "base").get<std::vector<double>>(),
                         field(j, "gens").get<std::vector<std::vector<double>>>(), std::nullopt};
    if (j.contains("recipe")) p.recipe = recipe_from_json(j.at("recipe"));
    s = SetDescription(std::move(p));
  } else if (kind == "framed_polygon") {
    const Json& f = field(j, "frame");
    FramedPolygon p;
    p.frame = Parallelepiped{vector_from_json(field(f, "base")), vectors_from_json(field(f, "gens"))};
    p.j = field(j, "j").get<int>();
    p.k = field(j, "k").get<int>();
    for (const auto& pt : array_field(j, "region")) {
      if (!pt.is_array() || pt.size() != 2) throw bad("a region vertex is a pair [a, b]");
      p.region.emplace_back(rational_from_json(pt[0]), rational_from_json(pt[1]));
    }
    s = SetDescription(std::move(p));
  } else if (kind == "disjoint_union") {
    DisjointUnion u;
    for (const auto& m : array_field(j, "members")) u.members.push_back(shape_from_json(m));
    s = SetDescription(std::move(u));
  } else {
    throw bad("unknown set kind '" + kind + "'");
  }
  if (j.contains("certificate")) {
    const Json& c = j.at("certificate");
    Certificate cert{field(c, "theorem").get<std::string>(), {}};
    if (c.contains("params"))
      for (const auto& [k, v] : c.at("params").items())
        cert.params.emplace_back(k, v.is_string() ? v.get<std::string>() : v.dump());
    s.certificate = std::move(cert);
  }
  return s;
}

Json set_document(const SetDescription& s, const AlphaContext& ctx) {
  return {{"schema", kSchema}, {"alpha", ctx.descriptor()}, {"set", shape_to_json(s)}};
}

SetDocument parse_set_document(const Json& j, const AlphaContext& fallback) {
  if (j.contains("schema") && j.at("schema") != kSchema)
    throw bad("unsupported schema " + j.at("schema").dump());
  const Json& shape = j.contains("set") ? j.at("set") : j;
  SetDocument doc{shape_from_json(shape), fallback};
  if (j.contains("alpha")) doc.ctx = AlphaContext::parse(j.at("alpha").get<std::string>());
  if (doc.set.dim() != doc.ctx.d)
    throw Error(Errc::dimension_mismatch, "set has dimension " + std::to_string(doc.set.dim()) + " but alpha has " +
                                              std::to_string(doc.ctx.d));
  return doc;
}

Json to_json(const DiscrepancyReport& r) {
  Json series = Json::array();
  for (size_t i = 0; i < r.max_abs.size(); ++i)
    series.push_back({{"start_index", i}, {"start", r.start_points[i]}, {"max_abs", r.max_abs[i]}});
  return {{"schema", kSchema},   {"set_id", r.set_id},           {"checkpoints", r.checkpoints},
          {"series", series},    {"resampled", r.resampled},     {"verdict_diagnostic", to_string(r.verdict)}};
}

Json to_json(const HadwigerReport& r) {
  Json entries = Json::array();
  for (const auto& e : r.entries) {
    Json dirs = Json::array();
    for (const auto& v : e.representative.directions) dirs.push_back(to_json(v));
    entries.push_back({{"rank", e.representative.k},
                       {"base", to_json(e.representative.base)},
                       {"directions", dirs},
                       {"orientations", e.representative.orientations},
                       {"q", to_json(e.q)},
                       {"reference", to_json(e.reference)},
                       {"ref_magnitude", e.ref_magnitude}});
  }
  return {{"schema", kSchema}, {"all_zero", r.all_zero}, {"entries", entries}};
}

Json to_json(const Verdict& v) {
  Json j = {{"schema", kSchema}, {"verdict", to_string(v.kind)}};
  if (v.kind == VerdictKind::brs) {
    if (v.rule == "certificate") j["certificate"] = v.detail;
    else if (v.rule == "convex-polygon") j["certificate"] = cert::kConvexPolygon;
    else if (v.rule == "oren") j["certificate"] = cert::kOren;
    else j["certificate"] = v.rule;
  }
  j["rule"] = v.rule;
  j["detail"] = v.detail;
  if (v.diagnostic) j["diagnostic"] = to_string(*v.diagnostic);
  return j;
}

Json to_json(const std::vector<DecompositionPiece>& pieces) {
  Json a = Json::array();
  for (const auto& p : pieces) a.push_back({{"piece", shape_to_json(p.piece)}, {"shift", to_json(p.shift)}});
  return a;
}

std::vector<DecompositionPiece> pieces_from_json(const Json& j) {
  const Json& a = j.is_object() ? field(j, "pieces") : j;
  if (!a.is_array()) throw bad("pieces must be an array");
  std::vector<DecompositionPiece> out;
  for (const auto& p : a) out.push_back({shape_from_json(field(p, "piece")), vector_from_json(field(p, "shift"))});
  return out;
}

Json to_json(const ModuleMap& m) {
  Json u = Json::array();
  for (const auto& row : m.u_matrix()) {
    Json r = Json::array();
    for (const auto& x : row) r.push_back(to_string(x));
    u.push_back(r);
  }
  return {{"U", u}, {"det_u", to_string(m.det_u)}, {"beta", m.beta_context.descriptor()}, {"equivalence", is_equivalence(m)}};
}

Matrix<Integer> u_matrix_from_json(const Json& j) {
  const Json& a = j.is_object() ? field(j, "U") : j;
  if (!a.is_array()) throw bad("U must be an array of rows");
  Matrix<Integer> u;
  for (const auto& row : a) {
    if (!row.is_array()) throw bad("U must be an array of rows");
    std::vector<Integer> r;
    for (const auto& x : row) {
      if (x.is_number_integer()) r.emplace_back(std::to_string(x.get<long long>()));
      else if (x.is_string()) {
        Rational q = parse_rational(x.get<std::string>());
        if (!is_integer(q)) throw bad("U entries must be integers");
        r.push_back(q.get_num());
      } else {
        throw bad("U entries must be integers");
      }
    }
    u.push_back(std::move(r));
  }
  return u;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw bad("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw bad(path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw bad("cannot write " + path);
  out << text;
}

std::string discrepancy_csv(const DiscrepancyReport& r) {
  std::ostringstream os;
  os.precision(17);
  os << "start_index,checkpoint,max_abs\n";
  for (size_t i = 0; i < r.max_abs.size(); ++i)
    for (size_t c = 0; c < r.checkpoints.size(); ++c) os << i << ',' << r.checkpoints[c] << ',' << r.max_abs[i][c] << '\n';
  return os.str();
}

}  // namespace brs
