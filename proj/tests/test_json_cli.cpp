#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "brs/constructions.hpp"
#include "brs/error.hpp"
#include "brs/json_io.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace brs;
namespace fs = std::filesystem;

namespace {

ModuleVector iv(std::vector<long> m, long r = 0) { return ModuleVector::integer(m, r); }

SetDescription round_trip(const SetDescription& s) {
  return shape_from_json(Json::parse(shape_to_json(s).dump()));
}

struct Run {
  int status = -1;
  std::string out;
};

// Runs the CLI through the shell; stderr is discarded.
Run cli(const std::string& args) {
  const char* exe = std::getenv("BRS_CLI");
  REQUIRE_MESSAGE(exe != nullptr, "BRS_CLI must point at the brs executable");
  Run r;
  FILE* p = popen((std::string(exe) + " " + args + " 2>/dev/null").c_str(), "r");
  REQUIRE(p != nullptr);
  std::array<char, 4096> buf;
  size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int st = pclose(p);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / ("brs_cli_" + std::to_string(getpid()))) { fs::create_directories(path); }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("scalar and vector encodings") {
  CHECK(to_json(Rational(-3, 4)) == "-3/4");
  CHECK(rational_from_json(Json(7)) == 7);
  CHECK(rational_from_json(Json("-6/8")) == Rational(-3, 4));
  CHECK_THROWS_AS(rational_from_json(Json(0.5)), Error);
  ModuleVector v(Rational(1, 3), {Rational(-1, 2), 5});
  Json j = to_json(v);
  CHECK(j["r"] == "1/3");
  CHECK(j["m"][0] == "-1/2");
  CHECK(vector_from_json(j) == v);
  ScalarModule s(Rational(1, 2), {Rational(-2, 3), 0});
  CHECK(scalar_from_json(to_json(s), 2) == s);
  CHECK(scalar_from_json(Json("0/1+1a1"), 1) == ScalarModule::alpha(1, 0));
}

TEST_CASE("property: every set kind round-trips exactly") {
  auto c1 = AlphaContext::preset("sqrt2");
  auto c2 = AlphaContext::preset("sqrt2_sqrt3");
  auto c3 = AlphaContext::preset("sqrt2_sqrt3_sqrt5");
  std::vector<SetDescription> sets{
      hecke_interval(ScalarModule(2, {-1}), c1),
      module_parallelepiped(ModuleVector(Rational(1, 3), {Rational(1, 2), 0}), {ModuleVector::alpha(2), iv({1, 2})}, c2),
      lattice_zonotope(ModuleVector(2), {ModuleVector::alpha(2), iv({1, 0}), iv({0, 1})}, c2),
      measure_parallelepiped(ScalarModule(0, {1, 1, -1}), c3),
      szusz_parallelogram(iv({0, 1}, 1), 1, 0, c2),
      SetDescription(Polygon2D{{iv({0, 0}), iv({1, 0}), iv({0, 1}, 1)}}),
      SetDescription(Polyhedron3D{{iv({0, 0, 0}), iv({1, 0, 0}), iv({0, 1, 0}), iv({0, 0, 1})},
                                  {{0, 2, 1}, {0, 1, 3}, {0, 3, 2}, {1, 2, 3}}}),
  };
  auto sh = shear_decompose(Parallelepiped{ModuleVector(3), {iv({1, 0, 0}), iv({0, 1, 0}, 1), iv({0, 0, 1})}}, 0, 1,
                            Rational(3, 2), c3);
  sets.push_back(sh.pieces.front().piece);
  DisjointUnion u;
  u.members = {sets[1], sets[2]};
  sets.push_back(SetDescription(u));

  std::mt19937_64 rng(9);
  for (int i = 0; i < 20;) {
    auto g = brs_test::rand_lattice(rng, 2, 9);
    if (cross(g, ModuleVector::alpha(2)).is_zero()) continue;
    sets.push_back(module_parallelepiped(brs_test::rand_module(rng, 2, 50, 97), {g, ModuleVector::alpha(2, 3)}, c2));
    ++i;
  }

  for (const auto& s : sets) {
    auto back = round_trip(s);
    CHECK(back.kind() == s.kind());
    CHECK(back.certificate.has_value() == s.certificate.has_value());
    CHECK(shape_to_json(back) == shape_to_json(s));
  }
  // Exact coefficients, checked on the typed values.
  auto back = round_trip(sets[1]);
  CHECK(std::get<Parallelepiped>(back.shape).base == std::get<Parallelepiped>(sets[1].shape).base);
  CHECK(std::get<Parallelepiped>(back.shape).gens == std::get<Parallelepiped>(sets[1].shape).gens);
  auto fp = round_trip(sets[7]);
  CHECK(std::get<FramedPolygon>(fp.shape).region == std::get<FramedPolygon>(sets[7].shape).region);
  CHECK(volume_symbolic(fp, c3) == volume_symbolic(sets[7], c3));
}

TEST_CASE("set documents carry schema and alpha") {
  auto c2 = AlphaContext::preset("sqrt2_sqrt3");
  auto s = module_parallelepiped(ModuleVector(2), {ModuleVector::alpha(2), iv({0, 1})}, c2);
  Json doc = set_document(s, c2);
  CHECK(doc["schema"] == "brs/1");
  CHECK(doc["alpha"] == "preset:sqrt2_sqrt3");
  auto parsed = parse_set_document(doc, AlphaContext::standard(1));
  CHECK(parsed.ctx.preset_id == c2.preset_id);
  CHECK(shape_to_json(parsed.set) == shape_to_json(s));
  doc["schema"] = "brs/0";
  CHECK_THROWS_AS(parse_set_document(doc, c2), Error);
  CHECK_THROWS_AS(parse_set_document(Json{{"set", {{"kind", "blob"}}}}, c2), Error);
  // A bare 1D shape against a 2D fallback context.
  CHECK_THROWS_AS(parse_set_document(shape_to_json(hecke_interval(ScalarModule(1, {1}), AlphaContext::standard(1))), c2),
                  Error);
}

TEST_CASE("U matrices and pieces parse") {
  auto u = u_matrix_from_json(Json::parse(R"({"U": [[1, "2"], ["-3/1", 4]]})"));
  CHECK(u[0][1] == 2);
  CHECK(u[1][0] == -3);
  CHECK_THROWS_AS(u_matrix_from_json(Json::parse(R"([[1, "1/2"], [0, 1]])")), Error);
  std::vector<DecompositionPiece> ps{{SetDescription(IntervalUnion1D{{{ScalarModule(1), ScalarModule(Rational(1, 2), {0})}}}),
                                      ModuleVector(1, {-1})}};
  auto back = pieces_from_json(to_json(ps));
  REQUIRE(back.size() == 1);
  CHECK(back[0].shift == ps[0].shift);
}

TEST_CASE("discrepancy CSV layout") {
  DiscrepancyReport r;
  r.checkpoints = {10, 100};
  r.max_abs = {{0.5, 0.75}, {1, 1}};
  r.start_points = {{0.1}, {0.2}};
  CHECK(discrepancy_csv(r) == "start_index,checkpoint,max_abs\n0,10,0.5\n0,100,0.75\n1,10,1\n1,100,1\n");
}

TEST_CASE("cli: construct, verdict, discrepancy") {
  TempDir tmp;
  auto r = cli("construct hecke --beta \"0/1+1a1\" --alpha preset:sqrt2");
  REQUIRE(r.status == 0);
  Json doc = Json::parse(r.out);
  CHECK(doc["schema"] == "brs/1");
  CHECK(doc["set"]["certificate"]["theorem"] == cert::kHecke);
  auto s = parse_set_document(doc, AlphaContext::standard(1));
  CHECK(volume_symbolic(s.set, s.ctx) == ScalarModule::alpha(1, 0));

  // Hexagon spanned by e1, alpha, e2.
  {
    std::ofstream f(tmp / "hexagon.json");
    f << R"({"schema":"brs/1","alpha":"preset:sqrt2_sqrt3","set":{"kind":"polygon","vertices":[
      {"r":"0","m":["0","0"]},{"r":"0","m":["1","0"]},{"r":"1","m":["1","0"]},
      {"r":"1","m":["1","1"]},{"r":"1","m":["0","1"]},{"r":"0","m":["0","1"]}]}})";
  }
  r = cli("verdict --set " + tmp / "hexagon.json");
  REQUIRE(r.status == 0);
  Json v = Json::parse(r.out);
  CHECK(v["verdict"] == "BRS");
  CHECK(v["certificate"] == cert::kConvexPolygon);

  REQUIRE(cli("construct parallelepiped --gens '[{\"r\":\"1\",\"m\":[\"0\",\"0\"]},{\"r\":\"0\",\"m\":[\"0\",\"1\"]}]' --out " +
              tmp / "strip.json")
              .status == 0);
  r = cli("discrepancy --set " + tmp / "strip.json" + " --n 1e5 --starts 12 --out " + tmp / "d.csv");
  REQUIRE(r.status == 0);
  CHECK(Json::parse(r.out)["verdict_diagnostic"] == "no-growth");
  const std::string csv = slurp(tmp / "d.csv");
  CHECK(csv.rfind("start_index,checkpoint,max_abs\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 12 * 3);
}

TEST_CASE("cli: determinism under --seed") {
  TempDir tmp;
  REQUIRE(cli("construct measure --gamma \"1 + 1*a1 - 1*a2\" --out " + tmp / "m.json").status == 0);
  auto a = cli("--seed 4 discrepancy --set " + tmp / "m.json" + " --n 20000 --starts 9 --out " + tmp / "a.csv");
  auto b = cli("discrepancy --set " + tmp / "m.json" + " --n 20000 --starts 9 --seed 4 --threads 1 --out " + tmp / "b.csv");
  REQUIRE(a.status == 0);
  REQUIRE(b.status == 0);
  CHECK(slurp(tmp / "a.csv") == slurp(tmp / "b.csv"));
  CHECK(a.out == b.out);
  auto c = cli("--seed 5 discrepancy --set " + tmp / "m.json" + " --n 20000 --starts 9 --out " + tmp / "c.csv");
  CHECK(slurp(tmp / "a.csv") != slurp(tmp / "c.csv"));
}

TEST_CASE("cli: decompose, invariants, transfer, map") {
  TempDir tmp;
  {
    std::ofstream(tmp / "a.json") << R"({"alpha":"preset:sqrt2","set":{"kind":"interval_union","intervals":[["0","1*a1"]]}})";
    std::ofstream(tmp / "b.json")
        << R"({"alpha":"preset:sqrt2","set":{"kind":"interval_union","intervals":[["1/3","1/2"],["3/2","4/3 + 1*a1"]]}})";
  }
  auto r = cli("decompose --from " + tmp / "a.json" + " --to " + tmp / "b.json" + " --out " + tmp / "p.json");
  REQUIRE(r.status == 0);
  Json pj = read_json_file(tmp / "p.json");
  CHECK(pj["verified"] == true);
  auto c1 = AlphaContext::preset("sqrt2");
  auto A = parse_set_document(read_json_file(tmp / "a.json"), c1);
  auto B = parse_set_document(read_json_file(tmp / "b.json"), c1);
  CHECK(verify_decomposition(A.set, B.set, pieces_from_json(pj), c1).ok);

  r = cli("invariants --set " + tmp / "b.json");
  REQUIRE(r.status == 0);
  Json inv = Json::parse(r.out);
  CHECK(inv["all_zero"] == true);
  CHECK(inv["oren"] == true);

  REQUIRE(cli("construct parallelepiped --gens '[{\"r\":\"1\",\"m\":[\"0\",\"0\"]},{\"r\":\"0\",\"m\":[\"1\",\"2\"]}]' --out " +
              tmp / "P.json")
              .status == 0);
  r = cli("transfer --set " + tmp / "P.json" + " --check cohomology --samples 2000");
  REQUIRE(r.status == 0);
  CHECK(Json::parse(r.out)["residual"].get<double>() < 1e-8);

  std::ofstream(tmp / "U.json") << R"({"U": [[1, 1, 0], [0, 1, 0], [0, 0, 1]]})";
  r = cli("map --matrix " + tmp / "U.json" + " --set " + tmp / "P.json");
  REQUIRE(r.status == 0);
  Json img = Json::parse(r.out);
  CHECK(img["map"]["det_u"] == "1");
  CHECK(img["set"]["certificate"]["theorem"] == cert::kLinearImage);
  // (m, n) -> (Am + pn, <q,m> + rn) with A = [[1,1],[0,1]]: e1 + 2 e2 -> 3 e1 + 2 e2.
  CHECK(img["set"]["gens"][1]["m"] == Json::array({"3/1", "2/1"}));
}

TEST_CASE("cli: exit codes") {
  TempDir tmp;
  CHECK(cli("").status == 2);
  CHECK(cli("frobnicate").status == 2);
  CHECK(cli("verdict").status == 2);  // missing --set
  CHECK(cli("discrepancy --set x.json --n abc").status != 0);
  CHECK(cli("construct hecke --beta \"1/2\" --alpha preset:sqrt2").status == 1);  // Kesten obstruction
  CHECK(cli("verdict --set " + tmp / "missing.json").status == 1);
  std::ofstream(tmp / "U0.json") << R"({"U": [[1, 1, 0], [1, 1, 0], [0, 0, 1]]})";
  std::ofstream(tmp / "P.json") << R"({"alpha":"preset:sqrt2_sqrt3","set":{"kind":"parallelepiped",
      "base":{"r":"0","m":["0","0"]},"gens":[{"r":"1","m":["0","0"]},{"r":"0","m":["0","1"]}]}})";
  CHECK(cli("map --matrix " + tmp / "U0.json" + " --set " + tmp / "P.json").status == 1);
  CHECK(cli("--help").status == 0);
}
