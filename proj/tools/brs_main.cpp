#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "brs/acceptance.hpp"
#include "brs/constructions.hpp"
#include "brs/error.hpp"
#include "brs/json_io.hpp"
#include "brs/transfer.hpp"

using namespace brs;

namespace {

struct Globals {
  unsigned long long seed = 0;
  int threads = 0;
  std::string config;
  std::string alpha;
  std::string out;
};

DiagnosticConfig load_config(const Globals& g) {
  if (!g.config.empty()) return DiagnosticConfig::load(g.config);
  if (std::filesystem::exists(BRS_DEFAULT_CONFIG)) return DiagnosticConfig::load(BRS_DEFAULT_CONFIG);
  return DiagnosticConfig{};
}

// --alpha wins over the document's alpha, which wins over the default preset.
SetDocument load_set(const std::string& path, const Globals& g) {
  Json j = read_json_file(path);
  SetDescription s = shape_from_json(j.contains("set") ? j.at("set") : j);
  AlphaContext ctx;
  if (!g.alpha.empty()) ctx = AlphaContext::parse(g.alpha);
  else if (j.contains("alpha")) ctx = AlphaContext::parse(j.at("alpha").get<std::string>());
  else ctx = AlphaContext::standard(s.dim());
  if (j.contains("schema") && j.at("schema") != kSchema) throw Error(Errc::parse_error, "unsupported schema");
  if (s.dim() != ctx.d) throw Error(Errc::dimension_mismatch, "set and alpha dimensions differ");
  return {std::move(s), std::move(ctx)};
}

AlphaContext context_for(const Globals& g, int d) {
  AlphaContext ctx = g.alpha.empty() ? AlphaContext::standard(d) : AlphaContext::parse(g.alpha);
  if (ctx.d != d) throw Error(Errc::dimension_mismatch, "alpha has dimension " + std::to_string(ctx.d) +
                                                            ", the request needs " + std::to_string(d));
  return ctx;
}

void emit(const Globals& g, const Json& j) {
  const std::string text = j.dump(2) + "\n";
  if (g.out.empty()) std::cout << text;
  else write_text_file(g.out, text);
}

long parse_count(const std::string& s) {
  // Accepts "100000" as well as "1e5".
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || v < 1 || v != std::floor(v) || v > 1e15)
    throw CLI::ValidationError("count", "expected a positive integer, got '" + s + "'");
  return static_cast<long>(v);
}

// ---------------------------------------------------------------- construct

struct ConstructArgs {
  std::string family, beta, gamma, base, gens, shear, v;
  long sigma_q = 0, sigma_p = 0;
  int dim = 0;
};

std::vector<std::vector<Rational>> rational_rows(const Json& j) {
  std::vector<std::vector<Rational>> rows;
  for (const auto& r : j) {
    std::vector<Rational> row;
    for (const auto& x : r) row.push_back(rational_from_json(x));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<ModuleVector> vectors_arg(const std::string& text, const char* name) {
  if (text.empty()) throw CLI::ValidationError(name, "required for this family");
  Json j = Json::parse(text);
  std::vector<ModuleVector> out;
  for (const auto& v : j) out.push_back(vector_from_json(v));
  if (out.empty()) throw CLI::ValidationError(name, "needs at least one vector");
  return out;
}

// Empty text gives the origin.
ModuleVector vector_arg(const std::string& text, int d) {
  if (text.empty()) return ModuleVector(d);
  return vector_from_json(Json::parse(text));
}

int run_construct(const Globals& g, const ConstructArgs& a) {
  SetDescription s;
  AlphaContext ctx;
  if (a.family == "hecke") {
    if (a.beta.empty()) throw CLI::ValidationError("--beta", "required for hecke");
    ctx = context_for(g, 1);
    s = hecke_interval(parse_scalar(a.beta, 1), ctx);
  } else if (a.family == "measure") {
    if (a.gamma.empty()) throw CLI::ValidationError("--gamma", "required for measure");
    const int d = a.dim > 0 ? a.dim : (g.alpha.empty() ? 2 : AlphaContext::parse(g.alpha).d);
    ctx = context_for(g, d);
    s = measure_parallelepiped(parse_scalar(a.gamma, d), ctx);
  } else if (a.family == "szusz") {
    const ModuleVector v = vector_arg(a.v, 2);
    ctx = context_for(g, 2);
    s = szusz_parallelogram(v, a.sigma_q, a.sigma_p, ctx);
  } else {
    const auto gens = vectors_arg(a.gens, "--gens");
    const int d = gens.front().dim();
    ctx = context_for(g, d);
    const ModuleVector base = vector_arg(a.base, d);
    if (a.family == "parallelepiped") s = module_parallelepiped(base, gens, ctx);
    else if (a.family == "zonotope") s = lattice_zonotope(base, gens, ctx);
    else if (a.family == "sheared") {
      if (a.shear.empty()) throw CLI::ValidationError("--shear", "required for sheared");
      s = sheared_parallelepiped(gens, rational_rows(Json::parse(a.shear)), ctx);
      if (!a.base.empty()) s = translate(s, base, ctx);
    } else {
      throw CLI::ValidationError("family", "unknown family '" + a.family + "'");
    }
  }
  emit(g, set_document(s, ctx));
  return 0;
}

// ---------------------------------------------------------------- verdict / discrepancy

struct SweepArgs {
  std::string set, n = "100000", csv;
  int starts = 50;
  bool no_diagnostic = false;
};

ReportOptions sweep_options(const Globals& g, const SweepArgs& a) {
  ReportOptions opt;
  opt.starts = a.starts;
  opt.N = parse_count(a.n);
  opt.seed = g.seed;
  opt.threads = g.threads;
  opt.config = load_config(g);
  return opt;
}

int run_verdict(const Globals& g, const SweepArgs& a) {
  auto doc = load_set(a.set, g);
  VerdictOptions vo;
  vo.run_diagnostic = !a.no_diagnostic;
  vo.report = sweep_options(g, a);
  emit(g, to_json(brs_verdict(doc.set, doc.ctx, vo)));
  return 0;
}

int run_discrepancy(const Globals& g, const SweepArgs& a) {
  auto doc = load_set(a.set, g);
  auto opt = sweep_options(g, a);
  auto r = discrepancy_report(doc.set, doc.ctx, opt);
  const std::string csv = discrepancy_csv(r);
  Json summary = {{"schema", kSchema},
                  {"set", doc.set.kind()},
                  {"starts", opt.starts},
                  {"N", opt.N},
                  {"checkpoints", r.checkpoints},
                  {"verdict_diagnostic", to_string(r.verdict)}};
  double worst = 0;
  for (const auto& row : r.max_abs) worst = std::max(worst, row.back());
  summary["max_abs"] = worst;
  if (g.out.empty()) {
    std::cout << csv;
    std::cerr << summary.dump() << "\n";
  } else {
    write_text_file(g.out, csv);
    std::cout << summary.dump(2) << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------- invariants

int run_invariants(const Globals& g, const std::string& path, int rank) {
  auto doc = load_set(path, g);
  Json j;
  if (auto* poly = std::get_if<Polyhedron3D>(&doc.set.shape)) {
    auto sym = symmetry_tests(*poly);
    j = {{"schema", kSchema}, {"central_symmetric", sym.central_symmetric}, {"faces_symmetric", sym.faces_symmetric}};
    if (sym.zonohedron_brs) j["zonohedron_brs"] = *sym.zonohedron_brs;
  } else {
    j = to_json(hadwiger(doc.set, doc.ctx, rank));
    if (auto* u = std::get_if<IntervalUnion1D>(&doc.set.shape)) j["oren"] = oren_test(*u).brs;
    if (auto poly = as_polygon(doc.set, doc.ctx); poly && doc.ctx.d == 2 && is_convex_ccw(*poly, doc.ctx)) {
      auto r = convex_polygon_test(*poly, doc.ctx);
      j["convex_polygon"] = {{"brs", r.brs}, {"centrally_symmetric", r.centrally_symmetric}, {"failure", r.failure}};
    }
  }
  emit(g, j);
  return 0;
}

// ---------------------------------------------------------------- decompose

// B equals A with v_k replaced by v_k + s*v_j.
std::optional<std::tuple<int, int, Rational>> shear_between(const Parallelepiped& a, const Parallelepiped& b) {
  if (a.base != b.base || a.gens.size() != b.gens.size()) return std::nullopt;
  int k = -1;
  for (size_t i = 0; i < a.gens.size(); ++i) {
    if (a.gens[i] == b.gens[i]) continue;
    if (k >= 0) return std::nullopt;
    k = static_cast<int>(i);
  }
  if (k < 0) return std::nullopt;
  const ModuleVector diff = b.gens[k] - a.gens[k];
  for (int j = 0; j < static_cast<int>(a.gens.size()); ++j) {
    if (j == k) continue;
    const ModuleVector& v = a.gens[j];
    std::optional<Rational> s;
    if (v.r() != 0) s = diff.r() / v.r();
    for (int i = 0; i < v.dim() && !s; ++i)
      if (v.m(i) != 0) s = diff.m(i) / v.m(i);
    if (s && v * *s == diff) return std::make_tuple(j, k, *s);
  }
  return std::nullopt;
}

std::string svg_pieces(const std::vector<DecompositionPiece>& pieces, const AlphaContext& ctx) {
  std::vector<std::vector<std::vector<double>>> left, right;
  double lo_x = 1e300, lo_y = 1e300, hi_x = -1e300, hi_y = -1e300;
  for (const auto& p : pieces) {
    auto poly = as_polygon(p.piece, ctx);
    if (!poly) continue;
    std::vector<std::vector<double>> a, b;
    for (const auto& v : poly->vertices) {
      a.push_back(v.to_double(ctx));
      b.push_back((v + p.shift).to_double(ctx));
    }
    for (const auto* set : {&a, &b})
      for (const auto& q : *set) {
        lo_x = std::min(lo_x, q[0]), hi_x = std::max(hi_x, q[0]);
        lo_y = std::min(lo_y, q[1]), hi_y = std::max(hi_y, q[1]);
      }
    left.push_back(std::move(a));
    right.push_back(std::move(b));
  }
  const double w = hi_x - lo_x, h = hi_y - lo_y, scale = 400 / std::max({w, h, 1e-9});
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << 2 * w * scale + 60 << "\" height=\""
     << h * scale + 40 << "\">\n";
  auto draw = [&](const std::vector<std::vector<std::vector<double>>>& polys, double dx) {
    for (size_t i = 0; i < polys.size(); ++i) {
      os << "<polygon fill=\"hsl(" << (i * 47) % 360 << ",60%,70%)\" stroke=\"black\" stroke-width=\"0.5\" points=\"";
      for (const auto& q : polys[i]) os << dx + 20 + (q[0] - lo_x) * scale << ',' << 20 + (hi_y - q[1]) * scale << ' ';
      os << "\"/>\n";
    }
  };
  draw(left, 0);
  draw(right, w * scale + 20);
  os << "</svg>\n";
  return os.str();
}

int run_decompose(const Globals& g, const std::string& from, const std::string& to, const std::string& svg) {
  auto a = load_set(from, g);
  std::optional<SetDocument> b;
  if (!to.empty()) b = load_set(to, g);
  const AlphaContext& ctx = a.ctx;
  std::vector<DecompositionPiece> pieces;
  SetDescription target;
  if (auto* ia = std::get_if<IntervalUnion1D>(&a.set.shape)) {
    if (!b || !std::holds_alternative<IntervalUnion1D>(b->set.shape))
      throw Error(Errc::unsupported_shape, "1D decomposition needs --to with an interval union");
    pieces = decompose_1d(*ia, std::get<IntervalUnion1D>(b->set.shape), ctx);
    target = b->set;
  } else if (auto* pa = std::get_if<Parallelepiped>(&a.set.shape);
             pa && b && std::holds_alternative<Parallelepiped>(b->set.shape)) {
    auto sh = shear_between(*pa, std::get<Parallelepiped>(b->set.shape));
    if (!sh) throw Error(Errc::unsupported_shape, "parallelepipeds must differ by a shear v_k -> v_k + s*v_j");
    auto [j, k, s] = *sh;
    auto d = shear_decompose(*pa, j, k, s, ctx);
    pieces = std::move(d.pieces);
    target = d.target;
  } else {
    auto poly = as_polygon(a.set, ctx);
    if (ctx.d != 2 || !poly) throw Error(Errc::unsupported_shape, "unsupported source for decomposition");
    auto d = decompose_convex_polygon(*poly, ctx);
    if (b && !verify_decomposition(a.set, b->set, d.pieces, ctx).ok)
      throw Error(Errc::unsupported_shape,
                  "planar decompositions target a union of lattice parallelograms; omit --to to receive it");
    pieces = std::move(d.pieces);
    target = b ? b->set : d.target;
  }
  auto v = verify_decomposition(a.set, target, pieces, ctx);
  if (!v.ok) throw Error(Errc::unverified_decomposition, v.failed_check + ": " + v.detail);
  if (!svg.empty()) write_text_file(svg, svg_pieces(pieces, ctx));
  emit(g, {{"schema", kSchema},
           {"alpha", ctx.descriptor()},
           {"verified", true},
           {"target", shape_to_json(target)},
           {"pieces", to_json(pieces)}});
  return 0;
}

// ---------------------------------------------------------------- transfer / map / selftest

int run_transfer(const Globals& g, const std::string& path, const std::string& check, const std::string& samples,
                 long lambda_max, long grid) {
  auto doc = load_set(path, g);
  Json j = {{"schema", kSchema}, {"check", check}};
  if (check == "cohomology") {
    const long n = parse_count(samples);
    const double res = cohomology_residual(doc.set, transfer_for(doc.set, doc.ctx), n, doc.ctx, g.seed);
    j["samples"] = n;
    j["residual"] = res;
  } else {
    auto* p = std::get_if<Parallelepiped>(&doc.set.shape);
    if (!p) throw Error(Errc::unsupported_shape, "the Fourier check needs a lattice parallelepiped");
    auto r = fourier_check(*p, lambda_max, grid, doc.ctx, g.threads);
    Json entries = Json::array();
    for (const auto& e : r.entries)
      entries.push_back({{"lambda", e.lambda},
                         {"g_hat", {e.g_hat.real(), e.g_hat.imag()}},
                         {"c", {e.c.real(), e.c.imag()}}});
    j["grid"] = grid;
    j["max_error"] = r.max_error;
    j["entries"] = entries;
    j["small_divisors"] = r.small_divisors;
  }
  emit(g, j);
  return 0;
}

int run_map(const Globals& g, const std::string& matrix, const std::string& set) {
  auto doc = load_set(set, g);
  auto m = from_u_matrix(u_matrix_from_json(read_json_file(matrix)), doc.ctx);
  auto img = push_set(m, doc.set, doc.ctx);
  Json j = set_document(img, m.beta_context);
  j["map"] = to_json(m);
  emit(g, j);
  return 0;
}

int run_selftest(const Globals& g, double scale) {
  AcceptanceOptions opt;
  opt.scale = scale;
  opt.seed = g.seed;
  opt.threads = g.threads;
  opt.config = load_config(g);
  auto results = run_acceptance(opt, &std::cout);
  for (const auto& r : results)
    if (!r.pass) return 1;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bounded remainder sets for irrational torus rotations"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand
  Globals g;
  app.add_option("--seed", g.seed, "Seed for all randomness")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads (0: all cores)")->capture_default_str();
  app.add_option("--config", g.config, "Diagnostic thresholds (JSON)");
  app.add_option("--alpha", g.alpha, "preset:<id> or comma separated decimals");
  app.add_option("--out", g.out, "Output file (default: stdout)");

  auto* construct = app.add_subcommand("construct", "Build a set from one of the constructions");
  ConstructArgs ca;
  construct->add_option("family", ca.family, "hecke | parallelepiped | sheared | measure | zonotope | szusz")
      ->required();
  construct->add_option("--beta", ca.beta, "Interval length, e.g. \"0 + 1*a1\"");
  construct->add_option("--gamma", ca.gamma, "Prescribed measure");
  construct->add_option("--dim", ca.dim, "Dimension for measure");
  construct->add_option("--base", ca.base, "Base point as a module vector JSON");
  construct->add_option("--gens", ca.gens, "Generators as a JSON array of module vectors");
  construct->add_option("--shear", ca.shear, "Shear rows as a JSON array of rational arrays");
  construct->add_option("--v", ca.v, "Szusz direction as a module vector JSON");
  construct->add_option("--sigma-q", ca.sigma_q);
  construct->add_option("--sigma-p", ca.sigma_p);

  SweepArgs sa;
  auto* verdict = app.add_subcommand("verdict", "Decide whether a set is a bounded remainder set");
  verdict->add_option("--set", sa.set)->required();
  verdict->add_option("--n", sa.n, "Orbit length for the fallback diagnostic")->capture_default_str();
  verdict->add_option("--starts", sa.starts)->capture_default_str();
  verdict->add_flag("--no-diagnostic", sa.no_diagnostic, "Skip the simulation fallback");

  auto* disc = app.add_subcommand("discrepancy", "Discrepancy sweep; CSV start_index,checkpoint,max_abs");
  disc->add_option("--set", sa.set)->required();
  disc->add_option("--n", sa.n)->capture_default_str();
  disc->add_option("--starts", sa.starts)->capture_default_str();

  std::string inv_set;
  int rank = -1;
  auto* inv = app.add_subcommand("invariants", "Hadwiger invariants and polygon criteria");
  inv->add_option("--set", inv_set)->required();
  inv->add_option("--rank", rank, "Flag rank (default: all)");

  std::string from, to, svg;
  auto* dec = app.add_subcommand("decompose", "Equidecompose --from into --to");
  dec->add_option("--from", from)->required();
  dec->add_option("--to", to);
  dec->add_option("--svg", svg, "Write the 2D pieces before and after shifting");

  std::string tr_set, check = "cohomology", samples = "10000";
  long lambda_max = 3, grid = 1024;
  auto* tr = app.add_subcommand("transfer", "Check a transfer function");
  tr->add_option("--set", tr_set)->required();
  tr->add_option("--check", check)->check(CLI::IsMember({"cohomology", "fourier"}))->capture_default_str();
  tr->add_option("--samples", samples)->capture_default_str();
  tr->add_option("--lambda-max", lambda_max)->capture_default_str();
  tr->add_option("--grid", grid)->capture_default_str();

  std::string matrix, map_set;
  auto* mp = app.add_subcommand("map", "Push a set through the linear map given by U");
  mp->add_option("--matrix", matrix)->required();
  mp->add_option("--set", map_set)->required();

  double scale = 0.1;
  auto* self = app.add_subcommand("selftest", "Acceptance criteria at reduced size");
  self->add_option("--scale", scale)->check(CLI::Range(0.01, 1.0))->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*construct) return run_construct(g, ca);
    if (*verdict) return run_verdict(g, sa);
    if (*disc) return run_discrepancy(g, sa);
    if (*inv) return run_invariants(g, inv_set, rank);
    if (*dec) return run_decompose(g, from, to, svg);
    if (*tr) return run_transfer(g, tr_set, check, samples, lambda_max, grid);
    if (*mp) return run_map(g, matrix, map_set);
    if (*self) return run_selftest(g, scale);
  } catch (const CLI::Error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << Json{{"error", e.code_name()}, {"message", e.what()}}.dump() << "\n";
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << Json{{"error", "parse_error"}, {"message", e.what()}}.dump() << "\n";
    return 1;
  }
  return 2;
}
