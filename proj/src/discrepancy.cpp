#include "brs/discrepancy.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <random>
#include <thread>

#include "brs/error.hpp"
#include "json.hpp"

namespace brs {

std::string to_string(Diagnostic d) {
  switch (d) {
    case Diagnostic::no_growth: return "no-growth";
    case Diagnostic::growth: return "growth";
    case Diagnostic::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

DiagnosticConfig DiagnosticConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::parse_error, "cannot open config " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::parse_error, std::string("config: ") + e.what());
  }
  DiagnosticConfig c;
  const nlohmann::json& d = j.contains("diagnostic") ? j.at("diagnostic") : j;
  c.no_growth_slack = d.value("no_growth_slack", c.no_growth_slack);
  c.growth_margin = d.value("growth_margin", c.growth_margin);
  c.boundary_eps = d.value("boundary_eps", c.boundary_eps);
  c.boundary_stride = d.value("boundary_stride", c.boundary_stride);
  return c;
}

Orbit::Orbit(std::vector<double> x0, std::vector<Real> rot)
    : x0_(std::move(x0)), rot_(std::move(rot)), x_(x0_.size()) {
  if (rot_.size() != x0_.size()) throw Error(Errc::dimension_mismatch, "orbit: start and rotation differ");
  for (const auto& r : rot_) rot_d_.push_back(to_double(real_frac(r)));
  renormalize();
}

void Orbit::renormalize() {
  for (size_t i = 0; i < x_.size(); ++i) {
    Real v = real_frac(make_real(x0_[i]) + rot_[i] * Real(k_));
    x_[i] = to_double(v);
    if (x_[i] >= 1.0) x_[i] = 0.0;
  }
}

void Orbit::advance() {
  ++k_;
  if (k_ % kRenormPeriod == 0) {
    renormalize();
    return;
  }
  for (size_t i = 0; i < x_.size(); ++i) {
    double v = x_[i] + rot_d_[i];
    x_[i] = v >= 1.0 ? v - 1.0 : v;
  }
}

SeriesResult discrepancy_series(const Indicator& ind, double volume, const std::vector<double>& x0, long N,
                                const std::vector<long>& checkpoints, const std::vector<Real>& rot,
                                const std::function<void(long, double)>& observer, double boundary_eps,
                                int boundary_stride) {
  if (N < 1) throw Error(Errc::insufficient_checkpoints, "N must be >= 1");
  for (size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] < 1 || checkpoints[i] > N || (i && checkpoints[i] <= checkpoints[i - 1]))
      throw Error(Errc::insufficient_checkpoints, "checkpoints must be increasing within [1, N]");
  }
  if (static_cast<int>(x0.size()) != ind.dim()) throw Error(Errc::dimension_mismatch, "start point dimension");
  SeriesResult res;
  res.max_abs.assign(checkpoints.size(), 0.0);
  Orbit orbit(x0, rot);
  long hits = 0;
  double worst = 0;
  size_t ci = 0;
  if (observer) observer(0, 0.0);
  const long stride = std::max(1, boundary_stride);
  for (long n = 1; n <= N; ++n) {
    if (boundary_eps > 0 && (n - 1) % stride == 0 && ind.near_boundary(orbit.point(), boundary_eps)) {
      res.hit_boundary = true;
      return res;
    }
    hits += ind.count(orbit.point());
    orbit.advance();
    const double D = static_cast<double>(hits) - static_cast<double>(n) * volume;
    worst = std::max(worst, std::fabs(D));
    if (observer) observer(n, D);
    while (ci < checkpoints.size() && checkpoints[ci] == n) res.max_abs[ci++] = worst;
  }
  return res;
}

std::vector<long> decade_checkpoints(long first, long N) {
  std::vector<long> out;
  for (long c = first; c < N; c *= 10) out.push_back(c);
  out.push_back(N);
  return out;
}

DiscrepancyReport discrepancy_report(const SetDescription& s, const AlphaContext& ctx, const ReportOptions& opt,
                                     const std::optional<std::vector<Real>>& rotation,
                                     std::optional<double> volume) {
  const int d = s.dim();
  DiscrepancyReport rep;
  rep.set_id = s.kind() + (s.certificate ? ":" + s.certificate->theorem : "");
  rep.checkpoints = opt.checkpoints.empty() ? decade_checkpoints(std::min<long>(1000, opt.N), opt.N)
                                            : opt.checkpoints;
  const std::vector<Real> rot = rotation ? *rotation : ctx.alpha;
  if (static_cast<int>(rot.size()) != d) throw Error(Errc::dimension_mismatch, "rotation dimension");
  const double vol = volume ? *volume : volume_numeric(s, ctx);
  const Indicator ind(s, ctx);
  const int starts = std::max(0, opt.starts);
  rep.start_points.assign(starts, {});
  rep.max_abs.assign(starts, {});
  std::vector<int> redraws(starts, 0);

  auto run = [&](int i) {
    for (int attempt = 0;; ++attempt) {
      std::seed_seq seq{static_cast<unsigned>(opt.seed), static_cast<unsigned>(opt.seed >> 32),
                        static_cast<unsigned>(i), static_cast<unsigned>(attempt)};
      std::mt19937_64 rng(seq);
      std::uniform_real_distribution<double> U(0.0, 1.0);
      std::vector<double> x(d);
      for (auto& xi : x) xi = U(rng);
      // The last attempt runs without the boundary check so the loop ends.
      const bool check = attempt < 16;
      auto r = discrepancy_series(ind, vol, x, opt.N, rep.checkpoints, rot, {},
                                  check ? opt.config.boundary_eps : 0.0, opt.config.boundary_stride);
      if (r.hit_boundary) {
        ++redraws[i];
        continue;
      }
      rep.start_points[i] = x;
      rep.max_abs[i] = r.max_abs;
      return;
    }
  };

  int threads = opt.threads > 0 ? opt.threads : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, std::max(1, starts));
  if (threads == 1) {
    for (int i = 0; i < starts; ++i) run(i);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex fm;
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (int i; (i = next++) < starts;) {
          try {
            run(i);
          } catch (...) {
            std::lock_guard<std::mutex> lk(fm);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
  }
  for (int r : redraws) rep.resampled += r;
  if (rep.checkpoints.size() >= 3 && rep.checkpoints.back() >= 100 * rep.checkpoints.front() && starts > 0)
    rep.verdict = boundedness_diagnostic(rep, opt.config);
  return rep;
}

Diagnostic boundedness_diagnostic(const DiscrepancyReport& r, const DiagnosticConfig& cfg) {
  const auto& c = r.checkpoints;
  if (c.size() < 3 || c.front() <= 0 || c.back() < 100 * c.front())
    throw Error(Errc::insufficient_checkpoints, "need >= 3 checkpoints spanning >= 2 decades");
  if (r.max_abs.empty()) throw Error(Errc::insufficient_checkpoints, "report has no start points");
  bool all_flat = true;
  size_t grown = 0;
  for (const auto& row : r.max_abs) {
    if (row.size() != c.size()) throw Error(Errc::internal_consistency, "report row length");
    const double inc = row.back() - row.front();
    if (inc > cfg.no_growth_slack) all_flat = false;
    if (inc >= cfg.growth_margin) ++grown;
  }
  if (all_flat) return Diagnostic::no_growth;
  if (2 * grown > r.max_abs.size()) return Diagnostic::growth;
  return Diagnostic::inconclusive;
}

std::string to_string(VerdictKind k) {
  switch (k) {
    case VerdictKind::brs: return "BRS";
    case VerdictKind::not_brs: return "notBRS";
    case VerdictKind::unknown: return "unknown";
  }
  return "unknown";
}

}  // namespace brs
