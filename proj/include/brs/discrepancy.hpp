#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "brs/indicator.hpp"
#include "brs/sets.hpp"

namespace brs {

enum class Diagnostic { no_growth, growth, inconclusive };
std::string to_string(Diagnostic d);

// Thresholds for boundedness_diagnostic. The defaults were calibrated by
// simulation on the preset rotations; tools/brs_config.json carries the same
// values and the CLI reads them from there.
struct DiagnosticConfig {
  double no_growth_slack = 0.5;
  double growth_margin = 2.0;
  double boundary_eps = 1e-12;
  int boundary_stride = 64;  // orbit points checked for boundary proximity

  static DiagnosticConfig load(const std::string& path);
};

struct DiscrepancyReport {
  std::string set_id;
  std::vector<std::vector<double>> start_points;
  std::vector<long> checkpoints;
  std::vector<std::vector<double>> max_abs;  // [start][checkpoint]
  int resampled = 0;                         // starts redrawn for boundary proximity
  Diagnostic verdict = Diagnostic::inconclusive;
};

// Orbit x0 + k*rot mod 1 with periodic high-precision renormalization.
class Orbit {
 public:
  Orbit(std::vector<double> x0, std::vector<Real> rot);
  const double* point() const { return x_.data(); }
  long index() const { return k_; }
  void advance();

  static constexpr long kRenormPeriod = 1L << 16;

 private:
  void renormalize();
  std::vector<double> x0_;
  std::vector<Real> rot_;
  std::vector<double> rot_d_;
  std::vector<double> x_;
  long k_ = 0;
};

struct SeriesResult {
  std::vector<double> max_abs;  // per checkpoint
  bool hit_boundary = false;
};

// D_n = sum_{k<n} chi_S(x0 + k*rot) - n*vol for n <= N; records max_{n'<=n}|D_n'|
// at each checkpoint (checkpoints must be increasing and <= N). The observer,
// if given, sees every (n, D_n).
SeriesResult discrepancy_series(const Indicator& ind, double volume, const std::vector<double>& x0,
                                long N, const std::vector<long>& checkpoints,
                                const std::vector<Real>& rot,
                                const std::function<void(long, double)>& observer = {},
                                double boundary_eps = 0.0, int boundary_stride = 64);

struct ReportOptions {
  int starts = 50;
  long N = 100000;
  std::vector<long> checkpoints;  // default: decades from 10^3 up to N
  unsigned long long seed = 0;
  int threads = 0;  // 0: hardware concurrency
  DiagnosticConfig config;
};

std::vector<long> decade_checkpoints(long first, long N);

// Rotation defaults to ctx.alpha.
DiscrepancyReport discrepancy_report(const SetDescription& s, const AlphaContext& ctx,
                                     const ReportOptions& opt,
                                     const std::optional<std::vector<Real>>& rotation = std::nullopt,
                                     std::optional<double> volume = std::nullopt);

// Needs >= 3 checkpoints spanning >= 2 decades. The reference is the first
// checkpoint of the report.
Diagnostic boundedness_diagnostic(const DiscrepancyReport& r, const DiagnosticConfig& cfg = {});

enum class VerdictKind { brs, not_brs, unknown };
std::string to_string(VerdictKind k);

struct Verdict {
  VerdictKind kind = VerdictKind::unknown;
  std::string rule;    // which decision step produced the verdict
  std::string detail;  // certificate theorem or witness description
  std::optional<Diagnostic> diagnostic;
};

struct VerdictOptions {
  bool run_diagnostic = true;
  ReportOptions report{20, 100000, {}, 0, 0, {}};
};

Verdict brs_verdict(const SetDescription& s, const AlphaContext& ctx, const VerdictOptions& opt = {});

}  // namespace brs
