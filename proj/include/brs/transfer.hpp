#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include "brs/sets.hpp"

namespace brs {

// A point-evaluable function on the torus. Transfer functions are determined
// up to an additive constant; the ones built here vanish at their base point.
using TransferFn = std::function<double(const std::vector<double>&)>;

// Facet Pi_rj = base + span_[0,1){v_k : k != r}, base = P.base + j*alpha.
struct TransferFacet {
  int r = 0;  // 0-based generator index
  long j = 0;
  ModuleVector base;
  std::vector<ModuleVector> gens;
  int sign = 1;  // sign of q_r
  std::vector<double> base_d;  // base reduced mod 1
};

// Oriented closed hypersurface of a lattice parallelepiped; its intersection
// number with paths defines the transfer function.
struct TransferSurface {
  int d = 0;
  std::vector<TransferFacet> facets;
  std::vector<long> omega;
  double omega_residual = 0;  // max distance of the computed omega from integers
  ScalarModule D;
  std::vector<double> x0;
  std::vector<std::vector<double>> duals;  // v_r^*, the rows of the inverse generator matrix
  std::vector<std::vector<double>> gens_d;
};

// P must have lattice generators. x0 defaults to a fixed generic point away
// from the surface. Throws internal_consistency if omega fails to round to
// integers or the basic-cycle check disagrees with it.
TransferSurface build_surface(const Parallelepiped& P, const AlphaContext& ctx,
                              std::optional<std::vector<double>> x0 = std::nullopt);

// Signed intersection number of the straight segment a -> b in R^d with all
// integer translates of the surface. Throws degenerate_path if the segment
// touches a facet boundary, runs inside a facet, or ends on the surface.
long intersection_number(const TransferSurface& s, const std::vector<double>& a, const std::vector<double>& b);

bool near_surface(const TransferSurface& s, const std::vector<double>& x, double eps);

// g(x) = #(Pi . gamma) - <lift(x) - x0, omega>. Degenerate straight paths are
// rerouted through a jittered midpoint (8 attempts). Throws degenerate_path if
// x lies within 1e-10 of the surface or every attempt fails.
double eval_transfer(const TransferSurface& s, const std::vector<double>& x);
TransferFn surface_transfer(TransferSurface s);

// Transfer of the interval [start, start + q*beta + p) for the rotation beta:
// -sum_{0<=j<q} {x - start - j*beta}, or the mirrored sum for q < 0.
TransferFn hecke_transfer(long q, double start, double beta);

// Liardet cylinder S(Sigma, v): given h for Sigma with respect to v_0/v_d,
// returns g with chi_S - vol S = g(x) - g(x - v). Throws invalid_parametrization
// if v_d = 0.
TransferFn cylinder_transfer(TransferFn h, double sigma_volume, const std::vector<double>& v);

// Converts a transfer with respect to q*rho (mod Z^d) into one with respect to
// rho. q != 0.
TransferFn rotation_transfer(TransferFn g, long q, const std::vector<double>& rho);

// Transfer of the realized cylinder with respect to ctx.alpha.
TransferFn recipe_transfer(const CylinderRecipe& r, const AlphaContext& ctx);

// Transfer for any set the constructions produce: Hecke intervals, lattice
// parallelepipeds and zonotopes, recipe cylinders, and disjoint unions of
// these. Throws unsupported_shape otherwise.
TransferFn transfer_for(const SetDescription& s, const AlphaContext& ctx);

// A piece of the source moved by n*alpha + m into the target.
struct ChainPiece {
  SetDescription piece;
  long n = 0;
};

// g_target = g_source - sum_j g_j with g_j the orbit sums of chi over each
// piece. The caller vouches that the pieces form a decomposition; the
// equidecomp overload checks it.
TransferFn chain_transfer(TransferFn g_source, const std::vector<ChainPiece>& pieces, const AlphaContext& ctx);

// max |chi_S(x) - vol S - g(x) + g(x - alpha)| over uniform samples, redrawing
// points near the boundary of S or where g reports a degenerate path.
double cohomology_residual(const SetDescription& S, const TransferFn& g, long n_samples, const AlphaContext& ctx,
                           unsigned long long seed = 0);

struct FourierEntry {
  std::vector<long> lambda;
  std::complex<double> g_hat;
  std::complex<double> c;
};

struct FourierReport {
  double max_error = 0;
  std::vector<FourierEntry> entries;
  std::vector<std::vector<long>> small_divisors;  // |1 - e(-<alpha,lambda>)| < 1e-6
};

// Midpoint-rule estimate of g^(lambda) against the closed form c(lambda) for
// 0 < |lambda|_inf <= lambda_max. grid is a power of two >= 256; d <= 3.
FourierReport fourier_check(const Parallelepiped& P, long lambda_max, long grid, const AlphaContext& ctx,
                            int threads = 0);

}  // namespace brs
