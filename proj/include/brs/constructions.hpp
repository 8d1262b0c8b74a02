#pragma once

#include <vector>

#include "brs/sets.hpp"

namespace brs {

// Certificate theorem identifiers.
namespace cert {
inline constexpr const char* kHecke = "hecke-ostrowski";
inline constexpr const char* kLatticeParallelepiped = "lattice-parallelepiped";
inline constexpr const char* kShearedParallelepiped = "sheared-parallelepiped";
inline constexpr const char* kPregivenMeasure = "pregiven-measure";
inline constexpr const char* kLiardet = "liardet-cylinder";
inline constexpr const char* kSzusz = "szusz-parallelogram";
inline constexpr const char* kLatticeZonotope = "lattice-zonotope";
inline constexpr const char* kConvexPolygon = "convex-polygon-criterion";
inline constexpr const char* kOren = "oren";
inline constexpr const char* kLinearImage = "linear-image";
}  // namespace cert

// [0, beta) for d = 1; beta must lie in Z + Z*alpha and be positive.
SetDescription hecke_interval(const ScalarModule& beta, const AlphaContext& ctx);

SetDescription module_parallelepiped(const ModuleVector& base, const std::vector<ModuleVector>& vs,
                                     const AlphaContext& ctx);

// w_1 = v_1, w_k = v_k + sum_{i<k} s[k][i] v_i. Row k of the shear may have k
// entries or d entries (the latter must vanish on and above the diagonal).
SetDescription sheared_parallelepiped(const std::vector<ModuleVector>& vs,
                                      const std::vector<std::vector<Rational>>& shear,
                                      const AlphaContext& ctx);
// Real shear coefficients; the result is numeric-only.
SetDescription sheared_parallelepiped_real(const std::vector<ModuleVector>& vs,
                                           const std::vector<std::vector<double>>& shear,
                                           const AlphaContext& ctx);

// Lattice parallelepiped with volume exactly gamma; simple when gamma <= 1.
SetDescription measure_parallelepiped(const ScalarModule& gamma, const AlphaContext& ctx);

// Recipe for the interval [s_q*rho + s_p, s_q*rho + s_p + q*rho + p).
CylinderRecipe interval_recipe(long q, long p, const Rational& start_q = 0, const Rational& start_p = 0);
// One Liardet step: v is a lattice vector of dimension sigma.dim() + 1 relative
// to the rotation of the new level. v = e_last gives a prism.
CylinderRecipe extend_recipe(const CylinderRecipe& sigma, const ModuleVector& v);
SetDescription cylinder_from_recipe(const CylinderRecipe& r, const AlphaContext& ctx);

// S(Sigma, v). Sigma is a cylinder (carrying its recipe) or a single interval
// whose length lies in Z + Z*rho; for v = e_d any parallelepiped Sigma is
// accepted and the prism is returned without a recipe.
SetDescription liardet_cylinder(const SetDescription& sigma, const ModuleVector& v,
                                const AlphaContext& ctx);

// Parallelogram spanned by v and (sigma, 0), sigma = sigma_q*v_1/v_2 + sigma_p.
SetDescription szusz_parallelogram(const ModuleVector& v, long sigma_q, long sigma_p,
                                   const AlphaContext& ctx);

SetDescription lattice_zonotope(const ModuleVector& base, const std::vector<ModuleVector>& gens,
                                const AlphaContext& ctx);
std::vector<Parallelepiped> zonotope_tiling(const Zonotope& z, const AlphaContext& ctx);

}  // namespace brs
