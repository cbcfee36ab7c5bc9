#pragma once

#include <vector>

#include "rieszlab/cellquad.hpp"
#include "rieszlab/grid.hpp"
#include "rieszlab/kernels.hpp"

namespace riesz {

// Accuracy knobs for grid quadrature of singular pair integrals.
struct QuadratureSpec {
  int subdivision = 4;          // sub-cells per axis near truncation cutoffs
  double diagonal_radius = 6.0; // offsets within this many cells of the
                                // diagonal get exact correlation integrals
};

// A quadrature value together with a self-consistency error estimate
// (difference against an independent re-splitting of the same integral).
struct QuadValue {
  double value = 0.0;
  double error = 0.0;
};

// Attractive interaction energy: minus the double integral of
// rho(x) rho(y) |x-y|^-(d+sigma) with d+sigma in (0, d), so sigma in (-d, 0)
// (NonIntegrableSigma otherwise). rho is a density on its grid window.
double riesz_energy(int d, double sigma, const DensityField& rho,
                    const QuadratureSpec& quad = {});

double riesz_energy_confined(int d, double sigma, const DensityField& rho,
                             const ConfinementSpec& g, const QuadratureSpec& quad = {});

// Truncated regularized energy of a pixel set: -integral over pairs of E x E
// at distance >= r of |x-y|^-(d+sigma), sigma in [0, 1). Requires r > 2h
// (ResolutionTooCoarse below).
double j_truncated(int d, double sigma, const PixelSet& set, double r,
                   const QuadratureSpec& quad = {});

// j_truncated minus gamma_r^sigma * |E| (the blow-up of the truncation is
// cancelled, leaving the term that converges to P^sigma(E) - gamma^sigma |E|).
double j_renormalized(int d, double sigma, const PixelSet& set, double r,
                      const QuadratureSpec& quad = {});

// Fractional perimeter P^sigma(E) = integral over E x complement(E) of
// |x-y|^-(d+sigma), sigma in (0, 1) strictly (SigmaOutOfRange otherwise).
// The far tail is summed in closed form, so accuracy is set by the near
// field quadrature alone.
double fractional_perimeter(int d, double sigma, const PixelSet& set,
                            const QuadratureSpec& quad = {});
QuadValue fractional_perimeter_report(int d, double sigma, const PixelSet& set,
                                      const QuadratureSpec& quad = {});

// sigma = 0 perimeter functional: the R-windowed pair integral of |x-y|^-d
// over E x E subtracted from gamma_R^0 |E|, assembled so that for R beyond
// the diameter of E the value no longer depends on R. Evaluates at every
// radius in R_list (ascending), asserts the plateau over the radii exceeding
// diam(E) (NoPlateau otherwise) and returns the plateau value. R_list must
// reach past diam(E).
double p0_perimeter(int d, const PixelSet& set, const std::vector<double>& R_list,
                    const QuadratureSpec& quad = {});
QuadValue p0_perimeter_report(int d, const PixelSet& set, const std::vector<double>& R_list,
                              const QuadratureSpec& quad = {});

// Values of B_R for each requested radius, for plateau inspection.
std::vector<double> p0_profile(int d, const PixelSet& set, const std::vector<double>& R_list,
                               const QuadratureSpec& quad = {});

// Pointwise first variation of the confined attractive energy on the grid of
// rho: res_i = g(x_i) - 2 (W * rho)_i / h^d. Zero (against the active-set
// sign conditions) at a critical density. Integrable regime only.
ScalarField first_variation_residual(int d, double sigma, const DensityField& rho,
                                     const ConfinementSpec& g,
                                     const QuadratureSpec& quad = {});

// Largest violation of the stationarity sign conditions by the residual:
// cells at the lower bound need residual >= 0, cells at the upper bound need
// residual <= 0, interior cells need residual = 0. active_tol decides which
// cells count as sitting at a bound. Used as the stationarity report for
// descent outputs.
double kkt_violation(const DensityField& rho, const ScalarField& residual,
                     double active_tol = 1e-9);

}  // namespace riesz
