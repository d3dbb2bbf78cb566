// Galerkin assembly on an FeSpace: mass matrix, the p-Laplacian flux
// residual N(u), its Picard ("frozen coefficient") and Newton linearizations,
// and load vectors.  All loops run sequentially in element order, so results
// are bit-reproducible.
#pragma once

#include <functional>

#include "plapmem/banded.hpp"
#include "plapmem/mesh.hpp"

namespace plapmem {

// M_ij = \int phi_i phi_j dx, SPD with bandwidth r.
BandedSpdMatrix assemble_mass(const FeSpace& s);

// N(u)_i = \int |u_h'|^{p-2} u_h' phi_i' dx, the weak p-Laplacian flux.
// Requires p >= 2.
CoeffVec plap_residual(const CoeffVec& u, double p, const FeSpace& s);

// K(w)_ij = \int c(|w_h'|) phi_i' phi_j' dx with frozen coefficient
// c(g) = (g^2 + eps)^{(p-2)/2}.  eps = 0 gives the plain Picard matrix and
// then K(u) u == N(u) exactly (same quadrature points).
BandedSpdMatrix frozen_stiffness(const CoeffVec& w, double p, double eps,
                                 const FeSpace& s);

// Exact 1D Jacobian of N at w, regularized:
// c(g) = (g^2+eps)^{(p-2)/2} + (p-2) g^2 (g^2+eps)^{(p-4)/2}.
// For eps = 0 this is (p-1)|w'|^{p-2}.  Positive semidefinite for p >= 2.
BandedSpdMatrix plap_jacobian(const CoeffVec& w, double p, double eps,
                              const FeSpace& s);

// F(t)_i = \int f(x,t) phi_i(x) dx via the space's quadrature rule.
CoeffVec assemble_load(const std::function<double(double, double)>& f, double t,
                       const FeSpace& s);

}  // namespace plapmem
