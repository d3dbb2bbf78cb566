// 1D Lagrange finite elements on uniform interval meshes: mesh and dof
// bookkeeping, reference shape functions, Gauss quadrature, interpolation
// and L2 norms/errors.  Homogeneous Dirichlet conditions are built into the
// dof numbering: only interior Lagrange nodes carry unknowns.
#pragma once

#include <functional>
#include <vector>

#include "plapmem/errors.hpp"

namespace plapmem {

// Coefficients of an FE function on the interior Lagrange nodes, ordered
// left to right.  Boundary values are identically zero.
using CoeffVec = std::vector<double>;

struct Mesh1D {
  double a, b;  // interval endpoints, a < b
  int m;        // number of elements
  double h;     // uniform element length (b - a) / m

  Mesh1D(double a_, double b_, int m_);
  double element_left(int e) const { return a + e * h; }
};

// Lagrange basis of degree r on the reference interval [0,1] with
// equispaced nodes i/r, i = 0..r.  Degrees above 4 are rejected: equispaced
// nodes are not trusted beyond that.
class ReferenceElement {
 public:
  explicit ReferenceElement(int degree);
  int degree() const { return r_; }
  int node_count() const { return r_ + 1; }
  double node(int i) const { return nodes_[i]; }
  double value(int i, double xi) const;       // phi_i(xi)
  double derivative(int i, double xi) const;  // phi_i'(xi)

 private:
  int r_;
  std::vector<double> nodes_;
};

// Gauss-Legendre rule with q points mapped to [0,1]; exact for polynomials
// of degree 2q - 1.  Supported range 1 <= q <= 16.
struct QuadratureRule {
  int q = 0;
  std::vector<double> points;   // in (0,1)
  std::vector<double> weights;  // sum to 1
};
QuadratureRule gauss_rule(int q);

// Maps (element, local node) to global Lagrange nodes and interior dofs.
// Global node l sits at a + l*h/r; nodes 0 and m*r are boundary nodes and
// carry no dof.  Interior dof index of node l is l - 1.
class DofMap {
 public:
  DofMap(int m, int r);
  int n_dof() const { return m_ * r_ - 1; }
  int node_count() const { return m_ * r_ + 1; }
  bool boundary_node(int node) const { return node == 0 || node == m_ * r_; }
  int node_to_dof(int node) const { return boundary_node(node) ? -1 : node - 1; }
  // dof of local node i in element e, -1 if it is a boundary node
  int element_dof(int e, int i) const { return node_to_dof(e * r_ + i); }

 private:
  int m_, r_;
};

// Everything needed to assemble and evaluate on one discretization level.
struct FeSpace {
  Mesh1D mesh;
  ReferenceElement ref;
  DofMap dofs;
  QuadratureRule quad;

  int r() const { return ref.degree(); }
  int n_dof() const { return dofs.n_dof(); }
  double h() const { return mesh.h; }
  // position of global Lagrange node l (exact at the endpoints)
  double node_position(int node) const;
};

// quad_points = 0 picks the default r + 3 point rule, enough for the mass
// matrix (degree 2r) with headroom for the nonlinear flux terms.
FeSpace build_space(double a, double b, int m, int r, int quad_points = 0);

// Nodal interpolant; func is sampled at interior nodes only, boundary values
// are assumed (and forced) to be zero.  Non-finite samples throw.
CoeffVec interpolate(const std::function<double(double)>& func, const FeSpace& s);

// Point evaluation of the FE function (x clamped into [a,b]).
double evaluate(const CoeffVec& u, const FeSpace& s, double x);
double evaluate_deriv(const CoeffVec& u, const FeSpace& s, double x);

// L2(a,b) norm by element-wise quadrature (independent of the mass matrix).
double l2_norm(const CoeffVec& u, const FeSpace& s);
// || u_h - exact(., t) ||_{L2} with a finer rule, so the non-polynomial
// exact solution is resolved.
double l2_error(const CoeffVec& u, const std::function<double(double, double)>& exact,
                double t, const FeSpace& s);

// All global node positions / values (boundary entries included as zeros).
std::vector<double> node_positions(const FeSpace& s);
std::vector<double> node_values(const CoeffVec& u, const FeSpace& s);

}  // namespace plapmem
