#include "plapmem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace plapmem {

Mesh1D::Mesh1D(double a_, double b_, int m_) : a(a_), b(b_), m(m_) {
  if (!std::isfinite(a) || !std::isfinite(b))
    throw std::invalid_argument("Mesh1D: endpoints must be finite");
  if (!(a < b))
    throw std::invalid_argument("Mesh1D: requires a < b, got a=" + std::to_string(a) +
                                " b=" + std::to_string(b));
  if (m < 1) throw std::invalid_argument("Mesh1D: requires m >= 1, got m=" + std::to_string(m));
  h = (b - a) / m;
}

ReferenceElement::ReferenceElement(int degree) : r_(degree) {
  if (r_ < 1 || r_ > 4)
    throw std::invalid_argument("ReferenceElement: degree must be in 1..4, got " +
                                std::to_string(r_));
  nodes_.resize(r_ + 1);
  for (int i = 0; i <= r_; ++i) nodes_[i] = static_cast<double>(i) / r_;
}

double ReferenceElement::value(int i, double xi) const {
  double v = 1.0;
  for (int j = 0; j <= r_; ++j) {
    if (j == i) continue;
    v *= (xi - nodes_[j]) / (nodes_[i] - nodes_[j]);
  }
  return v;
}

double ReferenceElement::derivative(int i, double xi) const {
  // sum over l != i of 1/(x_i - x_l) * prod_{j != i,l} (xi - x_j)/(x_i - x_j)
  double d = 0.0;
  for (int l = 0; l <= r_; ++l) {
    if (l == i) continue;
    double term = 1.0 / (nodes_[i] - nodes_[l]);
    for (int j = 0; j <= r_; ++j) {
      if (j == i || j == l) continue;
      term *= (xi - nodes_[j]) / (nodes_[i] - nodes_[j]);
    }
    d += term;
  }
  return d;
}

QuadratureRule gauss_rule(int q) {
  if (q < 1 || q > 16)
    throw std::invalid_argument("gauss_rule: point count must be in 1..16, got " +
                                std::to_string(q));
  QuadratureRule rule;
  rule.q = q;
  rule.points.resize(q);
  rule.weights.resize(q);
  // Newton iteration for the roots of the Legendre polynomial P_q on [-1,1].
  for (int i = 0; i < q; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (q + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= q; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      // p1 = P_q(x), p0 = P_{q-1}(x)
      dp = q * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // map from [-1,1] to [0,1]; cos-initialized roots come out descending
    rule.points[q - 1 - i] = 0.5 * (x + 1.0);
    rule.weights[q - 1 - i] = 0.5 * w;
  }
  return rule;
}

DofMap::DofMap(int m, int r) : m_(m), r_(r) {
  if (m < 1) throw std::invalid_argument("DofMap: requires m >= 1");
  if (r < 1 || r > 4) throw std::invalid_argument("DofMap: requires 1 <= r <= 4");
}

double FeSpace::node_position(int node) const {
  // exact at both endpoints regardless of rounding in h
  return mesh.a + (mesh.b - mesh.a) * node / (mesh.m * ref.degree());
}

FeSpace build_space(double a, double b, int m, int r, int quad_points) {
  int q = quad_points == 0 ? r + 3 : quad_points;
  return FeSpace{Mesh1D(a, b, m), ReferenceElement(r), DofMap(m, r), gauss_rule(q)};
}

CoeffVec interpolate(const std::function<double(double)>& func, const FeSpace& s) {
  CoeffVec u(s.n_dof());
  for (int node = 1; node < s.dofs.node_count() - 1; ++node) {
    double x = s.node_position(node);
    double v = func(x);
    if (!std::isfinite(v))
      throw NonFiniteInput("interpolate: non-finite sample at x=" + std::to_string(x));
    u[node - 1] = v;
  }
  return u;
}

namespace {

void check_size(const CoeffVec& u, const FeSpace& s, const char* who) {
  if (static_cast<int>(u.size()) != s.n_dof())
    throw std::invalid_argument(std::string(who) + ": coefficient vector has size " +
                                std::to_string(u.size()) + ", space has " +
                                std::to_string(s.n_dof()) + " dofs");
}

// element index and local coordinate of x, clamped into the mesh
std::pair<int, double> locate(const FeSpace& s, double x) {
  const Mesh1D& mesh = s.mesh;
  int e = static_cast<int>((x - mesh.a) / mesh.h);
  e = std::clamp(e, 0, mesh.m - 1);
  double xi = (x - mesh.element_left(e)) / mesh.h;
  return {e, std::clamp(xi, 0.0, 1.0)};
}

}  // namespace

double evaluate(const CoeffVec& u, const FeSpace& s, double x) {
  check_size(u, s, "evaluate");
  auto [e, xi] = locate(s, x);
  double v = 0.0;
  for (int i = 0; i <= s.r(); ++i) {
    int dof = s.dofs.element_dof(e, i);
    if (dof >= 0) v += u[dof] * s.ref.value(i, xi);
  }
  return v;
}

double evaluate_deriv(const CoeffVec& u, const FeSpace& s, double x) {
  check_size(u, s, "evaluate_deriv");
  auto [e, xi] = locate(s, x);
  double v = 0.0;
  for (int i = 0; i <= s.r(); ++i) {
    int dof = s.dofs.element_dof(e, i);
    if (dof >= 0) v += u[dof] * s.ref.derivative(i, xi);
  }
  return v / s.h();
}

double l2_norm(const CoeffVec& u, const FeSpace& s) {
  check_size(u, s, "l2_norm");
  double acc = 0.0;
  for (int e = 0; e < s.mesh.m; ++e) {
    for (int q = 0; q < s.quad.q; ++q) {
      double v = 0.0;
      for (int i = 0; i <= s.r(); ++i) {
        int dof = s.dofs.element_dof(e, i);
        if (dof >= 0) v += u[dof] * s.ref.value(i, s.quad.points[q]);
      }
      acc += s.quad.weights[q] * s.h() * v * v;
    }
  }
  return std::sqrt(acc);
}

double l2_error(const CoeffVec& u, const std::function<double(double, double)>& exact,
                double t, const FeSpace& s) {
  check_size(u, s, "l2_error");
  // a finer rule than the assembly one: exact(.,t) is not a polynomial
  QuadratureRule fine = gauss_rule(std::min(16, std::max(s.quad.q, s.r() + 6)));
  double acc = 0.0;
  for (int e = 0; e < s.mesh.m; ++e) {
    double xl = s.mesh.element_left(e);
    for (int q = 0; q < fine.q; ++q) {
      double xi = fine.points[q];
      double v = 0.0;
      for (int i = 0; i <= s.r(); ++i) {
        int dof = s.dofs.element_dof(e, i);
        if (dof >= 0) v += u[dof] * s.ref.value(i, xi);
      }
      double diff = v - exact(xl + xi * s.h(), t);
      acc += fine.weights[q] * s.h() * diff * diff;
    }
  }
  return std::sqrt(acc);
}

std::vector<double> node_positions(const FeSpace& s) {
  std::vector<double> xs(s.dofs.node_count());
  for (int node = 0; node < s.dofs.node_count(); ++node) xs[node] = s.node_position(node);
  return xs;
}

std::vector<double> node_values(const CoeffVec& u, const FeSpace& s) {
  check_size(u, s, "node_values");
  std::vector<double> vals(s.dofs.node_count(), 0.0);
  for (int node = 1; node < s.dofs.node_count() - 1; ++node) vals[node] = u[node - 1];
  return vals;
}

}  // namespace plapmem
