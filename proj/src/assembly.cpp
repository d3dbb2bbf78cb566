#include "plapmem/assembly.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace plapmem {

namespace {

void check_exponent(double p, const char* who) {
  if (!(p >= 2.0))
    throw UnsupportedExponent(std::string(who) + ": requires p >= 2, got p=" +
                              std::to_string(p));
}

void check_size(const CoeffVec& u, const FeSpace& s, const char* who) {
  if (static_cast<int>(u.size()) != s.n_dof())
    throw std::invalid_argument(std::string(who) + ": coefficient vector size " +
                                std::to_string(u.size()) + " != n_dof " +
                                std::to_string(s.n_dof()));
}

// shape values and derivatives tabulated at the quadrature points
struct ShapeTable {
  int r, q;
  std::vector<double> val, der;  // [i * q + k]
  ShapeTable(const ReferenceElement& ref, const QuadratureRule& quad)
      : r(ref.degree()), q(quad.q), val((r + 1) * q), der((r + 1) * q) {
    for (int i = 0; i <= r; ++i)
      for (int k = 0; k < q; ++k) {
        val[i * q + k] = ref.value(i, quad.points[k]);
        der[i * q + k] = ref.derivative(i, quad.points[k]);
      }
  }
};

// gradient of the FE function at quadrature point k of element e
double grad_at(const CoeffVec& u, const FeSpace& s, const ShapeTable& tab, int e, int k) {
  double du = 0.0;
  for (int i = 0; i <= tab.r; ++i) {
    int dof = s.dofs.element_dof(e, i);
    if (dof >= 0) du += u[dof] * tab.der[i * tab.q + k];
  }
  return du / s.h();
}

// assembles sum_q w_q c(grad) phi_i' phi_j' / h with a per-point coefficient
template <class Coef>
BandedSpdMatrix assemble_gradgrad(const CoeffVec& w, const FeSpace& s, Coef coef) {
  BandedSpdMatrix K(s.n_dof(), s.r());
  ShapeTable tab(s.ref, s.quad);
  for (int e = 0; e < s.mesh.m; ++e) {
    for (int k = 0; k < s.quad.q; ++k) {
      double c = coef(grad_at(w, s, tab, e, k)) * s.quad.weights[k] / s.h();
      for (int i = 0; i <= s.r(); ++i) {
        int gi = s.dofs.element_dof(e, i);
        if (gi < 0) continue;
        for (int j = 0; j <= i; ++j) {
          int gj = s.dofs.element_dof(e, j);
          if (gj < 0) continue;
          K.add(gi, gj, c * tab.der[i * s.quad.q + k] * tab.der[j * s.quad.q + k]);
        }
      }
    }
  }
  return K;
}

}  // namespace

BandedSpdMatrix assemble_mass(const FeSpace& s) {
  BandedSpdMatrix M(s.n_dof(), s.r());
  ShapeTable tab(s.ref, s.quad);
  for (int e = 0; e < s.mesh.m; ++e) {
    for (int k = 0; k < s.quad.q; ++k) {
      double wq = s.quad.weights[k] * s.h();
      for (int i = 0; i <= s.r(); ++i) {
        int gi = s.dofs.element_dof(e, i);
        if (gi < 0) continue;
        for (int j = 0; j <= i; ++j) {
          int gj = s.dofs.element_dof(e, j);
          if (gj < 0) continue;
          M.add(gi, gj, wq * tab.val[i * s.quad.q + k] * tab.val[j * s.quad.q + k]);
        }
      }
    }
  }
  return M;
}

CoeffVec plap_residual(const CoeffVec& u, double p, const FeSpace& s) {
  check_exponent(p, "plap_residual");
  check_size(u, s, "plap_residual");
  CoeffVec res(s.n_dof(), 0.0);
  ShapeTable tab(s.ref, s.quad);
  for (int e = 0; e < s.mesh.m; ++e) {
    for (int k = 0; k < s.quad.q; ++k) {
      double du = grad_at(u, s, tab, e, k);
      // |du|^{p-2} du; the h from the measure cancels one 1/h of phi_i'
      double flux = std::pow(std::abs(du), p - 2.0) * du * s.quad.weights[k];
      for (int i = 0; i <= s.r(); ++i) {
        int gi = s.dofs.element_dof(e, i);
        if (gi >= 0) res[gi] += flux * tab.der[i * s.quad.q + k];
      }
    }
  }
  return res;
}

BandedSpdMatrix frozen_stiffness(const CoeffVec& w, double p, double eps,
                                 const FeSpace& s) {
  check_exponent(p, "frozen_stiffness");
  check_size(w, s, "frozen_stiffness");
  if (eps < 0.0) throw std::invalid_argument("frozen_stiffness: eps must be >= 0");
  return assemble_gradgrad(w, s, [p, eps](double du) {
    return std::pow(du * du + eps, 0.5 * (p - 2.0));
  });
}

BandedSpdMatrix plap_jacobian(const CoeffVec& w, double p, double eps, const FeSpace& s) {
  check_exponent(p, "plap_jacobian");
  check_size(w, s, "plap_jacobian");
  if (eps < 0.0) throw std::invalid_argument("plap_jacobian: eps must be >= 0");
  return assemble_gradgrad(w, s, [p, eps](double du) {
    double base = du * du + eps;
    if (base <= 0.0) return p == 2.0 ? 1.0 : 0.0;  // avoid 0 * inf for p < 4
    return std::pow(base, 0.5 * (p - 2.0)) +
           (p - 2.0) * du * du * std::pow(base, 0.5 * (p - 4.0));
  });
}

CoeffVec assemble_load(const std::function<double(double, double)>& f, double t,
                       const FeSpace& s) {
  CoeffVec F(s.n_dof(), 0.0);
  ShapeTable tab(s.ref, s.quad);
  for (int e = 0; e < s.mesh.m; ++e) {
    double xl = s.mesh.element_left(e);
    for (int k = 0; k < s.quad.q; ++k) {
      double fx = f(xl + s.quad.points[k] * s.h(), t) * s.quad.weights[k] * s.h();
      for (int i = 0; i <= s.r(); ++i) {
        int gi = s.dofs.element_dof(e, i);
        if (gi >= 0) F[gi] += fx * tab.val[i * s.quad.q + k];
      }
    }
  }
  return F;
}

}  // namespace plapmem
