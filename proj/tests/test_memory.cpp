#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "plapmem/assembly.hpp"
#include "plapmem/memory_term.hpp"

using namespace plapmem;

namespace {

// scalar-valued trajectories: a 1-dof space keeps the bookkeeping honest
FeSpace scalar_space() { return build_space(0.0, 1.0, 2, 1); }

History scalar_history(double delta, int upto, double (*uf)(double), double (*yf)(double)) {
  History h = History::start(delta, CoeffVec{uf(0.0)});
  for (int j = 1; j <= upto; ++j) h.append(CoeffVec{uf(j * delta)}, CoeffVec{yf(j * delta)});
  return h;
}

}  // namespace

TEST_CASE("kernel factories expose g, g' and g(0)") {
  Kernel e = Kernel::exponential(2.0, 3.0);
  CHECK(e.g0 == 3.0);
  CHECK(e.g(0.5) == doctest::Approx(3.0 * std::exp(-1.0)).epsilon(1e-15));
  CHECK(e.g_prime(0.5) == doctest::Approx(-6.0 * std::exp(-1.0)).epsilon(1e-15));

  Kernel c = Kernel::constant(5.0);
  CHECK(c.g0 == 5.0);
  CHECK(c.g(1.7) == 5.0);
  CHECK(c.g_prime(1.7) == 0.0);

  Kernel p = Kernel::polynomial({1.0, 2.0, 3.0});
  CHECK(p.g0 == 1.0);
  CHECK(p.g(2.0) == doctest::Approx(17.0).epsilon(1e-15));
  CHECK(p.g_prime(2.0) == doctest::Approx(14.0).epsilon(1e-15));

  Kernel z = Kernel::zero();
  CHECK(z.g0 == 0.0);
  CHECK(z.g(0.3) == 0.0);
}

TEST_CASE("check_finite_on probes the step midpoints") {
  Kernel bad;
  bad.g = [](double t) { return 1.0 / (t - 0.5); };
  bad.g_prime = [](double) { return 0.0; };
  bad.g0 = bad.g(0.0);
  // midpoint of the single step of length 1 lands exactly on the pole
  CHECK_THROWS_AS(bad.check_finite_on(1.0, 1), NonFiniteInput);
  CHECK_NOTHROW(Kernel::exponential(1.0).check_finite_on(10.0, 64));
}

TEST_CASE("quadrature weights for k=2") {
  QuadWeights w = quad_weights(2, 0.1);
  REQUIRE(w.entries.size() == 5);
  auto is = [&](int idx, int node, double arg, double weight) {
    CHECK(w.entries[idx].node == node);
    CHECK(w.entries[idx].arg == doctest::Approx(arg).epsilon(1e-14));
    CHECK(w.entries[idx].weight == doctest::Approx(weight).epsilon(1e-14));
  };
  is(0, 0, 0.25, 0.05);
  is(1, 1, 0.15, 0.10);
  is(2, 2, 0.05, 0.075);
  is(3, 2, 0.0, 0.0125);
  is(4, 3, 0.0, 0.0125);
  CHECK(w.weight_sum() == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("quadrature weights for k=0 collapse to the half step") {
  QuadWeights w = quad_weights(0, 0.1);
  REQUIRE(w.entries.size() == 3);
  CHECK(w.entries[0].node == 0);
  CHECK(w.entries[0].arg == doctest::Approx(0.05).epsilon(1e-14));
  CHECK(w.entries[0].weight == doctest::Approx(0.025).epsilon(1e-14));
  CHECK(w.entries[1].node == 0);
  CHECK(w.entries[1].arg == 0.0);
  CHECK(w.entries[1].weight == doctest::Approx(0.0125).epsilon(1e-14));
  CHECK(w.entries[2].node == 1);
  CHECK(w.entries[2].arg == 0.0);
  CHECK(w.entries[2].weight == doctest::Approx(0.0125).epsilon(1e-14));
}

TEST_CASE("weights sum to (k + 1/2) delta for long histories") {
  for (int k : {0, 1, 2, 10, 100, 1000}) {
    QuadWeights w = quad_weights(k, 0.015625);
    CHECK(w.weight_sum() == doctest::Approx((k + 0.5) * 0.015625).epsilon(1e-13));
  }
  CHECK_THROWS_AS(quad_weights(-1, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(quad_weights(2, 0.0), std::invalid_argument);
}

TEST_CASE("Q_g with unit kernel is exact on linear trajectories") {
  // \int_0^{t} s ds = t^2/2; at t = t_{2+1/2} = 0.25 this is 0.03125
  auto lin = [](double t) { return t; };
  auto zero = [](double t) { return 0.0 * t; };
  History h = scalar_history(0.1, 3, zero, lin);
  CoeffVec q = eval_Qg(h, Kernel::constant(1.0), 2);
  REQUIRE(q.size() == 1);
  CHECK(q[0] == doctest::Approx(0.03125).epsilon(1e-13));

  // same value through the u trajectory with g' == 1 (g = t - arbitrary shift)
  Kernel shifted = Kernel::polynomial({7.0, 1.0});
  History h2 = scalar_history(0.1, 3, lin, zero);
  CoeffVec q2 = eval_Qgprime(h2, shifted, 2);
  CHECK(q2[0] == doctest::Approx(0.03125).epsilon(1e-13));
}

TEST_CASE("the k+1 sample can come from a pending iterate") {
  auto path = [](double t) { return std::cos(2 * t); };
  auto zero = [](double t) { return 0.0 * t; };
  Kernel kern = Kernel::exponential(0.8, 1.2);

  History with = scalar_history(0.2, 4, zero, path);
  History without = scalar_history(0.2, 3, zero, path);
  CoeffVec tail{path(4 * 0.2)};
  CoeffVec a = eval_Qg(with, kern, 3);
  CoeffVec b = eval_Qg(without, kern, 3, &tail);
  CHECK(a[0] == b[0]);  // bitwise: same samples, same order

  CHECK_THROWS_AS(eval_Qg(without, kern, 3), MissingHistory);
  CHECK_THROWS_AS(eval_Qgprime(without, kern, 3), MissingHistory);
}

TEST_CASE("exponential kernel ties Q_g' to -Q_g on a shared path") {
  // g = e^{-t}: g' = -g, so Q_{g'} over U == -Q_g over Y when U and Y hold
  // the same samples (path(0) = 0 to match the pinned Y^0 = 0)
  auto path = [](double t) { return std::sin(t); };
  History h = scalar_history(0.15, 5, path, path);
  Kernel kern = Kernel::exponential(1.0);
  CoeffVec qg = eval_Qg(h, kern, 4);
  CoeffVec qgp = eval_Qgprime(h, kern, 4);
  CHECK(qgp[0] == doctest::Approx(-qg[0]).epsilon(1e-14));
}

TEST_CASE("Q_g converges at second order to the exact convolution") {
  // \int_0^tau e^{-(tau-s)} sin(3s) ds = [sin 3tau - 3 cos 3tau + 3 e^{-tau}]/10
  double tau = 1.05;
  double exact = (std::sin(3 * tau) - 3 * std::cos(3 * tau) + 3 * std::exp(-tau)) / 10.0;
  Kernel kern = Kernel::exponential(1.0);
  auto zero = [](double t) { return 0.0 * t; };
  auto path = [](double t) { return std::sin(3 * t); };

  std::vector<double> deltas, errs;
  for (int k : {10, 20, 40}) {
    double delta = tau / (k + 0.5);  // t_{k+1/2} == tau on every level
    History h = scalar_history(delta, k + 1, zero, path);
    CoeffVec q = eval_Qg(h, kern, k);
    deltas.push_back(delta);
    errs.push_back(std::abs(q[0] - exact));
  }
  for (size_t i = 0; i + 1 < errs.size(); ++i) {
    double slope = std::log(errs[i] / errs[i + 1]) / std::log(deltas[i] / deltas[i + 1]);
    CHECK(slope > 1.9);
    CHECK(slope < 2.1);
  }
}

TEST_CASE("I(f) matches the Q_g rule for separable forcing") {
  // f(x,t) = t: I(f) = (\int_0^{0.25} s ds) * load(1) with unit kernel
  FeSpace s = scalar_space();
  CoeffVec unit_load = assemble_load([](double, double) { return 1.0; }, 0.0, s);
  CoeffVec If = eval_If([](double, double t) { return t; }, Kernel::constant(1.0), 2, 0.1, s);
  REQUIRE(If.size() == 1);
  CHECK(If[0] == doctest::Approx(0.03125 * unit_load[0]).epsilon(1e-13));

  // zero forcing gives the zero vector
  CoeffVec z = eval_If([](double, double) { return 0.0; }, Kernel::exponential(2.0), 5, 0.1, s);
  CHECK(z[0] == 0.0);
}

TEST_CASE("I(f) converges at second order for a non-separable forcing") {
  // x-slice at the single dof of the scalar space (node x = 1/2); exact value
  // of \int_0^tau e^{-(tau-s)} \int_0^1 f(x,s) phi(x) dx ds computed from the
  // same load vectors with a very fine trapezoid rule
  FeSpace s = scalar_space();
  Kernel kern = Kernel::exponential(1.0);
  auto f = [](double x, double t) { return std::cos(x + 2 * t); };
  double tau = 0.9;

  double fine = 0.0;
  {
    int nfine = 200000;
    double dt = tau / nfine;
    for (int i = 0; i <= nfine; ++i) {
      double t = i * dt;
      double w = (i == 0 || i == nfine) ? 0.5 : 1.0;
      fine += w * dt * kern.g(tau - t) * assemble_load(f, t, s)[0];
    }
  }

  std::vector<double> deltas, errs;
  for (int k : {8, 16, 32}) {
    double delta = tau / (k + 0.5);
    deltas.push_back(delta);
    errs.push_back(std::abs(eval_If(f, kern, k, delta, s)[0] - fine));
  }
  for (size_t i = 0; i + 1 < errs.size(); ++i) {
    double slope = std::log(errs[i] / errs[i + 1]) / std::log(deltas[i] / deltas[i + 1]);
    CHECK(slope > 1.85);
    CHECK(slope < 2.15);
  }
}

TEST_CASE("History bookkeeping") {
  History h = History::start(0.25, CoeffVec{1.0, 2.0});
  CHECK(h.size() == 1);
  CHECK(h.last_index() == 0);
  CHECK(h.delta() == 0.25);
  CHECK(h.time(3) == doctest::Approx(0.75));
  CHECK(h.u(0)[1] == 2.0);
  CHECK(h.y(0)[0] == 0.0);  // Y^0 is identically zero
  CHECK(h.y(0)[1] == 0.0);

  h.append(CoeffVec{3.0, 4.0}, CoeffVec{5.0, 6.0});
  CHECK(h.size() == 2);
  CHECK(h.u(1)[0] == 3.0);
  CHECK(h.y(1)[1] == 6.0);
  CHECK_THROWS_AS(h.u(2), MissingHistory);
  CHECK_THROWS_AS(h.y(-1), MissingHistory);
  CHECK_THROWS_AS(h.append(CoeffVec{1.0}, CoeffVec{1.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(History::start(0.0, CoeffVec{1.0}), std::invalid_argument);
}
