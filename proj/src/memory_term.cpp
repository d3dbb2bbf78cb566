#include "plapmem/memory_term.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "plapmem/assembly.hpp"

namespace plapmem {

Kernel Kernel::exponential(double rate, double scale) {
  Kernel k;
  k.g = [rate, scale](double t) { return scale * std::exp(-rate * t); };
  k.g_prime = [rate, scale](double t) { return -rate * scale * std::exp(-rate * t); };
  k.g0 = scale;
  return k;
}

Kernel Kernel::constant(double value) {
  Kernel k;
  k.g = [value](double) { return value; };
  k.g_prime = [](double) { return 0.0; };
  k.g0 = value;
  return k;
}

Kernel Kernel::polynomial(std::vector<double> coeffs) {
  if (coeffs.empty()) coeffs.push_back(0.0);
  Kernel k;
  k.g0 = coeffs[0];
  k.g = [coeffs](double t) {
    double v = 0.0;
    for (size_t i = coeffs.size(); i-- > 0;) v = v * t + coeffs[i];
    return v;
  };
  k.g_prime = [coeffs](double t) {
    double v = 0.0;
    for (size_t i = coeffs.size(); i-- > 1;) v = v * t + i * coeffs[i];
    return v;
  };
  return k;
}

Kernel Kernel::zero() { return constant(0.0); }

void Kernel::check_finite_on(double t_end, int n_steps) const {
  if (!g || !g_prime) throw NonFiniteInput("Kernel: g or g_prime not set");
  auto probe = [this](double t) {
    if (!std::isfinite(g(t)) || !std::isfinite(g_prime(t)))
      throw NonFiniteInput("Kernel: non-finite value at t=" + std::to_string(t));
  };
  probe(0.0);
  probe(t_end);
  double delta = t_end / std::max(1, n_steps);
  for (int j = 0; j < n_steps; ++j) probe((j + 0.5) * delta);
  if (!std::isfinite(g0)) throw NonFiniteInput("Kernel: non-finite g(0)");
}

double QuadWeights::weight_sum() const {
  double s = 0.0;
  for (const QuadEntry& e : entries) s += e.weight;
  return s;
}

QuadWeights quad_weights(int k, double delta) {
  if (k < 0) throw std::invalid_argument("quad_weights: k must be >= 0");
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw std::invalid_argument("quad_weights: delta must be positive and finite");
  QuadWeights w;
  w.k = k;
  w.delta = delta;
  if (k == 0) {
    // the first interval is the trailing half step itself
    w.entries = {{0, 0.5 * delta, 0.25 * delta}, {0, 0.0, 0.125 * delta},
                 {1, 0.0, 0.125 * delta}};
    return w;
  }
  w.entries.reserve(k + 3);
  w.entries.push_back({0, (k + 0.5) * delta, 0.5 * delta});
  for (int j = 1; j < k; ++j) w.entries.push_back({j, (k - j + 0.5) * delta, delta});
  // whole-step trapezoid end + half-step start at t_k, then the averaged
  // half-step end split over nodes k and k+1
  w.entries.push_back({k, 0.5 * delta, 0.75 * delta});
  w.entries.push_back({k, 0.0, 0.125 * delta});
  w.entries.push_back({k + 1, 0.0, 0.125 * delta});
  return w;
}

History History::start(double delta, CoeffVec u0) {
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw std::invalid_argument("History: delta must be positive and finite");
  History h(delta);
  h.y_.push_back(CoeffVec(u0.size(), 0.0));  // y(0) = 0
  h.u_.push_back(std::move(u0));
  return h;
}

void History::append(CoeffVec u, CoeffVec y) {
  if (u.size() != u_[0].size() || y.size() != u_[0].size())
    throw std::invalid_argument("History::append: vector length mismatch");
  u_.push_back(std::move(u));
  y_.push_back(std::move(y));
}

const CoeffVec& History::u(int j) const {
  if (j < 0 || j >= size())
    throw MissingHistory("History: index " + std::to_string(j) + " not stored (size " +
                         std::to_string(size()) + ")");
  return u_[j];
}

const CoeffVec& History::y(int j) const {
  if (j < 0 || j >= size())
    throw MissingHistory("History: index " + std::to_string(j) + " not stored (size " +
                         std::to_string(size()) + ")");
  return y_[j];
}

namespace {

// shared accumulation for Q_g and Q_{g'}: sum_entries c * kern_fn(arg) * vec(node)
CoeffVec accumulate(const QuadWeights& w, const std::function<double(double)>& kern_fn,
                    const std::function<const CoeffVec&(int)>& vec) {
  CoeffVec acc(vec(0).size(), 0.0);
  for (const QuadEntry& e : w.entries) {
    double c = e.weight * kern_fn(e.arg);
    const CoeffVec& v = vec(e.node);
    for (size_t i = 0; i < acc.size(); ++i) acc[i] += c * v[i];
  }
  return acc;
}

}  // namespace

CoeffVec eval_Qg(const History& hist, const Kernel& kern, int k, const CoeffVec* y_next) {
  QuadWeights w = quad_weights(k, hist.delta());
  return accumulate(w, kern.g, [&](int j) -> const CoeffVec& {
    return (j == k + 1 && y_next) ? *y_next : hist.y(j);
  });
}

CoeffVec eval_Qgprime(const History& hist, const Kernel& kern, int k,
                      const CoeffVec* u_next) {
  QuadWeights w = quad_weights(k, hist.delta());
  return accumulate(w, kern.g_prime, [&](int j) -> const CoeffVec& {
    return (j == k + 1 && u_next) ? *u_next : hist.u(j);
  });
}

CoeffVec eval_If(const std::function<double(double, double)>& f, const Kernel& kern,
                 int k, double delta, const FeSpace& s) {
  QuadWeights w = quad_weights(k, delta);
  CoeffVec acc(s.n_dof(), 0.0);
  for (const QuadEntry& e : w.entries) {
    if (e.arg == 0.0) continue;  // the averaged tail pair, replaced below
    CoeffVec F = assemble_load(f, e.node * delta, s);
    double c = e.weight * kern.g(e.arg);
    for (size_t i = 0; i < acc.size(); ++i) acc[i] += c * F[i];
  }
  // f is known in closed form: sample the half-step end at t_{k+1/2} directly
  CoeffVec Fmid = assemble_load(f, (k + 0.5) * delta, s);
  double c = 0.25 * delta * kern.g0;
  for (size_t i = 0; i < acc.size(); ++i) acc[i] += c * Fmid[i];
  return acc;
}

}  // namespace plapmem
