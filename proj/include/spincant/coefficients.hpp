#pragma once

// Closed-form time-dependent coefficients of the spin-cantilever density
// matrix. Everything here is a pure function of (params, initial state, tau).
//
// The raw characteristic integrals f_i, g_i grow like e^{beta tau} and f_1,
// f_2 carry a 4/beta constant. The solution only ever needs
//   beta e^{-beta tau} F_i   and   e^{-beta tau/2} G_i,
// which stay bounded for all tau >= 0 and have a regular beta -> 0 limit, so
// those "damped" forms are evaluated directly and the raw ones are optional.

#include <cmath>
#include <complex>
#include <optional>

#include <Eigen/Core>
#include <Eigen/LU>

#include "spincant/errors.hpp"
#include "spincant/initial_state.hpp"
#include "spincant/params.hpp"

namespace spincant {

/// Above this beta*tau the raw growth terms are withheld (e^{700} ~ 1e304).
inline constexpr double kRawGrowthLimit = 700.0;

template <typename Scalar>
struct GrowthTerms {
  Scalar f1, f2, f3, g1, g2;
  Scalar cap_f1, cap_f2, cap_f3, cap_g1, cap_g2;  // x_i(tau) - x_i(0)
};

template <typename Scalar>
struct BasisCoefficients {
  Scalar tau;
  Scalar q1, q2, q3, p1, p2, p3;
  Scalar decay;       // e^{-beta tau}
  Scalar half_decay;  // e^{-beta tau / 2}
  // beta e^{-beta tau} F_i
  Scalar damped_cap_f1, damped_cap_f2, damped_cap_f3;
  // e^{-beta tau / 2} G_i
  Scalar damped_cap_g1, damped_cap_g2;
  // Present only for beta > 0 and beta*tau <= kRawGrowthLimit.
  std::optional<GrowthTerms<Scalar>> raw;
};

template <typename Scalar>
struct DiagonalCoefficients {
  Scalar sigma_star_sq;
  Scalar b1;
  Scalar b2_up, b2_down;
  Scalar c1;
  Scalar c2_up, c2_down;

  Scalar b2(double s) const { return s > 0 ? b2_up : b2_down; }
  Scalar c2(double s) const { return s > 0 ? c2_up : c2_down; }
};

/// Coefficients of the (+1/2, -1/2) block. The (-1/2, +1/2) block follows by
/// eta -> -eta; none of these fields depend on eta.
template <typename Scalar>
struct OffDiagonalCoefficients {
  Scalar sigma_star_sq;
  Scalar c12, c11, c10, c21, c20;
  Scalar b11, b10, b20;
  Scalar sigma_tilde_sq;
  Scalar r0;
  Scalar xi;
};

namespace detail {

template <typename Scalar>
void check_tau(Scalar tau) {
  if (!(tau >= Scalar(0)) || !std::isfinite(static_cast<double>(tau)))
    throw DomainError("tau", "must be finite and >= 0");
}

template <typename Scalar>
using Mat2 = Eigen::Matrix<Scalar, 2, 2>;
template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;

/// Rows map (k, r) at time tau onto the characteristic constants (c1, c2),
/// up to the common e^{-beta tau/2}.
template <typename Scalar>
Mat2<Scalar> characteristic_map(const BasisCoefficients<Scalar>& b) {
  Mat2<Scalar> m;
  m << b.q1, b.q2, b.p1, b.p2;
  return m;
}

/// Damped quadratic form of the pulled-back initial Gaussian plus the
/// thermal integral, in (c1, c2): e^{-beta tau} A0 + D beta e^{-beta tau} F.
template <typename Scalar>
Mat2<Scalar> damped_quadratic_form(const DimensionlessParams& p,
                                   const BasisCoefficients<Scalar>& b) {
  const Scalar beta = p.beta, theta = p.theta, d = p.big_d;
  Mat2<Scalar> a;
  a(0, 0) = b.decay * (beta * beta / 16 + Scalar(0.25)) + d * b.damped_cap_f1;
  a(0, 1) = b.decay * (beta * theta / 8) + d * b.damped_cap_f3;
  a(1, 0) = a(0, 1);
  a(1, 1) = b.decay * (theta * theta / 4) + d * b.damped_cap_f2;
  return a;
}

}  // namespace detail

template <typename Scalar>
BasisCoefficients<Scalar> eval_basis(const DimensionlessParams& p, Scalar tau) {
  using std::cos;
  using std::exp;
  using std::expm1;
  using std::sin;
  detail::check_tau(tau);
  const Scalar beta = p.beta;
  // Recompute theta in Scalar precision.
  const Scalar theta = std::sqrt((Scalar(1) - beta / 2) * (Scalar(1) + beta / 2));
  const Scalar c = cos(theta * tau), s = sin(theta * tau);

  BasisCoefficients<Scalar> b;
  b.tau = tau;
  b.q1 = (beta / 2 * s + theta * c) / theta;
  b.q2 = -s / theta;
  b.p1 = (-beta / 2 * c + theta * s) / theta;
  b.p2 = c / theta;
  b.q3 = 2 / theta * (-beta * (beta / 2 * s + theta * c) + s);
  b.p3 = 2 / theta * (beta * (beta / 2 * c - theta * s) - c);

  const Scalar bt = beta * tau;
  b.half_decay = exp(-bt / 2);
  b.decay = b.half_decay * b.half_decay;

  // F_i = 1/2 I0 + alpha Ic - gamma Is (and permutations), with
  // I0 = int e^{beta t}, Ic + i Is = int e^{(beta + 2 i theta) t} over [0, tau].
  const Scalar alpha = beta * beta / 4 - Scalar(0.5);
  const Scalar gamma = beta * theta / 2;
  const std::complex<Scalar> rate(beta, 2 * theta);
  const std::complex<Scalar> rot(cos(2 * theta * tau), sin(2 * theta * tau));

  // beta e^{-beta tau} I0 = 1 - e^{-beta tau}; same scaling for (Ic, Is).
  const Scalar j0 = -expm1(-bt);
  const std::complex<Scalar> jcs = beta * (rot - b.decay) / rate;
  b.damped_cap_f1 = j0 / 2 + alpha * jcs.real() - gamma * jcs.imag();
  b.damped_cap_f2 = j0 / 2 - alpha * jcs.real() + gamma * jcs.imag();
  b.damped_cap_f3 = alpha * jcs.imag() + gamma * jcs.real();
  b.damped_cap_g1 = c - b.half_decay;
  b.damped_cap_g2 = s;

  if (beta > 0 && bt <= Scalar(kRawGrowthLimit)) {
    const Scalar growth = exp(bt);
    const Scalar i0 = bt > Scalar(0) ? expm1(bt) / beta : tau;
    const std::complex<Scalar> ics = (growth * rot - Scalar(1)) / rate;
    GrowthTerms<Scalar> g;
    g.cap_f1 = i0 / 2 + alpha * ics.real() - gamma * ics.imag();
    g.cap_f2 = i0 / 2 - alpha * ics.real() + gamma * ics.imag();
    g.cap_f3 = alpha * ics.imag() + gamma * ics.real();
    g.f1 = g.cap_f1 + (4 / beta + beta) / 8;
    g.f2 = g.cap_f2 + (4 / beta - beta) / 8;
    g.f3 = g.cap_f3 + theta / 4;
    g.g1 = exp(bt / 2) * c;
    g.g2 = exp(bt / 2) * s;
    g.cap_g1 = g.g1 - 1;
    g.cap_g2 = g.g2;
    b.raw = g;
  }
  return b;
}

template <typename Scalar>
DiagonalCoefficients<Scalar> eval_diagonal(const DimensionlessParams& p, const InitialState& init,
                                           const BasisCoefficients<Scalar>& b) {
  using namespace detail;
  const Mat2<Scalar> pm = characteristic_map(b);
  const Mat2<Scalar> a = damped_quadratic_form(p, b);
  const Mat2<Scalar> h = pm.transpose() * a * pm;

  const Scalar beta = p.beta, theta = p.theta, eta = p.eta;
  const Scalar z0 = init.z0, p0 = init.p0;
  const Vec2<Scalar> u(p0 * beta / 2 + z0, p0 * theta);
  const Vec2<Scalar> g(b.damped_cap_g1, b.damped_cap_g2);
  const Vec2<Scalar> free_part = b.half_decay * (pm.transpose() * u);
  const Vec2<Scalar> spin_part = 2 * eta * (pm.transpose() * g);  // times s

  DiagonalCoefficients<Scalar> d;
  d.sigma_star_sq = h(0, 0);
  d.b1 = 2 * h(0, 1);
  d.c1 = h(1, 1);
  d.b2_up = free_part(0) + spin_part(0) / 2;
  d.b2_down = free_part(0) - spin_part(0) / 2;
  d.c2_up = free_part(1) + spin_part(1) / 2;
  d.c2_down = free_part(1) - spin_part(1) / 2;
  return d;
}

template <typename Scalar>
DiagonalCoefficients<Scalar> eval_diagonal(const DimensionlessParams& p, const InitialState& init,
                                           Scalar tau) {
  return eval_diagonal(p, init, eval_basis(p, tau));
}

template <typename Scalar>
OffDiagonalCoefficients<Scalar> eval_offdiagonal(const DimensionlessParams& p,
                                                 const InitialState& init,
                                                 const BasisCoefficients<Scalar>& b) {
  using namespace detail;
  const Mat2<Scalar> pm = characteristic_map(b);
  const Mat2<Scalar> a = damped_quadratic_form(p, b);
  const Mat2<Scalar> h = pm.transpose() * a * pm;
  const Vec2<Scalar> w(b.q3, b.p3);

  const Scalar beta = p.beta, theta = p.theta, d = p.big_d;
  const Scalar z0 = init.z0, p0 = init.p0;
  // Linear (in c) terms from the shifted initial Gaussian and the cross term
  // of the thermal integral, already damped by e^{-beta tau/2}.
  const Vec2<Scalar> lin(b.half_decay * (3 * beta / 8) + d * beta * b.damped_cap_g1,
                         b.half_decay * (theta / 4) + d * beta * b.damped_cap_g2);
  const Vec2<Scalar> u(p0 * beta / 2 + z0, p0 * theta);

  const Vec2<Scalar> aw = pm.transpose() * (a * w);
  const Vec2<Scalar> pl = pm.transpose() * lin;
  const Vec2<Scalar> pu = b.half_decay * (pm.transpose() * u);

  OffDiagonalCoefficients<Scalar> o;
  o.sigma_star_sq = h(0, 0);
  o.b11 = 2 * h(0, 1);
  o.c12 = h(1, 1);
  o.c11 = 2 * aw(1) + 4 * pl(1);
  o.b10 = 2 * aw(0) + 4 * pl(0);
  o.c10 = w.dot(a * w) + 4 * w.dot(lin) + (Scalar(1) + beta * beta + 4 * d * beta * b.tau);
  o.c21 = pu(1);
  o.b20 = pu(0);
  o.c20 = b.half_decay * u.dot(w) + 2 * (p0 + z0 * beta);

  // Peak of |rho_{+-}|: maximise the real exponent over the characteristic
  // constants y = P x + eta w instead of (R, r). This avoids the small
  // difference 4 sigma_*^2 c12 - b11^2 when the packet is strongly squeezed.
  const Mat2<Scalar> pm_inv = pm.inverse();
  if (d == Scalar(0)) {
    // a and lin carry e^{-beta tau} and e^{-beta tau/2} exactly; divide them
    // out so xi survives the underflow. r0 and sigma_tilde_sq grow like
    // e^{beta tau/2}, e^{beta tau} here and overflow honestly.
    Mat2<Scalar> a0;
    a0 << beta * beta / 16 + Scalar(0.25), beta * theta / 8, beta * theta / 8, theta * theta / 4;
    const Vec2<Scalar> lin0(3 * beta / 8, theta / 4);
    const Vec2<Scalar> a0_inv_lin = a0.inverse() * lin0;
    o.sigma_tilde_sq = (pm_inv * a0.inverse() * pm_inv.transpose())(1, 1) / (2 * b.decay);
    o.r0 = (pm_inv * (w + 2 * a0_inv_lin / b.half_decay))(1);
    o.xi = 4 * lin0.dot(a0_inv_lin) - (Scalar(1) + beta * beta);
    return o;
  }
  const Mat2<Scalar> a_inv = a.inverse();
  const Vec2<Scalar> a_inv_lin = a_inv * lin;
  o.sigma_tilde_sq = (pm_inv * a_inv * pm_inv.transpose())(1, 1) / 2;
  o.r0 = (pm_inv * (w + 2 * a_inv_lin))(1);
  o.xi = 4 * lin.dot(a_inv_lin) - (Scalar(1) + beta * beta + 4 * d * beta * b.tau);
  return o;
}

template <typename Scalar>
OffDiagonalCoefficients<Scalar> eval_offdiagonal(const DimensionlessParams& p,
                                                 const InitialState& init, Scalar tau) {
  return eval_offdiagonal(p, init, eval_basis(p, tau));
}

}  // namespace spincant
