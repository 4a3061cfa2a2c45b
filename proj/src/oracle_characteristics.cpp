#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <string>

#include <Eigen/Dense>

#include "spincant/errors.hpp"
#include "spincant/oracle.hpp"

namespace spincant::oracle {

namespace {

using cd = std::complex<double>;

// The characteristic system is affine with constant coefficients, so the
// point reached from the end point (k, r) is affine in (k, r) and the
// accumulated log amplitude is quadratic. RK4 is run directly on those
// coefficient vectors; this equals tracing every end point at once.

struct Affine {
  double c = 0.0, k = 0.0, r = 0.0;
  double operator()(double kk, double rr) const { return c + k * kk + r * rr; }
};

Affine operator+(Affine a, const Affine& b) { return {a.c + b.c, a.k + b.k, a.r + b.r}; }
Affine operator*(double s, const Affine& a) { return {s * a.c, s * a.k, s * a.r}; }

LogDensityPoly operator+(LogDensityPoly a, const LogDensityPoly& b) {
  a.c0 += b.c0; a.ck += b.ck; a.cr += b.cr; a.ckk += b.ckk; a.ckr += b.ckr; a.crr += b.crr;
  return a;
}
LogDensityPoly operator*(cd s, LogDensityPoly a) {
  a.c0 *= s; a.ck *= s; a.cr *= s; a.ckk *= s; a.ckr *= s; a.crr *= s;
  return a;
}

LogDensityPoly product(const Affine& a, const Affine& b) {
  LogDensityPoly q;
  q.c0 = a.c * b.c;
  q.ck = a.c * b.k + a.k * b.c;
  q.cr = a.c * b.r + a.r * b.c;
  q.ckk = a.k * b.k;
  q.ckr = a.k * b.r + a.r * b.k;
  q.crr = a.r * b.r;
  return q;
}

LogDensityPoly linear(const Affine& a) {
  LogDensityPoly q;
  q.c0 = a.c; q.ck = a.k; q.cr = a.r;
  return q;
}

struct State {
  Affine k, r;
  LogDensityPoly log_amp;
};

State operator+(const State& a, const State& b) { return {a.k + b.k, a.r + b.r, a.log_amp + b.log_amp}; }
State operator*(double s, const State& a) { return {s * a.k, s * a.r, cd(s) * a.log_amp}; }

struct Rhs {
  double beta, d_beta, k_shift;  // dk/dtau = r - k_shift
  cd spin_phase;                 // 2 i eta s on the diagonal, 0 off it

  State operator()(const State& y) const {
    State d;
    d.k = y.r + Affine{-k_shift, 0, 0};
    d.r = beta * y.r + (-1.0) * y.k;
    d.log_amp = cd(-d_beta) * product(y.r, y.r) + spin_phase * linear(y.r);
    return d;
  }
};

Rhs make_rhs(const DimensionlessParams& p, Block block) {
  Rhs f{p.beta, p.big_d * p.beta, 0.0, cd(0.0)};
  switch (block) {
    case Block::up_up: f.spin_phase = cd(0.0, p.eta); break;
    case Block::down_down: f.spin_phase = cd(0.0, -p.eta); break;
    case Block::up_down: f.k_shift = 2.0 * p.eta; break;
    case Block::down_up: f.k_shift = -2.0 * p.eta; break;
  }
  return f;
}

/// Backward RK4 from tau to 0, then composition with the initial Gaussian.
LogDensityPoly integrate_poly(const DimensionlessParams& p, const InitialState& init, Block block,
                              double tau, double step, Affine* foot_k = nullptr,
                              Affine* foot_r = nullptr) {
  const Rhs f = make_rhs(p, block);
  State y{{0, 1, 0}, {0, 0, 1}, {}};
  const long n = std::max(1L, static_cast<long>(std::ceil(tau / step - 1e-12)));
  const double h = tau > 0 ? -tau / static_cast<double>(n) : 0.0;
  if (tau > 0) {
    for (long i = 0; i < n; ++i) {
      const State k1 = f(y);
      const State k2 = f(y + (h / 2) * k1);
      const State k3 = f(y + (h / 2) * k2);
      const State k4 = f(y + h * k3);
      y = y + (h / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
  }
  if (foot_k) *foot_k = y.k;
  if (foot_r) *foot_r = y.r;
  const LogDensityPoly initial = cd(0, init.p0) * linear(y.r) + cd(0, init.z0) * linear(y.k) +
                                 cd(-0.25) * product(y.r, y.r) + cd(-0.25) * product(y.k, y.k);
  return initial + cd(-1.0) * y.log_amp;
}

/// Norm-wise relative difference over the six coefficients.
double poly_difference(const LogDensityPoly& a, const LogDensityPoly& b) {
  const std::array<std::pair<cd, cd>, 6> pairs{{{a.c0, b.c0}, {a.ck, b.ck}, {a.cr, b.cr},
                                                {a.ckk, b.ckk}, {a.ckr, b.ckr}, {a.crr, b.crr}}};
  double diff = 0.0, norm = 0.0;
  for (const auto& [x, y] : pairs) {
    diff = std::max(diff, std::abs(x - y));
    norm = std::max(norm, std::abs(y));
  }
  return diff / std::max(norm, 1.0);
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

void check_inputs(double tau, double step) {
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw DomainError("tau", "must be finite and >= 0");
  if (!(step > 0.0) || !std::isfinite(step)) throw DomainError("step", "must be finite and > 0");
}

double eta_for_extraction(const DimensionlessParams& p) { return p.eta > 1e-6 ? p.eta : 1.0; }

}  // namespace

CharacteristicState trace_characteristic(const DimensionlessParams& p, const InitialState& init,
                                         Block block, double k, double r, double tau_end,
                                         double step) {
  check_inputs(tau_end, step);
  Affine fk, fr;
  const LogDensityPoly poly = integrate_poly(p, init, block, tau_end, step, &fk, &fr);
  return {fr(k, r), fk(k, r), poly(k, r)};
}

LogDensityPoly characteristic_poly(const DimensionlessParams& p, const InitialState& init,
                                   Block block, double tau, const CharacteristicOptions& opt) {
  check_inputs(tau, opt.step);
  const LogDensityPoly coarse = integrate_poly(p, init, block, tau, opt.step);
  if (!opt.certify) return coarse;
  const LogDensityPoly fine = integrate_poly(p, init, block, tau, opt.step / 2);
  const double e1 = poly_difference(coarse, fine);
  if (e1 <= opt.tolerance) return fine;
  const LogDensityPoly finer = integrate_poly(p, init, block, tau, opt.step / 4);
  const double e2 = poly_difference(fine, finer);
  const double order = e2 > 0 ? std::log2(e1 / e2) : 0.0;
  throw AccuracyError("characteristic integration: step-halving change " + sci(e1) +
                          " exceeds tolerance " + sci(opt.tolerance) + " at step " +
                          sci(opt.step) + " (measured order " + sci(order) + ")",
                      order);
}

DiagonalCoefficients<double> characteristic_diagonal(const DimensionlessParams& p,
                                                     const InitialState& init, double tau,
                                                     const CharacteristicOptions& opt) {
  const LogDensityPoly up = characteristic_poly(p, init, Block::up_up, tau, opt);
  const LogDensityPoly down = characteristic_poly(p, init, Block::down_down, tau, opt);
  DiagonalCoefficients<double> d;
  d.sigma_star_sq = -up.ckk.real();
  d.b1 = -up.ckr.real();
  d.c1 = -up.crr.real();
  d.b2_up = up.ck.imag();
  d.b2_down = down.ck.imag();
  d.c2_up = up.cr.imag();
  d.c2_down = down.cr.imag();
  return d;
}

OffDiagonalCoefficients<double> characteristic_offdiagonal(const DimensionlessParams& p,
                                                           const InitialState& init, double tau,
                                                           const CharacteristicOptions& opt) {
  DimensionlessParams q = p;
  q.eta = eta_for_extraction(p);
  const double eta = q.eta;
  const LogDensityPoly poly = characteristic_poly(q, init, Block::up_down, tau, opt);

  OffDiagonalCoefficients<double> o;
  o.sigma_star_sq = -poly.ckk.real();
  o.b11 = -poly.ckr.real();
  o.c12 = -poly.crr.real();
  o.b10 = -poly.ck.real() / eta;
  o.b20 = poly.ck.imag();
  o.c11 = -poly.cr.real() / eta;
  o.c21 = poly.cr.imag();
  o.c10 = -poly.c0.real() / (eta * eta);
  o.c20 = poly.c0.imag() / eta;

  const ModulusPeak peak = modulus_peak(poly);
  o.sigma_tilde_sq = -1.0 / peak.curvature_rr;
  o.r0 = -peak.r / eta;
  o.xi = peak.log_peak / (eta * eta);
  return o;
}

ModulusPeak modulus_peak(const LogDensityPoly& poly) {
  // int exp(a + b k - g k^2) dk = sqrt(pi / g) exp(a + b^2 / (4 g)); over R
  // (b = ck + ckr r - i R) its modulus peaks at exp(max_k Re[a + b k - g k^2]).
  // So the (R, r) maximum of log|rho| is the (k, r) maximum of Re poly.
  const double kk = poly.ckk.real(), kr = poly.ckr.real(), rr = poly.crr.real();
  Eigen::Matrix2d hess;
  hess << 2 * kk, kr, kr, 2 * rr;
  const Eigen::Vector2d grad(poly.ck.real(), poly.cr.real());
  const Eigen::Vector2d x = hess.fullPivLu().solve(-grad);

  ModulusPeak m;
  m.r = x(1);
  m.log_peak = poly.c0.real() + 0.5 * grad.dot(x);
  const cd g = -poly.ckk;
  const cd b = poly.ck + poly.ckr * m.r;
  m.big_r = b.imag() - b.real() / g.real() * g.imag();
  const cd inv = 1.0 / (4.0 * poly.ckk);
  m.curvature_RR = (0.5 / poly.ckk).real();
  m.curvature_rR = (cd(0, 2) * poly.ckr * inv).real();
  m.curvature_rr = 2 * rr - kr * kr / (2 * kk);
  return m;
}

double log_modulus_by_quadrature(const LogDensityPoly& poly, double big_r, double r, int points) {
  if (points < 3) throw DomainError("points", "must be >= 3");
  const cd lin = poly.ck + poly.ckr * r - cd(0, big_r);
  const cd base = poly.c0 + poly.cr * r + poly.crr * r * r;
  const double curv = -poly.ckk.real();
  if (!(curv > 0)) throw DomainError("poly", "k^2 coefficient must have negative real part");
  const double centre = lin.real() / (2 * curv);
  const double half_range = 12.0 / std::sqrt(2 * curv);
  const double dk = 2 * half_range / (points - 1);
  const auto exponent = [&](double k) { return base + lin * k + poly.ckk * k * k; };
  const cd peak = exponent(centre);
  cd sum = 0.0;
  for (int i = 0; i < points; ++i) {
    const double k = centre - half_range + dk * i;
    const double w = (i == 0 || i == points - 1) ? 0.5 : 1.0;
    sum += w * std::exp(exponent(k) - peak);
  }
  return peak.real() + std::log(std::abs(sum) * dk / (2 * M_PI));
}

LogDensityPoly closed_form_poly(const DimensionlessParams& p, const InitialState& init,
                                Block block, double tau) {
  LogDensityPoly q;
  if (block == Block::up_up || block == Block::down_down) {
    const double s = block == Block::up_up ? 0.5 : -0.5;
    const auto d = eval_diagonal(p, init, tau);
    q.ckk = -d.sigma_star_sq;
    q.ckr = -d.b1;
    q.crr = -d.c1;
    q.ck = cd(0, d.b2(s));
    q.cr = cd(0, d.c2(s));
    return q;
  }
  const auto o = eval_offdiagonal(p, init, tau);
  // The (-, +) block is the (+, -) block with eta -> -eta.
  const double eta = block == Block::up_down ? p.eta : -p.eta;
  q.ckk = -o.sigma_star_sq;
  q.ckr = -o.b11;
  q.crr = -o.c12;
  q.ck = cd(-eta * o.b10, o.b20);
  q.cr = cd(-eta * o.c11, o.c21);
  q.c0 = cd(-eta * eta * o.c10, eta * o.c20);
  return q;
}

BasisCoefficients<double> characteristic_basis(const DimensionlessParams& p, double tau,
                                               double step) {
  check_inputs(tau, step);
  const double beta = p.beta, theta = p.theta;
  // Two homogeneous solutions, constants (1, 0) and (0, 1), plus quadratures.
  std::array<double, 9> y{1.0, beta / 2, 0.0, theta, 0, 0, 0, 0, 0};
  const auto rhs = [beta](const std::array<double, 9>& v) {
    const double k1 = v[0], r1 = v[1], k2 = v[2], r2 = v[3];
    return std::array<double, 9>{r1, beta * r1 - k1, r2, beta * r2 - k2,
                                 r1 * r1, r2 * r2, r1 * r2, r1, r2};
  };
  const auto axpy = [](const std::array<double, 9>& a, double s, const std::array<double, 9>& b) {
    std::array<double, 9> out;
    for (size_t i = 0; i < 9; ++i) out[i] = a[i] + s * b[i];
    return out;
  };
  const long n = tau > 0 ? std::max(1L, static_cast<long>(std::ceil(tau / step - 1e-12))) : 0;
  const double h = n > 0 ? tau / static_cast<double>(n) : 0.0;
  for (long i = 0; i < n; ++i) {
    const auto k1 = rhs(y);
    const auto k2 = rhs(axpy(y, h / 2, k1));
    const auto k3 = rhs(axpy(y, h / 2, k2));
    const auto k4 = rhs(axpy(y, h, k3));
    for (size_t j = 0; j < 9; ++j) y[j] += h / 6 * (k1[j] + 2 * k2[j] + 2 * k3[j] + k4[j]);
  }

  const double grow = std::exp(beta * tau / 2);
  Eigen::Matrix2d phi;
  phi << y[0], y[2], y[1], y[3];
  const Eigen::Matrix2d m = grow * phi.inverse();

  BasisCoefficients<double> b;
  b.tau = tau;
  b.q1 = m(0, 0);
  b.q2 = m(0, 1);
  b.p1 = m(1, 0);
  b.p2 = m(1, 1);

  // Off-diagonal characteristic (eta = 1) through the origin at tau, as the
  // offset u = (k - 2 beta, r - 2) from its fixed point, carried in the frame
  // e^{beta (tau - t)/2} u where the backward flow is a pure rotation.
  double uk = -2.0 * beta, ur = -2.0;
  const auto frhs = [beta](double a, double c) { return std::pair{c - beta / 2 * a, beta / 2 * c - a}; };
  for (long i = 0; i < n; ++i) {
    const double hb = -h;
    const auto [a1, b1] = frhs(uk, ur);
    const auto [a2, b2] = frhs(uk + hb / 2 * a1, ur + hb / 2 * b1);
    const auto [a3, b3] = frhs(uk + hb / 2 * a2, ur + hb / 2 * b2);
    const auto [a4, b4] = frhs(uk + hb * a3, ur + hb * b3);
    uk += hb / 6 * (a1 + 2 * a2 + 2 * a3 + a4);
    ur += hb / 6 * (b1 + 2 * b2 + 2 * b3 + b4);
  }
  b.q3 = uk;
  b.p3 = (ur - beta * uk / 2) / theta;

  b.decay = std::exp(-beta * tau);
  b.half_decay = std::exp(-beta * tau / 2);
  const double cf1 = y[4], cf2 = y[5], cf3 = y[6], cg1 = y[7], cg2 = y[8];
  b.damped_cap_f1 = beta * b.decay * cf1;
  b.damped_cap_f2 = beta * b.decay * cf2;
  b.damped_cap_f3 = beta * b.decay * cf3;
  b.damped_cap_g1 = b.half_decay * cg1;
  b.damped_cap_g2 = b.half_decay * cg2;
  if (beta > 0 && beta * tau <= kRawGrowthLimit) {
    GrowthTerms<double> g;
    g.cap_f1 = cf1;
    g.cap_f2 = cf2;
    g.cap_f3 = cf3;
    g.cap_g1 = cg1;
    g.cap_g2 = cg2;
    g.f1 = cf1 + (4 / beta + beta) / 8;
    g.f2 = cf2 + (4 / beta - beta) / 8;
    g.f3 = cf3 + theta / 4;
    g.g1 = cg1 + 1;
    g.g2 = cg2;
    b.raw = g;
  }
  return b;
}

OrderMeasurement measure_rk4_order(const DimensionlessParams& p, const InitialState& init,
                                   double tau, std::span<const double> steps) {
  if (steps.size() < 2) throw DomainError("steps", "need at least two step sizes");
  OrderMeasurement out;
  std::vector<double> lx, ly;
  const LogDensityPoly exact = closed_form_poly(p, init, Block::up_down, tau);
  for (double h : steps) {
    check_inputs(tau, h);
    const double err = poly_difference(integrate_poly(p, init, Block::up_down, tau, h), exact);
    out.steps.push_back(h);
    out.errors.push_back(err);
    lx.push_back(std::log(h));
    ly.push_back(std::log(err));
  }
  const double n = static_cast<double>(lx.size());
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxy = 0, sxx = 0;
  for (size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  out.order = sxy / sxx;
  return out;
}

}  // namespace spincant::oracle
