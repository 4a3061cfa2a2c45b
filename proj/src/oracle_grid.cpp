#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "spincant/errors.hpp"
#include "spincant/oracle.hpp"

namespace spincant::oracle {

namespace {

using cd = std::complex<double>;

// Field stored with a one-cell zero border; element (i, j) of the interior
// lives at (i + 1) * stride + (j + 1).
struct Padded {
  long n = 0, stride = 0;
  std::vector<cd> data;
  explicit Padded(long n_ = 0) : n(n_), stride(n_ + 2), data(static_cast<size_t>((n_ + 2) * (n_ + 2))) {}
  cd& at(long i, long j) { return data[static_cast<size_t>((i + 1) * stride + j + 1)]; }
  const cd& at(long i, long j) const { return data[static_cast<size_t>((i + 1) * stride + j + 1)]; }
  cd* row(long i) { return data.data() + (i + 1) * stride + 1; }
  const cd* row(long i) const { return data.data() + (i + 1) * stride + 1; }
};

struct BlockModel {
  bool hermitian = false;       // evolve j >= i only and mirror
  std::vector<double> phi_row;  // phi_s(z_i)
  std::vector<double> phi_col;  // phi_s'(z_j)
};

struct Stepper {
  long n;
  double kappa;              // 1 / (2 dz^2)
  double friction;           // -beta / 4
  std::vector<double> diff;  // -D beta dz^2 m^2 for m = |i - j|

  // One fused RK4 stage: k = f(in); acc = (First ? y : acc) + w k;
  // out = y + c k when HasOut.
  template <bool First, bool HasOut>
  void stage(const BlockModel& m, const Padded& y, const Padded& in, Padded& acc, Padded* out,
             double w, double c) const {
    const double kap = kappa;
#pragma omp parallel for schedule(dynamic, 4)
    for (long i = 0; i < n; ++i) {
      const long j0 = m.hermitian ? i : 0;
      const double* up = reinterpret_cast<const double*>(in.row(i - 1));
      const double* mid = reinterpret_cast<const double*>(in.row(i));
      const double* dn = reinterpret_cast<const double*>(in.row(i + 1));
      const double* yr = reinterpret_cast<const double*>(y.row(i));
      double* ar = reinterpret_cast<double*>(acc.row(i));
      double* orow = HasOut ? reinterpret_cast<double*>(out->row(i)) : nullptr;
      const double phi_i = m.phi_row[static_cast<size_t>(i)];
      const double* phc = m.phi_col.data();
      const double* dif = diff.data();
      for (long j = j0; j < n; ++j) {
        const long re = 2 * j, im = 2 * j + 1;
        const double ipr = dn[re], ipi = dn[im];
        const double imr = up[re], imi = up[im];
        const double jpr = mid[re + 2], jpi = mid[im + 2];
        const double jmr = mid[re - 2], jmi = mid[im - 2];
        const double s1r = (ipr + imr) - (jpr + jmr);
        const double s1i = (ipi + imi) - (jpi + jmi);
        const double s2r = (ipr - imr) - (jpr - jmr);
        const double s2i = (ipi - imi) - (jpi - jmi);
        const long dij = i - j;
        const double a = friction * static_cast<double>(dij);
        const double vr = dif[dij >= 0 ? dij : -dij];
        const double vi = phi_i - phc[j];
        const double rr = mid[re], ri = mid[im];
        const double kr = -kap * s1i + a * s2r + vr * rr - vi * ri;
        const double ki = kap * s1r + a * s2i + vr * ri + vi * rr;
        if constexpr (First) {
          ar[re] = yr[re] + w * kr;
          ar[im] = yr[im] + w * ki;
        } else {
          ar[re] += w * kr;
          ar[im] += w * ki;
        }
        if constexpr (HasOut) {
          orow[re] = yr[re] + c * kr;
          orow[im] = yr[im] + c * ki;
        }
      }
    }
  }
};

void mirror_lower(Padded& f) {
  const long n = f.n;
#pragma omp parallel for schedule(static)
  for (long i = 1; i < n; ++i)
    for (long j = 0; j < i; ++j) f.at(i, j) = std::conj(f.at(j, i));
}

double max_abs(const Padded& f) {
  double m = 0.0;
  for (const cd& v : f.data) m = std::max(m, std::norm(v));
  return std::sqrt(m);
}

}  // namespace

double grid_required_half_width(const DimensionlessParams& p, const InitialState& init) {
  return 3.0 * p.eta + 5.0 + std::fabs(init.z0) + std::fabs(init.p0);
}

double GridRun::max_trace_drift_rate() const {
  double worst = 0.0;
  if (frames.empty()) return worst;
  const double t0 = frames.front().trace_up + frames.front().trace_down;
  for (const auto& f : frames) {
    if (f.tau <= frames.front().tau) continue;
    const double drift = std::fabs(f.trace_up + f.trace_down - t0);
    worst = std::max(worst, drift / (f.tau - frames.front().tau));
  }
  return worst;
}

GridRun grid_solver(const DimensionlessParams& p, const InitialState& init,
                    const GridRunSpec& spec) {
  init.validate();
  if (p.eta > spec.max_eta)
    throw DomainError("eta", "grid oracle limited to eta <= " + std::to_string(spec.max_eta));
  if (spec.points < 8) throw DomainError("points", "must be >= 8");
  const double need = grid_required_half_width(p, init);
  if (!(spec.half_width >= need))
    throw DomainError("half_width", "domain must cover [-" + std::to_string(need) + ", " +
                                        std::to_string(need) + "]");
  if (spec.output_taus.empty()) throw DomainError("output_taus", "must not be empty");
  for (size_t i = 0; i < spec.output_taus.size(); ++i) {
    const double t = spec.output_taus[i];
    if (!(t >= 0) || !std::isfinite(t) || (i > 0 && !(t > spec.output_taus[i - 1])))
      throw DomainError("output_taus", "must be finite, >= 0 and strictly ascending");
  }
  if (spec.dtau < 0 || !std::isfinite(spec.dtau)) throw DomainError("dtau", "must be >= 0");

  const long n = static_cast<long>(spec.points);
  GridRun run;
  run.spec = spec;
  const double width = spec.half_width;
  run.dz = 2.0 * width / static_cast<double>(n - 1);
  const double dz = run.dz;
  std::vector<double> z(static_cast<size_t>(n));
  for (long i = 0; i < n; ++i) z[static_cast<size_t>(i)] = run.z_at(i);

  const auto phi = [&](double x, double s) { return -0.5 * x * x + 2.0 * p.eta * s * x; };
  BlockModel models[3];  // up_up, down_down, up_down
  const double spins[3][2] = {{0.5, 0.5}, {-0.5, -0.5}, {0.5, -0.5}};
  double max_phase = 0.0;
  for (int b = 0; b < 3; ++b) {
    models[b].hermitian = b < 2;
    models[b].phi_row.resize(static_cast<size_t>(n));
    models[b].phi_col.resize(static_cast<size_t>(n));
    double lo = 1e300, hi = -1e300, clo = 1e300, chi = -1e300;
    for (long i = 0; i < n; ++i) {
      const double a = phi(z[static_cast<size_t>(i)], spins[b][0]);
      const double c = phi(z[static_cast<size_t>(i)], spins[b][1]);
      models[b].phi_row[static_cast<size_t>(i)] = a;
      models[b].phi_col[static_cast<size_t>(i)] = c;
      lo = std::min(lo, a); hi = std::max(hi, a); clo = std::min(clo, c); chi = std::max(chi, c);
    }
    max_phase = std::max({max_phase, std::fabs(hi - clo), std::fabs(chi - lo)});
  }

  Stepper st;
  st.n = n;
  st.kappa = 1.0 / (2.0 * dz * dz);
  st.friction = -p.beta / 4.0;
  st.diff.resize(static_cast<size_t>(n));
  for (long m = 0; m < n; ++m) {
    const double sep = dz * static_cast<double>(m);
    st.diff[static_cast<size_t>(m)] = -p.big_d * p.beta * sep * sep;
  }

  // Spectral radius bound: kinetic 2/dz^2, phases, the advective term
  // (beta/4)|i - j| * 2 and decay D beta (2L)^2. RK4 covers |lambda dtau| < 2.5.
  const double lam = 2.0 / (dz * dz) + max_phase + p.beta / 2.0 * static_cast<double>(n - 1) +
                     p.big_d * p.beta * 4.0 * width * width;
  run.stability_estimate = lam;
  const double dtau_max = spec.dtau > 0 ? spec.dtau : 0.5 * (2.5 / lam);
  if (dtau_max * lam > 2.5)
    throw InstabilityError("dtau " + std::to_string(dtau_max) + " exceeds stability bound " +
                           std::to_string(2.5 / lam));

  // Blocks: 0 = up_up, 1 = down_down, 2 = up_down. down_up is the adjoint of up_down.
  std::vector<Padded> y(3, Padded(n)), acc(3, Padded(n)), ta(3, Padded(n)), tb(3, Padded(n));
  const double norm = 1.0 / std::sqrt(M_PI);
  const cd amps[3] = {std::norm(init.amp_up), std::norm(init.amp_down),
                      init.amp_up * std::conj(init.amp_down)};
  for (int b = 0; b < 3; ++b)
    for (long i = 0; i < n; ++i)
      for (long j = 0; j < n; ++j) {
        const double zi = z[static_cast<size_t>(i)], zj = z[static_cast<size_t>(j)];
        const double mag = -0.5 * ((zi - init.z0) * (zi - init.z0) + (zj - init.z0) * (zj - init.z0));
        y[b].at(i, j) = amps[b] * norm * std::exp(cd(mag, init.p0 * (zi - zj)));
      }
  double initial_max = 0.0;
  for (int b = 0; b < 3; ++b) initial_max = std::max(initial_max, max_abs(y[b]));

  long ti = 0, tj = 0;  // tracked off-diagonal peak
  const auto record = [&](double tau) {
    GridFrame f;
    f.tau = tau;
    double tu = 0, td = 0, mu = 0, md = 0, herm = 0;
    for (long i = 0; i < n; ++i) {
      const cd u = y[0].at(i, i), d = y[1].at(i, i);
      tu += u.real();
      td += d.real();
      mu += z[static_cast<size_t>(i)] * u.real();
      md += z[static_cast<size_t>(i)] * d.real();
      herm = std::max({herm, std::fabs(u.imag()), std::fabs(d.imag())});
    }
    for (int b = 0; b < 2; ++b)
      for (long i = 0; i < n; ++i)
        for (long j = i + 1; j < n; ++j)
          herm = std::max(herm, std::abs(y[b].at(i, j) - std::conj(y[b].at(j, i))));
    f.trace_up = tu * dz;
    f.trace_down = td * dz;
    f.mean_z_up = tu != 0 ? mu / tu : 0.0;
    f.mean_z_down = td != 0 ? md / td : 0.0;
    f.hermiticity_residual = herm;
    double best = -1;
    for (long i = 0; i < n; ++i)
      for (long j = 0; j < n; ++j) {
        const double v = std::norm(y[2].at(i, j));
        if (v > best) {
          best = v;
          f.offdiag_peak_z = z[static_cast<size_t>(i)];
          f.offdiag_peak_zp = z[static_cast<size_t>(j)];
        }
      }
    f.offdiag_peak = std::sqrt(best);
    if (run.frames.empty()) {
      ti = static_cast<long>(std::lround((f.offdiag_peak_z + width) / dz));
      tj = static_cast<long>(std::lround((f.offdiag_peak_zp + width) / dz));
    }
    for (bool moved = true; moved;) {
      moved = false;
      long bi = ti, bj = tj;
      for (long di = -1; di <= 1; ++di)
        for (long dj = -1; dj <= 1; ++dj) {
          const long ni = ti + di, nj = tj + dj;
          if (ni < 0 || nj < 0 || ni >= n || nj >= n) continue;
          if (std::norm(y[2].at(ni, nj)) > std::norm(y[2].at(bi, bj))) bi = ni, bj = nj;
        }
      if (bi != ti || bj != tj) ti = bi, tj = bj, moved = true;
    }
    f.tracked_peak = std::abs(y[2].at(ti, tj));
    f.tracked_peak_z = z[static_cast<size_t>(ti)];
    f.tracked_peak_zp = z[static_cast<size_t>(tj)];
    const bool want_fields =
        spec.keep_fields || std::any_of(spec.field_taus.begin(), spec.field_taus.end(),
                                        [&](double t) { return std::fabs(t - tau) <= 1e-12; });
    if (want_fields) {
      std::array<Eigen::ArrayXXcd, 4> fields;
      for (auto& a : fields) a.resize(n, n);
      for (long i = 0; i < n; ++i)
        for (long j = 0; j < n; ++j) {
          fields[0](i, j) = y[0].at(i, j);
          fields[1](i, j) = y[2].at(i, j);
          fields[2](i, j) = std::conj(y[2].at(j, i));
          fields[3](i, j) = y[1].at(i, j);
        }
      f.fields = std::move(fields);
    }
    run.frames.push_back(std::move(f));
  };

  const auto check_growth = [&](double tau) {
    for (int b = 0; b < 3; ++b)
      if (max_abs(y[b]) > 10.0 * initial_max)
        throw InstabilityError("grid solver unstable at tau " + std::to_string(tau) +
                               " (dtau " + std::to_string(run.dtau) + ", dz " +
                               std::to_string(dz) + "): reduce dtau or resolution");
  };

  double tau = 0.0;
  for (double target : spec.output_taus) {
    const double span = target - tau;
    if (span > 0) {
      const long steps = std::max(1L, static_cast<long>(std::ceil(span / dtau_max - 1e-9)));
      const double h = span / static_cast<double>(steps);
      run.dtau = std::max(run.dtau, h);
      for (long s = 0; s < steps; ++s) {
        for (int b = 0; b < 3; ++b) {
          const BlockModel& m = models[b];
          st.stage<true, true>(m, y[b], y[b], acc[b], &ta[b], h / 6, h / 2);
          if (m.hermitian) mirror_lower(ta[b]);
          st.stage<false, true>(m, y[b], ta[b], acc[b], &tb[b], h / 3, h / 2);
          if (m.hermitian) mirror_lower(tb[b]);
          st.stage<false, true>(m, y[b], tb[b], acc[b], &ta[b], h / 3, h);
          if (m.hermitian) mirror_lower(ta[b]);
          st.stage<false, false>(m, y[b], ta[b], acc[b], nullptr, h / 6, 0.0);
          std::swap(y[b].data, acc[b].data);
          if (m.hermitian) mirror_lower(y[b]);
        }
        ++run.steps;
        if (run.steps % 64 == 0) check_growth(tau + h * static_cast<double>(s + 1));
      }
      tau = target;
      check_growth(tau);
    }
    record(target);
  }
  return run;
}

}  // namespace spincant::oracle
