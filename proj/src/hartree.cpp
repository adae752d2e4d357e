#include "mfl/hartree.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mfl/fock.hpp"

namespace mfl {

InteractionModel::InteractionModel(ComplexMatrix h, ComplexMatrix v, double hbar)
    : h_(std::move(h)), v_(std::move(v)), hbar_(hbar) {
  if (!(hbar_ > 0.0) || !std::isfinite(hbar_)) {
    throw Error(ErrorKind::InvalidConfig, "InteractionModel: hbar must be finite and > 0");
  }
  if (h_.rows() != h_.cols() || h_.rows() == 0) {
    throw Error(ErrorKind::ShapeError, "InteractionModel: h must be square");
  }
  if (!is_hermitian(h_)) throw Error(ErrorKind::NotHermitian, "InteractionModel: h");
  const int d = modes();
  validate_pair_potential(v_, d, "InteractionModel");
  h_ = hermitian_part(h_);
  v_ = hermitian_part(v_);
  v_inf_ = op_norm(v_);

  const ComplexMatrix off = v_ - ComplexMatrix(v_.diagonal().asDiagonal());
  if (off.cwiseAbs().maxCoeff() == 0.0 && v_.diagonal().imag().cwiseAbs().maxCoeff() == 0.0) {
    diagonal_pair_ = true;
    w_.resize(d, d);
    for (int x = 0; x < d; ++x)
      for (int y = 0; y < d; ++y) w_(x, y) = v_(x * d + y, x * d + y).real();
  }
}

InteractionModel InteractionModel::from_pair_table(ComplexMatrix h, const Eigen::MatrixXd& w,
                                                   double hbar) {
  const auto d = w.rows();
  if (w.cols() != d || h.rows() != d) {
    throw Error(ErrorKind::ShapeError, "from_pair_table: table must be d x d");
  }
  if ((w - w.transpose()).cwiseAbs().maxCoeff() != 0.0) {
    throw Error(ErrorKind::NotSwapSymmetric, "from_pair_table: w(x,y) != w(y,x)");
  }
  ComplexMatrix v = ComplexMatrix::Zero(d * d, d * d);
  for (Index x = 0; x < d; ++x)
    for (Index y = 0; y < d; ++y) v(x * d + y, x * d + y) = w(x, y);
  return InteractionModel(std::move(h), std::move(v), hbar);
}

InteractionModel InteractionModel::in_frame(const ComplexMatrix& frame) const {
  return InteractionModel(hermitian_part(to_frame(h_, frame, 1)),
                          hermitian_part(to_frame(v_, frame, 2)), hbar_);
}

ComplexMatrix mean_field(const InteractionModel& model, const ComplexMatrix& rho) {
  const int d = model.modes();
  if (rho.rows() != d || rho.cols() != d) throw Error(ErrorKind::ShapeError, "mean_field: ρ is not d x d");
  if (model.diagonal_pair()) {
    const RealVector n = rho.diagonal().real();
    return ComplexMatrix((model.pair_table() * n).cast<Complex>().asDiagonal());
  }
  // m_{x x'} = Σ_{y y'} V_{(x y),(x' y')} ρ_{y' y}
  const ComplexMatrix& v = model.v();
  ComplexMatrix m = ComplexMatrix::Zero(d, d);
  for (int x = 0; x < d; ++x)
    for (int xp = 0; xp < d; ++xp) {
      Complex acc = 0.0;
      for (int y = 0; y < d; ++y)
        for (int yp = 0; yp < d; ++yp) acc += v(x * d + y, xp * d + yp) * rho(yp, y);
      m(x, xp) = acc;
    }
  return m;
}

double energy(const InteractionModel& model, const ComplexMatrix& rho) {
  const Complex e = (model.h() * rho).trace() + 0.5 * (mean_field(model, rho) * rho).trace();
  if (std::abs(e.imag()) > 1e-10 * std::max(1.0, std::abs(e.real()))) {
    throw Error(ErrorKind::NotHermitian, "energy: complex value " + std::to_string(e.imag()));
  }
  return e.real();
}

ComplexMatrix hartree_rhs(const InteractionModel& model, const ComplexMatrix& rho) {
  const ComplexMatrix hr = model.h() + mean_field(model, rho);
  return (-kI / model.hbar()) * commutator(hr, rho);
}

ComplexMatrix free_flow(const InteractionModel& model, const ComplexMatrix& rho, double t) {
  return propagate(model.h(), -t, model.hbar(), rho);
}

double default_rk4_step(const InteractionModel& model) {
  if (model.v_inf() == 0.0) return 1e-3;
  return std::min(1e-3, model.hbar() / (8.0 * model.v_inf()) / 200.0);
}

namespace {

ComplexMatrix rk4_step(const InteractionModel& model, const ComplexMatrix& rho, double dt) {
  const ComplexMatrix k1 = hartree_rhs(model, rho);
  const ComplexMatrix k2 = hartree_rhs(model, rho + 0.5 * dt * k1);
  const ComplexMatrix k3 = hartree_rhs(model, rho + 0.5 * dt * k2);
  const ComplexMatrix k4 = hartree_rhs(model, rho + dt * k3);
  return hermitian_part(rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

ComplexMatrix rk4_evolve(const InteractionModel& model, ComplexMatrix rho, double t, double step) {
  if (t == 0.0) return rho;
  const auto n = static_cast<long>(std::ceil(std::abs(t) / step - 1e-9));
  const double dt = t / static_cast<double>(std::max(1L, n));
  for (long i = 0; i < std::max(1L, n); ++i) rho = rk4_step(model, rho, dt);
  return rho;
}

// Running integral G_k = ∫_0^{t_k} f on an equally spaced grid, cubic
// interpolation on each interval (fourth order, like composite Simpson).
std::vector<ComplexMatrix> cumulative_integral(const std::vector<ComplexMatrix>& f, double h) {
  const std::size_t m = f.size() - 1;
  std::vector<ComplexMatrix> g(f.size());
  g[0] = ComplexMatrix::Zero(f[0].rows(), f[0].cols());
  for (std::size_t k = 1; k <= m; ++k) {
    ComplexMatrix piece;
    if (k == 1) {
      piece = 9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3];
    } else if (k == m) {
      piece = f[m - 3] - 5.0 * f[m - 2] + 19.0 * f[m - 1] + 9.0 * f[m];
    } else {
      piece = -f[k - 2] + 13.0 * f[k - 1] + 13.0 * f[k] - f[k + 1];
    }
    g[k] = g[k - 1] + (h / 24.0) * piece;
  }
  return g;
}

std::vector<ComplexMatrix> duhamel_states(const InteractionModel& model,
                                          const std::vector<double>& times,
                                          const std::vector<ComplexMatrix>& states) {
  const double hbar = model.hbar();
  const HermitianSpectrum spec = eigh(model.h());
  // interaction-frame integrand g(s) = σ_{-s}([m(ρ_s), ρ_s])
  std::vector<ComplexMatrix> integrand(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    const ComplexMatrix c = commutator(mean_field(model, states[k]), states[k]);
    integrand[k] = propagate(spec, times[k], hbar, c);
  }
  const double h = times[1] - times[0];
  const std::vector<ComplexMatrix> g = cumulative_integral(integrand, h);
  std::vector<ComplexMatrix> out(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    out[k] = hermitian_part(propagate(spec, -times[k], hbar, states[0] - (kI / hbar) * g[k]));
  }
  return out;
}

double max_trace_distance(const std::vector<ComplexMatrix>& a, const std::vector<ComplexMatrix>& b,
                          std::size_t stride_b) {
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, trace_norm(a[k] - b[k * stride_b]));
  return worst;
}

}  // namespace

DensityMatrix evolve_hartree(const InteractionModel& model, const DensityMatrix& rho0, double t,
                             HartreeMethod method, const HartreeOptions& options) {
  if (rho0.dim() != model.modes()) throw Error(ErrorKind::ShapeError, "evolve_hartree: dimension");
  if (method == HartreeMethod::RK4) {
    const double step = options.step > 0.0 ? options.step : default_rk4_step(model);
    return DensityMatrix::unchecked(rk4_evolve(model, rho0.matrix(), t, step));
  }
  const Trajectory traj = picard_trajectory(model, rho0, t, options);
  return DensityMatrix::unchecked(traj.states.back());
}

Trajectory hartree_trajectory(const InteractionModel& model, const DensityMatrix& rho0, double t,
                              int samples, const HartreeOptions& options) {
  if (samples < 1) throw Error(ErrorKind::InvalidConfig, "hartree_trajectory: samples must be >= 1");
  const double step = options.step > 0.0 ? options.step : default_rk4_step(model);
  Trajectory out;
  out.times.push_back(0.0);
  out.states.push_back(rho0.matrix());
  for (int i = 1; i <= samples; ++i) {
    const double t0 = t * (i - 1) / samples;
    const double t1 = t * i / samples;
    out.times.push_back(t1);
    out.states.push_back(rk4_evolve(model, out.states.back(), t1 - t0, step));
  }
  return out;
}

Trajectory duhamel_map(const InteractionModel& model, const Trajectory& trajectory, double grid_tol) {
  const auto& times = trajectory.times;
  const std::size_t m = times.size() - 1;
  if (times.size() != trajectory.states.size() || times.size() < 7 || m % 2 != 0 ||
      times.front() != 0.0) {
    throw Error(ErrorKind::ShapeError,
                "duhamel_map: need an even number >= 6 of intervals starting at t = 0");
  }
  const double h = times[1] - times[0];
  for (std::size_t k = 1; k <= m; ++k) {
    if (std::abs(times[k] - times[k - 1] - h) > 1e-9 * std::max(1.0, std::abs(h))) {
      throw Error(ErrorKind::ShapeError, "duhamel_map: grid must be equally spaced");
    }
  }

  Trajectory out{times, duhamel_states(model, times, trajectory.states)};

  std::vector<double> half_times;
  std::vector<ComplexMatrix> half_states;
  for (std::size_t k = 0; k <= m; k += 2) {
    half_times.push_back(times[k]);
    half_states.push_back(trajectory.states[k]);
  }
  const std::vector<ComplexMatrix> coarse = duhamel_states(model, half_times, half_states);
  const double gap = max_trace_distance(coarse, out.states, 2);
  if (gap > grid_tol) {
    throw Error(ErrorKind::GridTooCoarse,
                "duhamel_map: half-grid discrepancy " + std::to_string(gap) + " > " +
                    std::to_string(grid_tol));
  }
  return out;
}

Trajectory picard_trajectory(const InteractionModel& model, const DensityMatrix& rho0, double t,
                             const HartreeOptions& options) {
  if (options.picard_intervals < 6 || options.picard_intervals % 2 != 0) {
    throw Error(ErrorKind::InvalidConfig, "picard_intervals must be even and >= 6");
  }
  Trajectory out;
  out.times.push_back(0.0);
  out.states.push_back(rho0.matrix());
  if (t == 0.0) return out;

  constexpr double kR = 2.0;
  const double window =
      model.v_inf() > 0.0 ? model.hbar() / (2.0 * model.v_inf() * kR) : std::abs(t);
  const auto windows = static_cast<long>(std::ceil(std::abs(t) / window - 1e-12));
  if (windows > options.max_windows) {
    throw Error(ErrorKind::PicardNoConvergence,
                "picard: " + std::to_string(windows) + " contraction windows exceed the limit");
  }
  const double span = t / static_cast<double>(windows);
  const int m = options.picard_intervals;

  for (long w = 0; w < windows; ++w) {
    const double offset = span * static_cast<double>(w);
    Trajectory local;
    for (int k = 0; k <= m; ++k) {
      local.times.push_back(span * k / m);
      local.states.push_back(free_flow(model, out.states.back(), local.times.back()));
    }
    bool converged = false;
    for (int it = 0; it < options.picard_max_iterations; ++it) {
      Trajectory next = duhamel_map(model, local, options.grid_tol);
      const double change = max_trace_distance(next.states, local.states, 1);
      local = std::move(next);
      if (change <= options.picard_tol) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      throw Error(ErrorKind::PicardNoConvergence,
                  "picard: no contraction within " + std::to_string(options.picard_max_iterations) +
                      " iterations in window " + std::to_string(w));
    }
    for (int k = 1; k <= m; ++k) {
      out.times.push_back(offset + local.times[k]);
      out.states.push_back(local.states[k]);
    }
  }
  return out;
}

}  // namespace mfl
