#include "mfl/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <exception>
#include <fstream>
#include <ostream>
#include <sstream>

#include "mfl/bounds.hpp"
#include "mfl/nbody.hpp"
#include "mfl/poisson.hpp"
#include "mfl/random.hpp"

namespace mfl {

namespace {

[[noreturn]] void bad_config(const std::string& what) { throw Error(ErrorKind::InvalidConfig, what); }

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    bad_config(std::string("field '") + key + "': " + e.what());
  }
}

Eigen::MatrixXd real_table(const Json& j, const char* what) {
  if (!j.is_array() || j.empty() || !j.front().is_array()) {
    bad_config(std::string(what) + ": expected a nested array");
  }
  const auto rows = static_cast<Index>(j.size());
  const auto cols = static_cast<Index>(j.front().size());
  Eigen::MatrixXd m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    if (static_cast<Index>(j[r].size()) != cols) bad_config(std::string(what) + ": ragged rows");
    for (Index c = 0; c < cols; ++c) {
      if (!j[r][c].is_number()) bad_config(std::string(what) + ": non-numeric entry");
      m(r, c) = j[r][c].get<double>();
    }
  }
  return m;
}

// {"re": [[..]], "im": [[..]]} or a bare real nested array.
ComplexMatrix complex_matrix(const Json& j, const char* what) {
  if (j.is_array()) return real_table(j, what).cast<Complex>();
  if (!j.contains("re")) bad_config(std::string(what) + ": matrix needs 're'");
  const Eigen::MatrixXd re = real_table(j.at("re"), what);
  ComplexMatrix m = re.cast<Complex>();
  if (j.contains("im")) {
    const Eigen::MatrixXd im = real_table(j.at("im"), what);
    if (im.rows() != re.rows() || im.cols() != re.cols()) bad_config(std::string(what) + ": re/im shapes differ");
    m.imag() = im;
  }
  return m;
}

ComplexVector complex_vector(const Json& j, const char* what) {
  auto read = [&](const Json& arr) {
    if (!arr.is_array()) bad_config(std::string(what) + ": expected an array");
    RealVector v(static_cast<Index>(arr.size()));
    for (std::size_t i = 0; i < arr.size(); ++i) v(static_cast<Index>(i)) = arr[i].get<double>();
    return v;
  };
  if (j.is_array()) return read(j).cast<Complex>();
  ComplexVector v = read(j.at("re")).cast<Complex>();
  if (j.contains("im")) v.imag() = read(j.at("im"));
  return v;
}

std::string kind_of(const Json& spec, const char* what) {
  if (!spec.is_object() || !spec.contains("kind") || !spec.at("kind").is_string()) {
    bad_config(std::string(what) + ": spec needs a string 'kind'");
  }
  return spec.at("kind").get<std::string>();
}

void require_shape(const ComplexMatrix& m, Index n, const char* what) {
  if (m.rows() != n || m.cols() != n) {
    throw Error(ErrorKind::ShapeError, std::string(what) + ": expected " + std::to_string(n) + " x " +
                                           std::to_string(n));
  }
}

ComplexMatrix build_h(const Json& spec, int d, Rng rng) {
  const std::string kind = kind_of(spec, "h");
  ComplexMatrix h;
  if (kind == "random") {
    h = random_hermitian(d, rng);
  } else if (kind == "matrix") {
    h = complex_matrix(spec, "h");
  } else if (kind == "diag") {
    const ComplexVector v = complex_vector(spec.at("values"), "h.values");
    h = v.asDiagonal();
  } else if (kind == "zero") {
    h = ComplexMatrix::Zero(d, d);
  } else {
    bad_config("h: unknown kind '" + kind + "'");
  }
  require_shape(h, d, "h");
  if (spec.contains("scale")) h *= spec.at("scale").get<double>();
  return h;
}

ComplexMatrix build_v(const Json& spec, int d, Rng rng) {
  const std::string kind = kind_of(spec, "V");
  ComplexMatrix v;
  auto table_to_v = [d](const Eigen::MatrixXd& w) {
    ComplexMatrix out = ComplexMatrix::Zero(d * d, d * d);
    for (int x = 0; x < d; ++x)
      for (int y = 0; y < d; ++y) out(x * d + y, x * d + y) = w(x, y);
    return out;
  };
  if (kind == "pair_table") {
    const Eigen::MatrixXd w = real_table(spec.at("w"), "V.w");
    if (w.rows() != d || w.cols() != d) throw Error(ErrorKind::ShapeError, "V.w: expected d x d");
    if ((w - w.transpose()).cwiseAbs().maxCoeff() != 0.0) {
      throw Error(ErrorKind::NotSwapSymmetric, "V.w: w(x,y) != w(y,x)");
    }
    v = table_to_v(w);
  } else if (kind == "random_pair_table") {
    v = table_to_v(random_pair_table(d, rng));
  } else if (kind == "matrix") {
    v = complex_matrix(spec, "V");
  } else if (kind == "random") {
    v = random_swap_symmetric(d, rng);
  } else if (kind == "zero") {
    v = ComplexMatrix::Zero(d * d, d * d);
  } else {
    bad_config("V: unknown kind '" + kind + "'");
  }
  require_shape(v, d * d, "V");
  if (spec.contains("norm")) {
    const double target = spec.at("norm").get<double>();
    const double current = op_norm(v);
    if (current > 0.0) v *= target / current;
  }
  return v;
}

ComplexMatrix build_rho(const Json& spec, int d, Rng rng) {
  const std::string kind = kind_of(spec, "rho0");
  ComplexMatrix rho;
  if (kind == "random") {
    rho = random_density(d, rng);
  } else if (kind == "random_pure") {
    const ComplexVector psi = random_unit_vector(d, rng);
    rho = psi * psi.adjoint();
  } else if (kind == "pure") {
    const ComplexVector psi = complex_vector(spec.at("psi"), "rho0.psi");
    if (psi.size() != d) throw Error(ErrorKind::ShapeError, "rho0.psi: expected d entries");
    if (psi.norm() == 0.0) bad_config("rho0.psi: zero vector");
    const ComplexVector u = psi.normalized();
    rho = u * u.adjoint();
  } else if (kind == "matrix") {
    rho = complex_matrix(spec, "rho0");
  } else {
    bad_config("rho0: unknown kind '" + kind + "'");
  }
  require_shape(rho, d, "rho0");
  return rho;
}

PObservable build_observable(const Json& spec, int d, Rng rng) {
  const std::string kind = kind_of(spec, "observable");
  const int p = get_or<int>(spec, "p", 1);
  if (p < 1) bad_config("observable.p must be >= 1");
  if (kind == "random") return PObservable(random_symmetric_kernel(d, p, rng), d);
  if (kind == "matrix") return PObservable(complex_matrix(spec, "observable"), d);
  if (kind == "diag") {
    const ComplexVector v = complex_vector(spec.at("values"), "observable.values");
    return PObservable(ComplexMatrix(v.asDiagonal()), d);
  }
  bad_config("observable: unknown kind '" + kind + "'");
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

// ---------------------------------------------------------------------------
// Config

ModelConfig parse_config(const Json& j) {
  if (!j.is_object()) bad_config("config must be a JSON object");
  ModelConfig c;
  c.d = get_or<int>(j, "d", c.d);
  c.hbar = get_or<double>(j, "hbar", c.hbar);
  c.seed = get_or<std::uint64_t>(j, "seed", c.seed);
  if (j.contains("h")) c.h = j.at("h");
  if (j.contains("V")) c.v = j.at("V");
  if (j.contains("rho0")) c.rho0 = j.at("rho0");
  if (j.contains("observable")) c.observable = j.at("observable");
  c.particles = get_or<std::vector<int>>(j, "N", {});
  if (j.contains("t") && j.contains("t_over_tau")) bad_config("give either 't' or 't_over_tau'");
  if (j.contains("t_over_tau")) {
    c.times = get_or<std::vector<double>>(j, "t_over_tau", {});
    c.times_in_tau = true;
  } else {
    c.times = get_or<std::vector<double>>(j, "t", {});
  }
  if (j.contains("integrator")) {
    const Json& in = j.at("integrator");
    c.rk4_step = get_or<double>(in, "rk4_step", c.rk4_step);
    c.picard_intervals = get_or<int>(in, "picard_intervals", c.picard_intervals);
    c.quadrature_tol = get_or<double>(in, "quadrature_tol", c.quadrature_tol);
  }
  if (j.contains("truncation")) {
    const Json& tr = j.at("truncation");
    if (tr.is_string() && tr.get<std::string>() == "auto") {
      c.truncation.reset();
    } else if (tr.is_number_integer()) {
      c.truncation = tr.get<int>();
    } else {
      bad_config("truncation must be \"auto\" or an integer");
    }
  }
  c.samples = get_or<int>(j, "samples", c.samples);
  c.element_cap = get_or<std::size_t>(j, "element_cap", c.element_cap);

  if (c.d < 1) bad_config("d must be >= 1");
  if (!(c.hbar > 0.0)) bad_config("hbar must be > 0");
  for (int n : c.particles)
    if (n < 1) bad_config("every N must be >= 1");
  for (double t : c.times)
    if (!(t >= 0.0)) bad_config("times must be >= 0");
  if (c.rk4_step < 0.0) bad_config("integrator.rk4_step must be >= 0");
  if (c.samples < 1) bad_config("samples must be >= 1");
  if (c.truncation && *c.truncation < 0) bad_config("truncation must be >= 0");
  return c;
}

ModelConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad_config("cannot open config '" + path + "'");
  Json j;
  try {
    in >> j;
  } catch (const Json::exception& e) {
    bad_config("config '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

Json to_json(const ModelConfig& c) {
  Json j{{"d", c.d},   {"hbar", c.hbar}, {"seed", c.seed},   {"h", c.h},
         {"V", c.v},   {"rho0", c.rho0}, {"observable", c.observable},
         {"N", c.particles}, {"samples", c.samples}, {"element_cap", c.element_cap}};
  j[c.times_in_tau ? "t_over_tau" : "t"] = c.times;
  j["integrator"] = {{"rk4_step", c.rk4_step},
                     {"picard_intervals", c.picard_intervals},
                     {"quadrature_tol", c.quadrature_tol}};
  if (c.truncation) {
    j["truncation"] = *c.truncation;
  } else {
    j["truncation"] = "auto";
  }
  return j;
}

Instance instantiate(const ModelConfig& config) {
  set_element_cap(config.element_cap);
  Rng root(config.seed);
  Rng rh = root.fork(1), rv = root.fork(2), rr = root.fork(3), ra = root.fork(4);
  const int d = config.d;
  ComplexMatrix h = build_h(config.h, d, rh);
  ComplexMatrix v = build_v(config.v, d, rv);
  ComplexMatrix rho = build_rho(config.rho0, d, rr);
  PObservable a = build_observable(config.observable, d, ra);
  if (a.modes() != d) throw Error(ErrorKind::ShapeError, "observable: kernel does not match d");
  const bool pure = is_pure_state(rho);
  return Instance{InteractionModel(std::move(h), std::move(v), config.hbar),
                  DensityMatrix(std::move(rho)), std::move(a), pure};
}

std::vector<double> resolved_times(const ModelConfig& config, const InteractionModel& model) {
  if (!config.times_in_tau) return config.times;
  if (model.v_inf() == 0.0) {
    throw Error(ErrorKind::FreeTheory, "t_over_tau given but V = 0, τ is infinite");
  }
  const double tu = tau(model.hbar(), model.v_inf());
  std::vector<double> out;
  for (double x : config.times) out.push_back(x * tu);
  return out;
}

bool is_pure_state(const ComplexMatrix& rho) {
  return std::abs(rho.trace() - Complex(1.0)) <= 1e-10 &&
         (rho * rho - rho).cwiseAbs().maxCoeff() <= 1e-10;
}

// ---------------------------------------------------------------------------
// Sweeps

void fill_bounds(SweepRecord& r, double hbar, double v_inf, double a_norm) {
  // a free model has τ = ∞: evaluate the closed forms at t/τ = 0
  const BoundParams params = v_inf > 0.0 ? BoundParams{hbar, v_inf, r.p, r.N, r.t}
                                         : BoundParams{1.0, 1.0, r.p, r.N, 0.0};
  r.bound_coarse = mean_field_bound(params, a_norm, BoundForm::Coarse);
  r.bound_fine = mean_field_bound(params, a_norm, BoundForm::Fine);
  r.bound_small_time.reset();
  if (params.t <= tau(params.hbar, params.v_inf) * (1.0 + 1e-12)) {
    r.bound_small_time = small_time_bound(params, a_norm);
  }
}

std::vector<SweepRecord> run_converge_sweep(const ModelConfig& config, const RunOptions& options) {
  const Instance inst = instantiate(config);
  if (!inst.rho_pure) {
    bad_config("converge-sweep needs a pure initial state (rho0 kind 'pure' or 'random_pure'); "
               "P_S ρ^{⊗N} = ρ^{⊗N} fails for mixed ρ");
  }
  const std::vector<double> times = resolved_times(config, inst.model);
  const int p = inst.observable.arity();
  for (int N : config.particles)
    if (N < p) throw Error(ErrorKind::BadArity, "converge-sweep: N = " + std::to_string(N) + " < p");
  const double a_norm = inst.observable.norm();

  HartreeOptions hopt;
  hopt.step = config.rk4_step;
  std::vector<double> hartree_values(times.size());
  std::vector<double> hartree_ms(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    const auto start = std::chrono::steady_clock::now();
    const DensityMatrix rho_t = evolve_hartree(inst.model, inst.rho0, times[k], HartreeMethod::RK4, hopt);
    hartree_values[k] = eval(inst.observable, rho_t).real();
    hartree_ms[k] = elapsed_ms(start);
  }

  const std::size_t jobs = config.particles.size();
  std::vector<std::vector<SweepRecord>> per_job(jobs);
  std::vector<std::exception_ptr> failures(jobs);
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, options.workers))
  for (std::size_t j = 0; j < jobs; ++j) {
    try {
      const int N = config.particles[j];
      const auto start = std::chrono::steady_clock::now();
      const NBodyHamiltonian H = NBodyHamiltonian::for_state(inst.model.h(), inst.model.v(),
                                                             inst.model.hbar(), N, inst.rho0);
      const SymmetricNBodyState state0 = product_state_in_frame(inst.rho0, H);
      const double setup_ms = elapsed_ms(start);
      for (std::size_t k = 0; k < times.size(); ++k) {
        const auto t0 = std::chrono::steady_clock::now();
        SweepRecord r;
        r.N = N;
        r.t = times[k];
        r.p = p;
        r.qm = expectation(inst.observable, evolve_state(H, state0, times[k])).real();
        r.hartree = hartree_values[k];
        r.abs_error = std::abs(r.qm - r.hartree);
        fill_bounds(r, inst.model.hbar(), inst.model.v_inf(), a_norm);
        r.wall_time_ms = options.timing ? setup_ms / times.size() + elapsed_ms(t0) + hartree_ms[k] : 0.0;
        per_job[j].push_back(r);
      }
    } catch (...) {
      failures[j] = std::current_exception();
    }
  }
  for (const auto& failure : failures)
    if (failure) std::rethrow_exception(failure);

  std::vector<SweepRecord> records;
  for (auto& v : per_job) records.insert(records.end(), v.begin(), v.end());
  std::sort(records.begin(), records.end(), [](const SweepRecord& a, const SweepRecord& b) {
    return a.t != b.t ? a.t < b.t : a.N < b.N;
  });

  for (const SweepRecord& r : records) {
    if (r.abs_error > r.bound_coarse) {
      std::ostringstream msg;
      msg << "abs_error " << format_double(r.abs_error) << " > coarse bound "
          << format_double(r.bound_coarse) << " at N = " << r.N << ", t = " << format_double(r.t)
          << "; instance: " << to_json(config).dump();
      throw Error(ErrorKind::BoundViolation, msg.str());
    }
  }
  return records;
}

std::vector<BoundRow> run_bound_table(const ModelConfig& config) {
  const Instance inst = instantiate(config);
  const std::vector<double> times = resolved_times(config, inst.model);
  const int p = inst.observable.arity();
  std::vector<BoundRow> rows;
  for (double t : times)
    for (int N : config.particles) {
      SweepRecord r;
      r.N = N;
      r.t = t;
      r.p = p;
      fill_bounds(r, inst.model.hbar(), inst.model.v_inf(), 1.0);
      rows.push_back({N, t, p, r.bound_coarse, r.bound_fine, r.bound_small_time});
    }
  std::sort(rows.begin(), rows.end(), [](const BoundRow& a, const BoundRow& b) {
    return a.t != b.t ? a.t < b.t : a.N < b.N;
  });
  return rows;
}

std::vector<SimulationRow> run_simulate(const ModelConfig& config) {
  const Instance inst = instantiate(config);
  const std::vector<double> times = resolved_times(config, inst.model);
  const double t_end = times.empty() ? 1.0 : *std::max_element(times.begin(), times.end());
  HartreeOptions hopt;
  hopt.step = config.rk4_step;
  const Trajectory traj = hartree_trajectory(inst.model, inst.rho0, t_end, config.samples, hopt);
  std::vector<SimulationRow> rows;
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const ComplexMatrix& rho = traj.states[k];
    SimulationRow r;
    r.t = traj.times[k];
    r.trace = rho.trace().real();
    r.energy = energy(inst.model, rho);
    r.min_eigenvalue = eigh(hermitian_part(rho)).eigenvalues(0);
    r.hermiticity_error = hermiticity_error(rho);
    r.purity = (rho * rho).trace().real();
    r.observable = eval(inst.observable, rho).real();
    rows.push_back(r);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Output

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

std::string optional_field(const std::optional<double>& x) { return x ? format_double(*x) : ""; }

Json optional_json(const std::optional<double>& x) { return x ? Json(*x) : Json(nullptr); }

}  // namespace

void write_csv(std::ostream& os, const std::vector<SweepRecord>& records) {
  os << "N,t,p,qm,hartree,abs_error,bound_coarse,bound_fine,bound_small_time,wall_time_ms\n";
  for (const auto& r : records) {
    os << r.N << ',' << format_double(r.t) << ',' << r.p << ',' << format_double(r.qm) << ','
       << format_double(r.hartree) << ',' << format_double(r.abs_error) << ','
       << format_double(r.bound_coarse) << ',' << format_double(r.bound_fine) << ','
       << optional_field(r.bound_small_time) << ',' << format_double(r.wall_time_ms) << '\n';
  }
}

void write_csv(std::ostream& os, const std::vector<BoundRow>& rows) {
  os << "N,t,p,coarse,fine,small_time\n";
  for (const auto& r : rows) {
    os << r.N << ',' << format_double(r.t) << ',' << r.p << ',' << format_double(r.coarse) << ','
       << format_double(r.fine) << ',' << optional_field(r.small_time) << '\n';
  }
}

void write_csv(std::ostream& os, const std::vector<SimulationRow>& rows) {
  os << "t,trace,energy,min_eigenvalue,hermiticity_error,purity,observable\n";
  for (const auto& r : rows) {
    os << format_double(r.t) << ',' << format_double(r.trace) << ',' << format_double(r.energy) << ','
       << format_double(r.min_eigenvalue) << ',' << format_double(r.hermiticity_error) << ','
       << format_double(r.purity) << ',' << format_double(r.observable) << '\n';
  }
}

void write_csv(std::ostream& os, const VerifyReport& report) {
  os << "name,passed,residual,tolerance,detail\n";
  for (const auto& r : report.results) {
    std::string detail = r.detail;
    std::replace(detail.begin(), detail.end(), ',', ';');
    os << r.name << ',' << (r.passed ? "true" : "false") << ',' << format_double(r.residual) << ','
       << format_double(r.tolerance) << ',' << detail << '\n';
  }
}

Json to_json(const std::vector<SweepRecord>& records) {
  Json out = Json::array();
  for (const auto& r : records) {
    out.push_back({{"N", r.N},
                   {"t", r.t},
                   {"p", r.p},
                   {"qm", r.qm},
                   {"hartree", r.hartree},
                   {"abs_error", r.abs_error},
                   {"bound_coarse", r.bound_coarse},
                   {"bound_fine", r.bound_fine},
                   {"bound_small_time", optional_json(r.bound_small_time)},
                   {"wall_time_ms", r.wall_time_ms}});
  }
  return out;
}

Json to_json(const std::vector<BoundRow>& rows) {
  Json out = Json::array();
  for (const auto& r : rows) {
    out.push_back({{"N", r.N},
                   {"t", r.t},
                   {"p", r.p},
                   {"coarse", r.coarse},
                   {"fine", r.fine},
                   {"small_time", optional_json(r.small_time)}});
  }
  return out;
}

Json to_json(const std::vector<SimulationRow>& rows) {
  Json out = Json::array();
  for (const auto& r : rows) {
    out.push_back({{"t", r.t},
                   {"trace", r.trace},
                   {"energy", r.energy},
                   {"min_eigenvalue", r.min_eigenvalue},
                   {"hermiticity_error", r.hermiticity_error},
                   {"purity", r.purity},
                   {"observable", r.observable}});
  }
  return out;
}

bool VerifyReport::all_passed() const {
  return std::all_of(results.begin(), results.end(), [](const IdentityResult& r) { return r.passed; });
}

Json to_json(const VerifyReport& report) {
  Json results = Json::array();
  for (const auto& r : report.results) {
    results.push_back({{"name", r.name},
                       {"passed", r.passed},
                       {"residual", r.residual},
                       {"tolerance", r.tolerance},
                       {"detail", r.detail}});
  }
  return {{"seed", report.seed}, {"all_passed", report.all_passed()}, {"results", results}};
}

VerifyReport report_from_json(const Json& j) {
  VerifyReport out;
  try {
    out.seed = j.at("seed").get<std::uint64_t>();
    for (const Json& r : j.at("results")) {
      out.results.push_back({r.at("name").get<std::string>(), r.at("passed").get<bool>(),
                             r.at("residual").get<double>(), r.at("tolerance").get<double>(),
                             r.at("detail").get<std::string>()});
    }
    if (j.contains("all_passed") && j.at("all_passed").get<bool>() != out.all_passed()) {
      bad_config("report: all_passed disagrees with the results");
    }
  } catch (const Json::exception& e) {
    bad_config(std::string("report JSON does not match the schema: ") + e.what());
  }
  return out;
}

}  // namespace mfl
