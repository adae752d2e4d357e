#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mfl/errors.hpp"
#include "mfl/experiments.hpp"

namespace {

enum ExitCode { Ok = 0, Validation = 2, Violation = 3, ResourceCap = 4 };

struct Common {
  std::string config;
  std::string out;
  int workers = 1;
  std::optional<std::uint64_t> seed;
  std::string format = "csv";
  bool no_timing = false;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("config", c.config, "JSON run configuration")->required()->check(CLI::ExistingFile);
  sub->add_option("--out", c.out, "output directory (default: stdout)");
  sub->add_option("--workers", c.workers, "worker threads for independent sweep points")
      ->check(CLI::PositiveNumber);
  sub->add_option("--seed", c.seed, "override the config seed");
  sub->add_option("--format", c.format, "output format")->check(CLI::IsMember({"csv", "json"}));
  sub->add_flag("--no-timing", c.no_timing, "write 0 for wall-clock columns (byte-reproducible output)");
}

mfl::ModelConfig load(const Common& c) {
  mfl::ModelConfig config = mfl::load_config(c.config);
  if (c.seed) config.seed = *c.seed;
  return config;
}

// Writes to <out>/<stem>.<format> or to stdout.
template <class Writer>
void emit(const Common& c, const std::string& stem, Writer&& write) {
  if (c.out.empty()) {
    write(std::cout);
    return;
  }
  std::filesystem::create_directories(c.out);
  const auto path = std::filesystem::path(c.out) / (stem + "." + c.format);
  std::ofstream os(path);
  if (!os) throw mfl::Error(mfl::ErrorKind::InvalidConfig, "cannot write " + path.string());
  write(os);
  std::cerr << "wrote " << path.string() << "\n";
}

template <class Rows>
void emit_rows(const Common& c, const std::string& stem, const Rows& rows) {
  emit(c, stem, [&](std::ostream& os) {
    if (c.format == "json") {
      os << mfl::to_json(rows).dump(2) << "\n";
    } else {
      mfl::write_csv(os, rows);
    }
  });
}

int exit_code_for(mfl::ErrorKind kind) {
  switch (kind) {
    case mfl::ErrorKind::BoundViolation: return Violation;
    case mfl::ErrorKind::InstanceTooLarge:
    case mfl::ErrorKind::ArityCapExceeded: return ResourceCap;
    default: return Validation;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mflab: finite-dimensional mean-field limit laboratory"};
  app.require_subcommand(1);

  Common sweep_opts, verify_opts, bound_opts, sim_opts;
  auto* sweep = app.add_subcommand("converge-sweep", "N-body vs Hartree error over the (N, t) grid");
  auto* verify = app.add_subcommand("verify-identities", "run the identity and estimate suite");
  auto* bounds = app.add_subcommand("bound-table", "tabulate the mean-field error bounds over (N, t)");
  auto* simulate = app.add_subcommand("simulate", "dump Hartree trajectory diagnostics");
  add_common(sweep, sweep_opts);
  add_common(verify, verify_opts);
  add_common(bounds, bound_opts);
  add_common(simulate, sim_opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sweep) {
      const auto config = load(sweep_opts);
      mfl::RunOptions run{sweep_opts.workers, !sweep_opts.no_timing};
      emit_rows(sweep_opts, "converge_sweep", mfl::run_converge_sweep(config, run));
    } else if (*verify) {
      const auto config = load(verify_opts);
      mfl::RunOptions run{verify_opts.workers, !verify_opts.no_timing};
      const mfl::VerifyReport report = mfl::run_verify_identities(config, run);
      for (const auto& r : report.results) {
        std::cerr << (r.passed ? "PASS " : "FAIL ") << r.name << "  residual=" << mfl::format_double(r.residual)
                  << " tol=" << mfl::format_double(r.tolerance);
        if (!r.detail.empty()) std::cerr << "  (" << r.detail << ")";
        std::cerr << "\n";
      }
      emit(verify_opts, "verify_identities", [&](std::ostream& os) {
        if (verify_opts.format == "json") {
          os << mfl::to_json(report).dump(2) << "\n";
        } else {
          mfl::write_csv(os, report);
        }
      });
      return report.all_passed() ? Ok : Violation;
    } else if (*bounds) {
      emit_rows(bound_opts, "bound_table", mfl::run_bound_table(load(bound_opts)));
    } else if (*simulate) {
      emit_rows(sim_opts, "simulate", mfl::run_simulate(load(sim_opts)));
    }
  } catch (const mfl::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const mfl::Json::exception& e) {
    std::cerr << "error: InvalidConfig: " << e.what() << "\n";
    return Validation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return Validation;
  }
  return Ok;
}
