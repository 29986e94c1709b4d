#include "heavylasso/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "heavylasso/io.hpp"
#include "heavylasso/kernels.hpp"
#include "heavylasso/path.hpp"
#include "heavylasso/simulation.hpp"
#include "heavylasso/solver.hpp"
#include "heavylasso/theory.hpp"

namespace heavylasso {

namespace {

namespace fs = std::filesystem;

struct FitFlags {
  std::string input;
  std::string response = "y";
  std::string out_dir = ".";
  std::string loss = "student";
  double nu = 3.0;
  double scale_c = 1.0;
  double huber_delta = 1.345;
  int outer_max = 1000;
  int inner_sweeps = 1;
  double tol = 1e-7;
  bool standardize = false;
  bool intercept = false;
  bool unnormalized = false;

  FitConfig config() const {
    FitConfig c;
    c.loss_kind = parse_loss_kind(loss);
    c.nu = nu;
    c.scale_c = scale_c;
    c.huber_delta = huber_delta;
    c.outer_max = outer_max;
    c.inner_sweeps = inner_sweeps;
    c.tol = tol;
    c.standardize = standardize;
    c.intercept = intercept;
    c.unnormalized_update = unnormalized;
    c.validate();
    return c;
  }
};

void add_fit_flags(CLI::App& app, FitFlags& f) {
  app.add_option("-i,--input", f.input, "input CSV (header row required)")->required();
  app.add_option("--response", f.response, "name of the response column")->capture_default_str();
  app.add_option("-o,--output-dir", f.out_dir, "directory for output files")->capture_default_str();
  app.add_option("--loss", f.loss, "student, squared or huber")->capture_default_str();
  app.add_option("--nu", f.nu, "Student degrees-of-freedom parameter")->capture_default_str();
  app.add_option("--scale-c", f.scale_c, "loss scale constant c")->capture_default_str();
  app.add_option("--huber-delta", f.huber_delta, "Huber threshold")->capture_default_str();
  app.add_option("--outer-max", f.outer_max, "maximum outer iterations")->capture_default_str();
  app.add_option("--inner-sweeps", f.inner_sweeps, "CD sweeps per weight update")
      ->capture_default_str();
  app.add_option("--tol", f.tol, "sup-norm coefficient change tolerance")->capture_default_str();
  app.add_flag("--standardize", f.standardize, "scale columns to unit variance internally");
  app.add_flag("--intercept", f.intercept, "fit an unpenalized intercept");
  app.add_flag("--unnormalized", f.unnormalized, "use the update without the 1/n loss factor");
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write '" + path.string() + "'");
  return out;
}

fs::path prepare_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InvalidInput("cannot create output directory '" + dir + "': " + ec.message());
  return fs::path(dir);
}

void write_fit_files(const fs::path& dir, const io::LabeledDataset& ld, const FitResult& fit,
                     const FitConfig& cfg, const nlohmann::json& summary) {
  auto coef = open_out(dir / "coefficients.csv");
  io::write_coefficients_csv(coef, ld.feature_names, fit.coef, cfg.intercept);
  auto weights = open_out(dir / "weights.csv");
  io::write_weights_csv(weights, fit.weights);
  auto js = open_out(dir / "summary.json");
  js << summary.dump(2) << '\n';
}

double parse_lambda(const std::string& text, const Dataset& d, const FitConfig& cfg) {
  if (text == "max") return lambda_max(d, cfg);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !(v >= 0.0)) {
    throw InvalidConfig("--lambda must be a nonnegative number or 'max', got '" + text + "'");
  }
  return v;
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = text.find(',', start);
    const std::string item = text.substr(start, pos - start);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || ptr != item.data() + item.size()) {
      throw InvalidConfig("--lambdas: not a number: '" + item + "'");
    }
    grid.push_back(v);
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return grid;
}

// Scenario knobs exposed as --key flags; names follow the config file keys.
constexpr const char* kScenarioKeys[] = {
    "n", "p", "s", "rho_x", "noise", "n_test", "reps", "seed", "outlier_rate", "outlier_low",
    "outlier_high", "t_df", "wide_sigma", "methods", "criterion", "scale", "nu", "scale_c",
    "huber_delta", "tol", "outer_max", "inner_sweeps", "grid_size", "grid_ratio"};

std::string flag_name(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return "--" + key;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Robust sparse regression with a Student-t loss and an l1 penalty"};
  app.require_subcommand(1);
  app.set_version_flag("--version", io::version() + " (" + io::git_hash() + ")");
  std::string simd = "auto";
  app.add_option("--simd", simd, "kernel backend: auto, scalar or avx2")->capture_default_str();

  FitFlags fit_flags;
  std::string lambda_text;
  CLI::App* fit = app.add_subcommand("fit", "fit at a single lambda");
  add_fit_flags(*fit, fit_flags);
  fit->add_option("--lambda", lambda_text, "penalty level, or 'max' for lambda_max")->required();

  FitFlags path_flags;
  std::string criterion = "bic", scale = "rss", lambdas;
  int grid_size = 100;
  double grid_ratio = 0.0;
  bool cold = false;
  CLI::App* path = app.add_subcommand("path", "fit a lambda path and select by BIC or AIC");
  add_fit_flags(*path, path_flags);
  path->add_option("--criterion", criterion, "bic or aic")->capture_default_str();
  path->add_option("--scale", scale, "residual scale in the criterion: rss or mad")
      ->capture_default_str();
  path->add_option("--grid-size", grid_size, "number of lambda values")->capture_default_str();
  path->add_option("--grid-ratio", grid_ratio,
                   "smallest lambda / lambda_max (default 0.1 if n <= p, else 1e-4)");
  path->add_option("--lambdas", lambdas, "explicit comma-separated decreasing grid");
  path->add_flag("--cold-start", cold, "start every fit from the null model");

  std::string config_file, sim_dir = ".";
  int threads = 1;
  std::map<std::string, std::string> sim_values;
  CLI::App* sim = app.add_subcommand("simulate", "run a Monte-Carlo simulation table");
  sim->add_option("-c,--config", config_file, "scenario file (key = value lines)");
  sim->add_option("-o,--output-dir", sim_dir, "directory for table.csv / table.json")
      ->capture_default_str();
  sim->add_option("--threads", threads, "worker threads")->capture_default_str();
  for (const char* key : kScenarioKeys) {
    sim->add_option(flag_name(key), sim_values[key], std::string("scenario setting ") + key);
  }

  std::string preset = "tiny", verify_out;
  std::uint64_t verify_seed = 20250701;
  int verify_threads = 1;
  double verify_nu = 3.0;
  CLI::App* verify = app.add_subcommand("verify", "run the theory and invariant checks");
  verify->add_option("--preset", preset, "tiny, small or full")->capture_default_str();
  verify->add_option("--seed", verify_seed, "base seed")->capture_default_str();
  verify->add_option("--threads", verify_threads, "worker threads")->capture_default_str();
  verify->add_option("--nu", verify_nu, "Student parameter")->capture_default_str();
  verify->add_option("-o,--output", verify_out, "report JSON path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (simd == "scalar") {
      kernels::select_backend(kernels::Backend::scalar);
    } else if (simd == "avx2") {
      if (!kernels::select_backend(kernels::Backend::avx2)) {
        throw InvalidConfig("--simd avx2: not supported on this CPU or build");
      }
    } else if (simd != "auto") {
      throw InvalidConfig("--simd must be auto, scalar or avx2");
    }

    if (*fit || *path) {
      const FitFlags& f = *fit ? fit_flags : path_flags;
      const FitConfig cfg = f.config();
      const io::CsvTable table = io::read_csv_file(f.input);
      const io::LabeledDataset ld = io::dataset_from_table(table, f.response, f.input);
      const fs::path dir = prepare_dir(f.out_dir);
      if (*fit) {
        FitConfig at = cfg;
        at.lambda = parse_lambda(lambda_text, ld.data, cfg);
        const FitResult res = em_fit(ld.data, at);
        write_fit_files(dir, ld, res, at, io::fit_summary_json(res, at));
        out << "lambda " << io::format_double(at.lambda) << ": " << res.coef.nonzeros()
            << " nonzero, " << res.iterations << " iterations, "
            << (res.converged ? "converged" : "NOT converged") << '\n';
      } else {
        std::vector<double> grid;
        if (!lambdas.empty()) {
          grid = parse_grid(lambdas);
        } else {
          const double ratio =
              grid_ratio > 0.0 ? grid_ratio : default_grid_ratio(ld.data.n(), ld.data.p());
          grid = lambda_grid(ld.data, cfg, grid_size, ratio);
        }
        const PathResult res = fit_path(ld.data, cfg, grid, parse_criterion(criterion),
                                        parse_residual_scale(scale), !cold);
        write_fit_files(dir, ld, res.selected(), cfg, io::path_summary_json(res, cfg));
        auto table_out = open_out(dir / "path.csv");
        io::write_path_csv(table_out, res);
        out << "selected lambda " << io::format_double(res.selected_lambda()) << " (index "
            << res.selected_index << " of " << grid.size() << ", " << to_string(res.criterion)
            << "/" << to_string(res.scale) << "), " << res.selected().coef.nonzeros()
            << " nonzero\n";
      }
      return kExitOk;
    }

    if (*sim) {
      io::SimulationConfig cfg;
      if (!config_file.empty()) cfg = io::read_simulation_config(config_file);
      for (const char* key : kScenarioKeys) {
        if (!sim_values[key].empty()) io::apply_setting(cfg, key, sim_values[key]);
      }
      io::finalize(cfg);
      if (threads < 1) throw InvalidConfig("--threads must be >= 1");
      std::vector<ScenarioResult> results;
      for (NoiseKind k : cfg.noises) {
        ScenarioSpec spec = cfg.spec;
        spec.noise.kind = k;
        err << "simulate: noise " << to_string(k) << ", " << spec.reps << " replications\n";
        results.push_back(run_scenario(spec, cfg.methods, threads));
      }
      const fs::path dir = prepare_dir(sim_dir);
      auto csv = open_out(dir / "table.csv");
      io::write_table_csv(csv, cfg, results);
      auto js = open_out(dir / "table.json");
      js << io::table_json(cfg, results).dump(2) << '\n';
      for (const ScenarioResult& r : results) {
        for (const MethodOutcome& m : r.methods) {
          out << to_string(r.spec.noise.kind) << ' ' << m.name << ": l2sq "
              << io::format_double(m.l2sq.mean) << " l1 " << io::format_double(m.l1.mean)
              << '\n';
        }
      }
      return kExitOk;
    }

    // verify
    if (!(verify_nu > 0.0)) throw InvalidConfig("--nu must be positive");
    if (verify_threads < 1) throw InvalidConfig("--threads must be >= 1");
    const TheoryReport rep = run_theory_suite(preset, verify_seed, verify_threads, verify_nu);
    const std::string dumped = io::to_json(rep).dump(2);
    if (verify_out.empty()) {
      out << dumped << '\n';
    } else {
      auto js = open_out(verify_out);
      js << dumped << '\n';
    }
    for (const auto& c : rep.checks) {
      err << (c.passed ? "ok   " : (c.hard ? "FAIL " : "warn ")) << c.name << ": " << c.detail
          << '\n';
    }
    if (rep.hard_failure()) {
      for (const auto& c : rep.checks) {
        if (c.hard && !c.passed) err << "invariant failure: " << c.name << '\n';
      }
      return kExitInvariant;
    }
    return kExitOk;
  } catch (const ScenarioFailure& e) {
    err << "error: " << e.what() << '\n';
    return kExitScenario;
  } catch (const std::invalid_argument& e) {
    // InvalidConfig, InvalidInput, ContractViolation and io::FormatError.
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace heavylasso
