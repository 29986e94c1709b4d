#include "heavylasso/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace heavylasso::io {

using nlohmann::json;

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(trim(std::string_view(line).substr(start, pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

bool parse_number(const std::string& text, double& out) {
  if (text.empty()) return false;
  const char* first = text.data();
  const char* last = first + text.size();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

template <class Int>
Int parse_integer(const std::string& key, const std::string& text) {
  Int v{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw InvalidConfig("setting '" + key + "': expected an integer, got '" + text + "'");
  }
  return v;
}

double parse_real(const std::string& key, const std::string& text) {
  double v = 0.0;
  if (!parse_number(text, v) || !std::isfinite(v)) {
    throw InvalidConfig("setting '" + key + "': expected a finite number, got '" + text + "'");
  }
  return v;
}

json num(double v) {
  // JSON has no inf/nan; keep them distinguishable from missing values.
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return nullptr;
  return v > 0 ? "inf" : "-inf";
}

double from_num(const json& j) {
  if (j.is_null()) return std::nan("");
  if (j.is_string()) return j.get<std::string>() == "inf" ? INFINITY : -INFINITY;
  return j.get<double>();
}

json summary_json(const Summary& s) { return {{"mean", num(s.mean)}, {"sd", num(s.sd)}}; }

}  // namespace

FormatError::FormatError(const std::string& source, std::size_t row, std::size_t column,
                         const std::string& message)
    : InvalidInput(source + (row ? ":" + std::to_string(row) : std::string()) +
                   (column ? ":" + std::to_string(column) : std::string()) + ": " + message),
      row_(row),
      column_(column) {}

CsvTable read_csv(std::istream& in, const std::string& source) {
  CsvTable t;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (row == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    if (trim(line).empty()) {
      if (row == 1) throw FormatError(source, row, 0, "missing header row");
      continue;
    }
    std::vector<std::string> fields = split(line, ',');
    if (row == 1) {
      for (std::size_t c = 0; c < fields.size(); ++c) {
        if (fields[c].empty()) throw FormatError(source, row, c + 1, "empty column name");
        for (std::size_t k = 0; k < c; ++k) {
          if (fields[k] == fields[c]) {
            throw FormatError(source, row, c + 1, "duplicate column name '" + fields[c] + "'");
          }
        }
      }
      t.header = std::move(fields);
      continue;
    }
    if (fields.size() != t.header.size()) {
      throw FormatError(source, row, 0,
                        "expected " + std::to_string(t.header.size()) + " fields, found " +
                            std::to_string(fields.size()));
    }
    std::vector<double> values(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (!parse_number(fields[c], values[c])) {
        throw FormatError(source, row, c + 1,
                          "column '" + t.header[c] + "': not a number: '" + fields[c] + "'");
      }
      if (!std::isfinite(values[c])) {
        throw FormatError(source, row, c + 1, "column '" + t.header[c] + "': non-finite value");
      }
    }
    t.rows.push_back(std::move(values));
  }
  if (t.header.empty()) throw FormatError(source, 0, 0, "empty file (header row required)");
  if (t.rows.empty()) throw FormatError(source, 0, 0, "no data rows");
  return t;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  return read_csv(in, path);
}

LabeledDataset dataset_from_table(const CsvTable& table, const std::string& response,
                                  const std::string& source) {
  std::size_t yc = table.header.size();
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (table.header[c] == response) yc = c;
  }
  if (yc == table.header.size()) {
    throw FormatError(source, 1, 0, "response column '" + response + "' not found");
  }
  if (table.header.size() < 2) throw FormatError(source, 1, 0, "no feature columns");
  const std::size_t n = table.rows.size();
  const std::size_t p = table.header.size() - 1;
  Matrix x(n, p);
  std::vector<double> y(n);
  std::vector<std::string> names;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (c != yc) names.push_back(table.header[c]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = table.rows[i][yc];
    for (std::size_t c = 0, j = 0; c < table.header.size(); ++c) {
      if (c != yc) x(i, j++) = table.rows[i][c];
    }
  }
  return {Dataset(std::move(x), std::move(y)), std::move(names)};
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_coefficients_csv(std::ostream& out, const std::vector<std::string>& names,
                            const Coefficients& coef, bool with_intercept) {
  if (names.size() != coef.size()) throw ContractViolation("coefficient names do not match");
  out << "feature,estimate\n";
  if (with_intercept) out << "(intercept)," << format_double(coef.intercept) << '\n';
  for (std::size_t j = 0; j < coef.size(); ++j) {
    out << names[j] << ',' << format_double(coef.beta[j]) << '\n';
  }
}

void write_weights_csv(std::ostream& out, const std::vector<double>& weights) {
  out << "observation,weight\n";
  for (std::size_t i = 0; i < weights.size(); ++i) {
    out << i + 1 << ',' << format_double(weights[i]) << '\n';
  }
}

void write_path_csv(std::ostream& out, const PathResult& path) {
  out << "index,lambda,df,rss,scale_rss,bic,aic,converged,failed,selected\n";
  for (std::size_t i = 0; i < path.lambdas.size(); ++i) {
    const bool failed = path.failed[i];
    out << i << ',' << format_double(path.lambdas[i]) << ',' << path.df[i] << ','
        << format_double(path.rss[i]) << ',' << format_double(path.scale_rss[i]) << ','
        << format_double(path.bic[i]) << ',' << format_double(path.aic[i]) << ','
        << (!failed && path.fits[i].converged ? 1 : 0) << ',' << (failed ? 1 : 0) << ','
        << (static_cast<int>(i) == path.selected_index ? 1 : 0) << '\n';
  }
}

std::string version() { return HEAVYLASSO_VERSION; }
std::string git_hash() { return HEAVYLASSO_GIT_HASH; }

json to_json(const FitConfig& cfg) {
  return {{"loss", to_string(cfg.loss_kind)},
          {"nu", cfg.nu},
          {"scale_c", cfg.scale_c},
          {"huber_delta", cfg.huber_delta},
          {"lambda", num(cfg.lambda)},
          {"outer_max", cfg.outer_max},
          {"inner_sweeps", cfg.inner_sweeps},
          {"tol", cfg.tol},
          {"standardize", cfg.standardize},
          {"intercept", cfg.intercept},
          {"unnormalized_update", cfg.unnormalized_update}};
}

json fit_summary_json(const FitResult& fit, const FitConfig& cfg) {
  json trace = json::array();
  for (double v : fit.objective_trace) trace.push_back(num(v));
  return {{"tool", "heavylasso"},
          {"version", version()},
          {"git", git_hash()},
          {"config", to_json(cfg)},
          {"iterations", fit.iterations},
          {"converged", fit.converged},
          {"nonzeros", fit.coef.nonzeros()},
          {"intercept", fit.coef.intercept},
          {"objective_trace", trace},
          {"degenerate_columns", fit.degenerate_columns}};
}

json path_summary_json(const PathResult& path, const FitConfig& cfg) {
  json j = fit_summary_json(path.selected(), cfg);
  j["config"]["lambda"] = num(path.selected_lambda());
  j["criterion"] = to_string(path.criterion);
  j["residual_scale"] = to_string(path.scale);
  j["selected_index"] = path.selected_index;
  j["selected_lambda"] = path.selected_lambda();
  j["grid_size"] = path.lambdas.size();
  std::size_t failed = 0, perfect = 0, over = 0;
  for (std::size_t i = 0; i < path.lambdas.size(); ++i) {
    failed += path.failed[i] ? 1 : 0;
    perfect += path.perfect_fit[i] ? 1 : 0;
    over += path.df_exceeds_min_np[i] ? 1 : 0;
  }
  j["failed_lambdas"] = failed;
  j["perfect_fit_lambdas"] = perfect;
  j["df_exceeds_min_np"] = over;
  return j;
}

// ---------------------------------------------------------------------------
// Scenario files.

void apply_setting(SimulationConfig& cfg, const std::string& key, const std::string& value) {
  ScenarioSpec& s = cfg.spec;
  if (value.empty()) throw InvalidConfig("setting '" + key + "' has an empty value");
  if (key == "n") {
    s.n = parse_integer<std::size_t>(key, value);
  } else if (key == "p") {
    s.p = parse_integer<std::size_t>(key, value);
  } else if (key == "s") {
    s.s = parse_integer<std::size_t>(key, value);
  } else if (key == "rho_x") {
    s.rho_x = parse_real(key, value);
  } else if (key == "noise") {
    cfg.noises.clear();
    for (const std::string& name : split(value, ',')) cfg.noises.push_back(parse_noise_kind(name));
  } else if (key == "n_test") {
    s.n_test = parse_integer<std::size_t>(key, value);
  } else if (key == "reps") {
    s.reps = parse_integer<int>(key, value);
  } else if (key == "seed") {
    s.seed = parse_integer<std::uint64_t>(key, value);
  } else if (key == "outlier_rate") {
    s.noise.outlier_rate = parse_real(key, value);
  } else if (key == "outlier_low") {
    s.noise.outlier_low = parse_real(key, value);
  } else if (key == "outlier_high") {
    s.noise.outlier_high = parse_real(key, value);
  } else if (key == "t_df") {
    s.noise.t_df = parse_integer<int>(key, value);
  } else if (key == "wide_sigma") {
    s.noise.wide_sigma = parse_real(key, value);
  } else if (key == "methods") {
    cfg.method_names = split(value, ',');
    for (const std::string& m : cfg.method_names) parse_loss_kind(m);
  } else if (key == "criterion") {
    parse_criterion(value);
    cfg.method_settings[key] = value;
  } else if (key == "scale") {
    parse_residual_scale(value);
    cfg.method_settings[key] = value;
  } else if (key == "nu" || key == "scale_c" || key == "huber_delta" || key == "tol" ||
             key == "grid_ratio") {
    parse_real(key, value);
    cfg.method_settings[key] = value;
  } else if (key == "outer_max" || key == "inner_sweeps" || key == "grid_size") {
    parse_integer<int>(key, value);
    cfg.method_settings[key] = value;
  } else {
    throw InvalidConfig("unknown setting '" + key + "'");
  }
}

void finalize(SimulationConfig& cfg) {
  cfg.methods.clear();
  for (const std::string& name : cfg.method_names) {
    MethodSpec m = method_preset(name);
    for (const auto& [key, value] : cfg.method_settings) {
      if (key == "criterion") m.criterion = parse_criterion(value);
      else if (key == "scale") m.scale = parse_residual_scale(value);
      else if (key == "nu") m.cfg.nu = parse_real(key, value);
      else if (key == "scale_c") m.cfg.scale_c = parse_real(key, value);
      else if (key == "huber_delta") m.cfg.huber_delta = parse_real(key, value);
      else if (key == "tol") m.cfg.tol = parse_real(key, value);
      else if (key == "grid_ratio") m.grid_ratio = parse_real(key, value);
      else if (key == "outer_max") m.cfg.outer_max = parse_integer<int>(key, value);
      else if (key == "inner_sweeps") m.cfg.inner_sweeps = parse_integer<int>(key, value);
      else if (key == "grid_size") m.grid_size = parse_integer<int>(key, value);
    }
    m.cfg.validate();
    if (m.grid_size < 2) throw InvalidConfig("grid_size must be >= 2");
    if (m.grid_ratio != 0.0 && !(m.grid_ratio > 0.0 && m.grid_ratio < 1.0)) {
      throw InvalidConfig("grid_ratio must be in (0, 1)");
    }
    cfg.methods.push_back(std::move(m));
  }
  if (cfg.methods.empty()) throw InvalidConfig("no methods selected");
  if (cfg.noises.empty()) throw InvalidConfig("no noise scenarios selected");
  cfg.spec.validate();
}

SimulationConfig parse_simulation_config(std::istream& in, const std::string& source) {
  SimulationConfig cfg;
  std::string line;
  std::size_t row = 0;
  try {
    while (std::getline(in, line)) {
      ++row;
      const std::string body = trim(line.substr(0, line.find('#')));
      if (body.empty()) continue;
      const auto eq = body.find('=');
      if (eq == std::string::npos) throw InvalidConfig("expected 'key = value'");
      apply_setting(cfg, trim(body.substr(0, eq)), trim(body.substr(eq + 1)));
    }
    row = 0;
    finalize(cfg);
  } catch (const InvalidConfig& e) {
    throw InvalidConfig(source + (row ? ":" + std::to_string(row) : std::string()) + ": " +
                        e.what());
  }
  return cfg;
}

SimulationConfig read_simulation_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  return parse_simulation_config(in, path);
}

json to_json(const SimulationConfig& cfg) {
  const ScenarioSpec& s = cfg.spec;
  json noises = json::array();
  for (NoiseKind k : cfg.noises) noises.push_back(to_string(k));
  json methods = json::array();
  for (const MethodSpec& m : cfg.methods) {
    methods.push_back({{"name", m.name},
                       {"fit", to_json(m.cfg)},
                       {"criterion", to_string(m.criterion)},
                       {"residual_scale", to_string(m.scale)},
                       {"grid_size", m.grid_size},
                       {"grid_ratio", m.grid_ratio > 0.0 ? m.grid_ratio
                                                         : default_grid_ratio(s.n, s.p)}});
  }
  return {{"n", s.n},
          {"p", s.p},
          {"s", s.s},
          {"rho_x", s.rho_x},
          {"noise", noises},
          {"n_test", s.n_test},
          {"reps", s.reps},
          {"seed", s.seed},
          {"outlier_model",
           {{"rate", s.noise.outlier_rate},
            {"shift", "additive sign * U(low, high)"},
            {"low", s.noise.outlier_low},
            {"high", s.noise.outlier_high}}},
          {"t_df", s.noise.t_df},
          {"wide_sigma", s.noise.wide_sigma},
          {"methods", methods}};
}

void write_table_csv(std::ostream& out, const SimulationConfig& cfg,
                     const std::vector<ScenarioResult>& results) {
  out << "# heavylasso " << version() << " (" << git_hash() << ")\n";
  out << "# config " << to_json(cfg).dump() << '\n';
  out << "noise,method,l2sq_mean,l2sq_sd,l1_mean,l1_sd,linpred_mean,linpred_sd,pred_mean,"
         "pred_sd,reps_ok,reps_failed,kkt_checked,kkt_violations\n";
  for (const ScenarioResult& r : results) {
    for (const MethodOutcome& m : r.methods) {
      out << to_string(r.spec.noise.kind) << ',' << m.name;
      for (const Summary* s : {&m.l2sq, &m.l1, &m.linpred, &m.pred}) {
        out << ',' << format_double(s->mean) << ',' << format_double(s->sd);
      }
      out << ',' << m.records.size() << ',' << m.failed_reps.size() << ',' << m.kkt_checked
          << ',' << m.kkt_violations << '\n';
    }
  }
}

json table_json(const SimulationConfig& cfg, const std::vector<ScenarioResult>& results) {
  json rows = json::array();
  for (const ScenarioResult& r : results) {
    for (const MethodOutcome& m : r.methods) {
      json lambdas = json::array();
      for (double v : m.selected_lambda) lambdas.push_back(num(v));
      rows.push_back({{"noise", to_string(r.spec.noise.kind)},
                      {"method", m.name},
                      {"l2sq", summary_json(m.l2sq)},
                      {"l1", summary_json(m.l1)},
                      {"linpred", summary_json(m.linpred)},
                      {"pred", summary_json(m.pred)},
                      {"reps_ok", m.records.size()},
                      {"failed_reps", m.failed_reps},
                      {"kkt_checked", m.kkt_checked},
                      {"kkt_violations", m.kkt_violations},
                      {"kkt_worst", num(m.kkt_worst)},
                      {"selected_lambda", lambdas}});
    }
  }
  return {{"metadata", {{"tool", "heavylasso"}, {"version", version()}, {"git", git_hash()},
                        {"config", to_json(cfg)}}},
          {"rows", rows}};
}

json to_json(const TheoryReport& r) {
  json scores = json::array();
  for (const ScoreBoundResult& s : r.score_bounds) {
    scores.push_back({{"nu", s.nu},
                      {"bound", s.bound},
                      {"max_abs_score", s.max_abs_score},
                      {"argmax", s.argmax},
                      {"max_excess", s.max_excess}});
  }
  json checks = json::array();
  for (const auto& c : r.checks) {
    checks.push_back(
        {{"name", c.name}, {"hard", c.hard}, {"passed", c.passed}, {"detail", c.detail}});
  }
  const InvariantSuiteResult& inv = r.invariants;
  return {{"tool", "heavylasso"},
          {"version", version()},
          {"git", git_hash()},
          {"preset", r.preset},
          {"grad_supnorm", num(r.grad_supnorm)},
          {"bound_rhs", num(r.bound_rhs)},
          {"c1", num(r.c1)},
          {"cone_ratio", num(r.cone_ratio)},
          {"curvature_est", num(r.curvature_est)},
          {"delta", r.delta},
          {"grad_shrink_ratio", num(r.grad_shrink_ratio)},
          {"c1_spread", num(r.c1_spread)},
          {"cone_fraction_ok", num(r.cone_fraction_ok)},
          {"score_bounds", scores},
          {"invariants",
           {{"instances", inv.instances},
            {"descent_violations", inv.descent_violations},
            {"worst_increase", num(inv.worst_increase)},
            {"converged", inv.converged},
            {"kkt_violations", inv.kkt_violations},
            {"worst_kkt", num(inv.worst_kkt)}}},
          {"checks", checks},
          {"hard_failure", r.hard_failure()}};
}

TheoryReport theory_report_from_json(const json& j) {
  TheoryReport r;
  try {
    r.preset = j.at("preset").get<std::string>();
    r.grad_supnorm = from_num(j.at("grad_supnorm"));
    r.bound_rhs = from_num(j.at("bound_rhs"));
    r.c1 = from_num(j.at("c1"));
    r.cone_ratio = from_num(j.at("cone_ratio"));
    r.curvature_est = from_num(j.at("curvature_est"));
    r.delta = j.at("delta").get<double>();
    r.grad_shrink_ratio = from_num(j.at("grad_shrink_ratio"));
    r.c1_spread = from_num(j.at("c1_spread"));
    r.cone_fraction_ok = from_num(j.at("cone_fraction_ok"));
    for (const json& s : j.at("score_bounds")) {
      r.score_bounds.push_back({s.at("nu").get<double>(), s.at("bound").get<double>(),
                                s.at("max_abs_score").get<double>(), s.at("argmax").get<double>(),
                                s.at("max_excess").get<double>()});
    }
    const json& inv = j.at("invariants");
    r.invariants.instances = inv.at("instances").get<std::size_t>();
    r.invariants.descent_violations = inv.at("descent_violations").get<std::size_t>();
    r.invariants.worst_increase = from_num(inv.at("worst_increase"));
    r.invariants.converged = inv.at("converged").get<std::size_t>();
    r.invariants.kkt_violations = inv.at("kkt_violations").get<std::size_t>();
    r.invariants.worst_kkt = from_num(inv.at("worst_kkt"));
    for (const json& c : j.at("checks")) {
      r.checks.push_back({c.at("name").get<std::string>(), c.at("hard").get<bool>(),
                          c.at("passed").get<bool>(), c.at("detail").get<std::string>()});
    }
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("theory report JSON: ") + e.what());
  }
  return r;
}

}  // namespace heavylasso::io
