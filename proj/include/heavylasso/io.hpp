#pragma once

// File formats: CSV datasets and coefficient files, JSON summaries, the flat
// key=value scenario file and the simulation result tables.
//
// CSV dialect: comma separator, mandatory header row, '.' decimal point, no
// quoting. Numbers are parsed with std::from_chars and written with
// "%.17g", so neither direction depends on the process locale.

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "heavylasso/path.hpp"
#include "heavylasso/simulation.hpp"
#include "heavylasso/theory.hpp"
#include "heavylasso/types.hpp"

namespace heavylasso::io {

/// Malformed input file. row/column are 1-based (row 1 is the header); 0
/// means "not applicable".
class FormatError : public InvalidInput {
 public:
  FormatError(const std::string& source, std::size_t row, std::size_t column,
              const std::string& message);
  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t row_, column_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

CsvTable read_csv(std::istream& in, const std::string& source = "<stream>");
CsvTable read_csv_file(const std::string& path);

/// Splits a table into (X, y); every column other than `response` becomes a
/// feature, in header order.
struct LabeledDataset {
  Dataset data;
  std::vector<std::string> feature_names;
};
LabeledDataset dataset_from_table(const CsvTable& table, const std::string& response,
                                  const std::string& source = "<stream>");

/// "%.17g"; non-finite values as inf, -inf, nan.
std::string format_double(double v);

void write_coefficients_csv(std::ostream& out, const std::vector<std::string>& names,
                            const Coefficients& coef, bool with_intercept);
void write_weights_csv(std::ostream& out, const std::vector<double>& weights);
void write_path_csv(std::ostream& out, const PathResult& path);

std::string version();
std::string git_hash();

nlohmann::json to_json(const FitConfig& cfg);
nlohmann::json fit_summary_json(const FitResult& fit, const FitConfig& cfg);
nlohmann::json path_summary_json(const PathResult& path, const FitConfig& cfg);

/// One simulation table: a list of noise scenarios sharing every other knob.
struct SimulationConfig {
  ScenarioSpec spec;  // spec.noise.kind is overwritten per entry of `noises`
  std::vector<NoiseKind> noises{NoiseKind::gauss};
  // Raw method settings; finalize() turns them into `methods`.
  std::vector<std::string> method_names{"student", "squared", "huber"};
  std::map<std::string, std::string> method_settings;
  std::vector<MethodSpec> methods;
};

/// Parses the flat scenario file: one `key = value` per line, '#' starts a
/// comment. Recognised keys: n p s rho_x noise (comma list) n_test reps seed
/// outlier_rate outlier_low outlier_high t_df wide_sigma methods (comma list)
/// criterion scale nu scale_c huber_delta tol outer_max inner_sweeps
/// grid_size grid_ratio. Unknown keys and malformed values are errors.
SimulationConfig parse_simulation_config(std::istream& in, const std::string& source = "<stream>");
SimulationConfig read_simulation_config(const std::string& path);

/// Applies one key=value setting; shared by the file parser and CLI flags.
void apply_setting(SimulationConfig& cfg, const std::string& key, const std::string& value);

/// Finalises method presets from accumulated settings and validates.
void finalize(SimulationConfig& cfg);

nlohmann::json to_json(const SimulationConfig& cfg);

/// Rows (noise, method), columns mean and sd of each metric plus failures.
/// Metadata lines start with '#'.
void write_table_csv(std::ostream& out, const SimulationConfig& cfg,
                     const std::vector<ScenarioResult>& results);
nlohmann::json table_json(const SimulationConfig& cfg, const std::vector<ScenarioResult>& results);

nlohmann::json to_json(const TheoryReport& report);
TheoryReport theory_report_from_json(const nlohmann::json& j);

}  // namespace heavylasso::io
