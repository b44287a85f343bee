#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "nwidths/manifolds.hpp"

namespace nwlab {

enum class Experiment {
  Weyl,
  Growth,
  Partition,
  KernelDecay,
  CrossSection,
  Young,
  BandNorms,
  ApproxRate,
  Besov,
  Nikolskii,
  PolySpan,
};

enum class Format { Csv, Json };

std::string to_string(Experiment e);
Experiment parse_experiment(const std::string& name);
const std::vector<std::string>& experiment_names();

/// Thrown for invalid configurations; maps to exit status 2.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RunConfig {
  Experiment experiment = Experiment::Weyl;
  nwidths::ManifoldKind model = nwidths::ManifoldKind::Circle;
  std::optional<double> p;
  std::optional<double> q;
  std::optional<double> r;
  std::optional<double> alpha;
  std::optional<double> omega_max;
  std::optional<int> m_min;
  std::optional<int> m_max;
  std::vector<double> t_list;
  int resolution = 0;  ///< 0 picks the experiment default
  std::uint64_t seed = 1;
  std::optional<double> tol;
  int l_min = 32;
  int l_max = 4096;
  double t_besov = 2.0;
  int k = 0;
  std::optional<double> d;
  int degree = 3;
  int samples = 0;  ///< 0 picks the experiment default
  Format format = Format::Json;
  std::string out = "-";
  bool timing = false;
};

/// Parses "inf", "infinity" and ordinary numbers; throws UsageError.
double parse_real(const std::string& text, const std::string& key);
std::vector<double> parse_real_list(const std::string& text, const std::string& key);

/// Flat key=value lines. Blank lines and lines starting with '#' are skipped.
std::map<std::string, std::string> parse_config_text(const std::string& text);
std::map<std::string, std::string> read_config_file(const std::string& path);

/// Applies entries whose key is not in `explicit_keys`. Keys are the long
/// flag names without dashes. Unknown keys throw UsageError.
void apply_config_entries(RunConfig& config, const std::map<std::string, std::string>& entries,
                          const std::set<std::string>& explicit_keys);

/// Checks parameter ranges for the selected experiment; throws UsageError.
void validate(const RunConfig& config);

using Cell = std::variant<double, std::string>;

struct Flag {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double tolerance = 0.0;
};

struct Report {
  std::string experiment;
  std::string anchor;
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::pair<std::string, double>> fits;
  std::vector<Flag> flags;
  std::vector<std::string> notes;
  double duration_seconds = 0.0;

  [[nodiscard]] bool passed() const;
  [[nodiscard]] std::optional<double> fit(const std::string& name) const;
  [[nodiscard]] const Flag* flag(const std::string& name) const;
};

/// Runs one experiment. Precondition failures throw UsageError; numeric
/// failures inside the experiment become failed flags.
Report run(const RunConfig& config);

/// 17 significant digits; inf and nan spelled out.
std::string format_number(double v);

void emit_csv(const Report& report, std::ostream& os);
void emit_json(const Report& report, std::ostream& os, bool include_timing = false);
std::string to_json_string(const Report& report, bool include_timing = false);

/// Writes to `path` ("-" is stdout). Throws std::runtime_error on I/O failure.
void emit(const Report& report, Format format, const std::string& path,
          bool include_timing = false);

struct CsvTable {
  std::vector<std::string> metadata;  ///< '#' lines without the marker
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(std::istream& is);

}  // namespace nwlab
