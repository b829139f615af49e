#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qnmtrace/resonance_finder.hpp"
#include "qnmtrace/trace_numerics.hpp"

namespace qnmtrace::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_config_error = 2;
inline constexpr int exit_numerical_failure = 3;

enum class Command { resonances, trace, compare, birman_krein, potential_info };
enum class PotentialKind { poschl_teller, regge_wheeler };
enum class OutputFormat { csv, json };

Command parse_command(std::string_view name);
const char* to_string(Command command);

struct PotentialSpec {
  PotentialKind kind = PotentialKind::poschl_teller;
  double ell = 1.0;
  double mass = 1.0;
  double cosmological_constant = 0.04;
};

/// Flat run configuration. Unset optionals take defaults that depend on the
/// potential kind; see resolve_defaults.
struct RunConfig {
  PotentialSpec potential;
  std::optional<SearchRegion> region;
  double tol = 1e-8;
  std::optional<double> grid_half_width;
  std::optional<int> grid_points;
  std::optional<std::vector<double>> times;
  std::optional<double> radius;  ///< truncation radius of the resonance sum
  double bump_center = 1.5;
  double bump_width = 0.5;
  std::optional<TraceMode> trace_mode;
  std::optional<double> support_threshold;
  int zero_resonance_multiplicity = 0;
  std::vector<std::string> inputs;  ///< compare: two CSV files
  std::string column = "numeric";   ///< compare: column joined on t
  std::string out;                  ///< empty writes to the output stream
  std::optional<OutputFormat> format;
  std::uint64_t seed = 0;
};

/// "a:step:b" (inclusive, rounded to the step count) or "t1,t2,...".
std::vector<double> parse_times(std::string_view text);
/// "re_min,re_max,im_min,im_max".
SearchRegion parse_region(std::string_view text);

/// Sets one key; keys match the long flag names with '-' or '_'.
void apply_setting(RunConfig& config, std::string_view key, std::string_view value);
/// key=value lines; '#' starts a comment; blank lines are ignored.
RunConfig parse_config(std::string_view text, RunConfig base = {});

/// Poschl–Teller: region [-3,3]×[-4.2,-0.1], L=12, N=1500, t=0.5:0.1:3, R=40, spectral.
/// Regge–Wheeler: region [-4.05,4.05]×[-4.05,-0.01], L=50, N=1999, t=1.5:0.1:3, R=4,
/// kernel_diagonal with support threshold 1e-3.
RunConfig resolve_defaults(RunConfig config);
/// Throws ConfigError. Expects a resolved config.
void validate(Command command, const RunConfig& config);

Potential build_potential(const PotentialSpec& spec);

/// Shortest of %.17g, so that parsing returns the same double.
std::string format_number(double value);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::vector<double> column(std::string_view name) const;
  bool operator==(const CsvTable&) const = default;
};

/// Comma separated, header row, LF line endings.
std::string write_csv(const CsvTable& table);
CsvTable read_csv(std::string_view text);

/// Sorted by Im descending (on a 1e-8 grid), then Re ascending.
std::vector<ZeroResult> output_order(std::vector<ZeroResult> zeros);
std::string resonances_to_json(std::span<const ZeroResult> zeros);
std::string resonances_to_csv(std::span<const ZeroResult> zeros);
std::vector<ZeroResult> resonances_from_json(std::string_view text);

CsvTable trace_table(const TraceCurve& numeric, const TraceCurve& reference, bool with_errors);
TraceCurve curve_from_csv(const CsvTable& table, std::string_view column);

/// Produces the artifact for a resolved, validated config.
std::string run_resonances(const RunConfig& config);
std::string run_trace(const RunConfig& config);
std::string run_compare(const RunConfig& config);
std::string run_birman_krein(const RunConfig& config);
std::string run_potential_info(const RunConfig& config);

/// Resolves, validates and runs; writes the artifact to config.out or `out`,
/// messages to `err`. Returns the exit code.
int run(Command command, const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace qnmtrace::cli
