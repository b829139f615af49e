#include "qnmtrace/cli_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "qnmtrace/birman_krein.hpp"
#include "qnmtrace/errors.hpp"
#include "qnmtrace/poisson.hpp"

namespace qnmtrace::cli {
namespace {

using Json = nlohmann::ordered_json;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) return parts;
    start = pos + 1;
  }
}

double parse_double(std::string_view text, std::string_view what) {
  text = trim(text);
  double value = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size() || !std::isfinite(value)) {
    throw ConfigError("invalid number for " + std::string(what) + ": '" + std::string(text) + "'");
  }
  return value;
}

long long parse_integer(std::string_view text, std::string_view what) {
  text = trim(text);
  long long value = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size()) {
    throw ConfigError("invalid integer for " + std::string(what) + ": '" + std::string(text) + "'");
  }
  return value;
}

std::string normalized_key(std::string_view key) {
  std::string k(trim(key));
  while (!k.empty() && k.front() == '-') k.erase(k.begin());
  std::replace(k.begin(), k.end(), '_', '-');
  std::transform(k.begin(), k.end(), k.begin(), [](unsigned char c) { return std::tolower(c); });
  return k;
}

const char* kind_name(PotentialKind kind) {
  return kind == PotentialKind::poschl_teller ? "poschl_teller" : "regge_wheeler";
}


ZeroKind parse_kind(std::string_view name) {
  for (ZeroKind kind : {ZeroKind::resonance, ZeroKind::bound_state, ZeroKind::spurious}) {
    if (name == to_string(kind)) return kind;
  }
  throw ConfigError("unknown classification '" + std::string(name) + "'");
}

Grid grid_of(const RunConfig& config) { return make_grid(*config.grid_half_width, *config.grid_points); }

TraceOptions trace_options(const RunConfig& config) {
  TraceOptions options;
  options.mode = *config.trace_mode;
  options.support_threshold = *config.support_threshold;
  return options;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

Command parse_command(std::string_view name) {
  for (Command c : {Command::resonances, Command::trace, Command::compare, Command::birman_krein,
                    Command::potential_info}) {
    if (name == to_string(c)) return c;
  }
  throw ConfigError("unknown command '" + std::string(name) + "'");
}

const char* to_string(Command command) {
  switch (command) {
    case Command::resonances:
      return "resonances";
    case Command::trace:
      return "trace";
    case Command::compare:
      return "compare";
    case Command::birman_krein:
      return "birman-krein";
    case Command::potential_info:
      return "potential-info";
  }
  return "unknown";
}

std::vector<double> parse_times(std::string_view text) {
  text = trim(text);
  if (text.empty()) throw ConfigError("empty time list");
  std::vector<double> times;
  if (text.find(':') != std::string_view::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw ConfigError("times range must be start:step:stop");
    const double start = parse_double(parts[0], "times");
    const double step = parse_double(parts[1], "times");
    const double stop = parse_double(parts[2], "times");
    if (!(step > 0.0) || stop < start) throw ConfigError("times range needs step > 0 and stop >= start");
    const long count = std::lround(std::floor((stop - start) / step + 1e-9));
    for (long k = 0; k <= count; ++k) times.push_back(start + k * step);
    return times;
  }
  for (auto part : split(text, ',')) times.push_back(parse_double(part, "times"));
  return times;
}

SearchRegion parse_region(std::string_view text) {
  const auto parts = split(text, ',');
  if (parts.size() != 4) throw ConfigError("region must be re_min,re_max,im_min,im_max");
  return {parse_double(parts[0], "region"), parse_double(parts[1], "region"), parse_double(parts[2], "region"),
          parse_double(parts[3], "region")};
}

void apply_setting(RunConfig& config, std::string_view raw_key, std::string_view raw_value) {
  const std::string key = normalized_key(raw_key);
  const std::string_view value = trim(raw_value);
  if (key == "potential") {
    if (value == "poschl_teller" || value == "poschl-teller") {
      config.potential.kind = PotentialKind::poschl_teller;
    } else if (value == "regge_wheeler" || value == "regge-wheeler") {
      config.potential.kind = PotentialKind::regge_wheeler;
    } else {
      throw ConfigError("unknown potential '" + std::string(value) + "'");
    }
  } else if (key == "ell") {
    config.potential.ell = parse_double(value, key);
  } else if (key == "mass" || key == "m") {
    config.potential.mass = parse_double(value, key);
  } else if (key == "lambda-cosmo" || key == "lambda") {
    config.potential.cosmological_constant = parse_double(value, key);
  } else if (key == "region") {
    config.region = parse_region(value);
  } else if (key == "tol") {
    config.tol = parse_double(value, key);
  } else if (key == "grid-l") {
    config.grid_half_width = parse_double(value, key);
  } else if (key == "grid-n") {
    config.grid_points = static_cast<int>(parse_integer(value, key));
  } else if (key == "times") {
    config.times = parse_times(value);
  } else if (key == "radius") {
    config.radius = parse_double(value, key);
  } else if (key == "bump-center") {
    config.bump_center = parse_double(value, key);
  } else if (key == "bump-width") {
    config.bump_width = parse_double(value, key);
  } else if (key == "trace-mode") {
    if (value == "spectral") {
      config.trace_mode = TraceMode::spectral;
    } else if (value == "kernel_diagonal" || value == "kernel-diagonal") {
      config.trace_mode = TraceMode::kernel_diagonal;
    } else {
      throw ConfigError("unknown trace mode '" + std::string(value) + "'");
    }
  } else if (key == "support-threshold") {
    config.support_threshold = parse_double(value, key);
  } else if (key == "zero-multiplicity") {
    config.zero_resonance_multiplicity = static_cast<int>(parse_integer(value, key));
  } else if (key == "inputs") {
    config.inputs.clear();
    for (auto part : split(value, ',')) config.inputs.emplace_back(part);
  } else if (key == "column") {
    config.column = std::string(value);
  } else if (key == "out") {
    config.out = std::string(value);
  } else if (key == "format") {
    if (value == "csv") {
      config.format = OutputFormat::csv;
    } else if (value == "json") {
      config.format = OutputFormat::json;
    } else {
      throw ConfigError("unknown format '" + std::string(value) + "'");
    }
  } else if (key == "seed") {
    config.seed = static_cast<std::uint64_t>(parse_integer(value, key));
  } else {
    throw ConfigError("unknown setting '" + std::string(raw_key) + "'");
  }
}

RunConfig parse_config(std::string_view text, RunConfig base) {
  int line_number = 0;
  for (auto line : split(text, '\n')) {
    ++line_number;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = trim(line.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_number) + ": expected key=value");
    }
    apply_setting(base, line.substr(0, eq), line.substr(eq + 1));
  }
  return base;
}

RunConfig resolve_defaults(RunConfig config) {
  const bool rw = config.potential.kind == PotentialKind::regge_wheeler;
  if (!config.region) {
    config.region = rw ? SearchRegion{-4.05, 4.05, -4.05, -0.01} : SearchRegion{-3.0, 3.0, -4.2, -0.1};
  }
  if (!config.grid_half_width) config.grid_half_width = rw ? 50.0 : 12.0;
  if (!config.grid_points) config.grid_points = rw ? 1999 : 1500;
  if (!config.times) config.times = parse_times(rw ? "1.5:0.1:3" : "0.5:0.1:3");
  if (!config.radius) config.radius = rw ? 4.0 : 40.0;
  if (!config.trace_mode) config.trace_mode = rw ? TraceMode::kernel_diagonal : TraceMode::spectral;
  if (!config.support_threshold) config.support_threshold = rw ? 1e-3 : 1e-6;
  return config;
}

void validate(Command command, const RunConfig& config) {
  const SearchRegion& r = *config.region;
  if (!(r.re_max > r.re_min) || !(r.im_max > r.im_min)) throw ConfigError("region must satisfy min < max");
  if (!(config.tol > 0.0)) throw ConfigError("tol must be positive");
  if (!(*config.grid_half_width > 0.0) || *config.grid_points < 3) {
    throw ConfigError("grid needs L > 0 and N >= 3");
  }
  for (double t : *config.times) {
    if (!(t > 0.0)) throw ConfigError("times must be positive");
  }
  if (!(*config.radius > 0.0)) throw ConfigError("radius must be positive");
  if (!(config.bump_width > 0.0)) throw ConfigError("bump width must be positive");
  if (!(*config.support_threshold > 0.0)) throw ConfigError("support threshold must be positive");
  if (config.zero_resonance_multiplicity < 0) throw ConfigError("zero multiplicity must be nonnegative");
  const PotentialSpec& p = config.potential;
  if (p.kind == PotentialKind::poschl_teller && !(p.ell >= 0.0)) throw ConfigError("ell must be nonnegative");
  if (p.kind == PotentialKind::regge_wheeler) {
    if (!(p.ell >= 0.0) || p.ell != std::floor(p.ell)) throw ConfigError("ell must be a nonnegative integer");
    if (!(p.mass > 0.0) || !(p.cosmological_constant > 0.0) || 9.0 * p.mass * p.mass * p.cosmological_constant >= 1.0) {
      throw ConfigError("SdS parameters need m > 0, Λ > 0 and 9m²Λ < 1");
    }
  }
  if (command == Command::compare && config.inputs.size() != 2) {
    throw ConfigError("compare needs exactly two input files");
  }
}

Potential build_potential(const PotentialSpec& spec) {
  if (spec.kind == PotentialKind::poschl_teller) return make_poschl_teller(spec.ell);
  return make_regge_wheeler(make_sds_geometry(spec.mass, spec.cosmological_constant),
                            static_cast<int>(spec.ell));
}

std::string format_number(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

std::vector<double> CsvTable::column(std::string_view name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw ConfigError("CSV has no column '" + std::string(name) + "'");
  const auto index = static_cast<std::size_t>(it - header.begin());
  std::vector<double> values;
  values.reserve(rows.size());
  for (const auto& row : rows) values.push_back(parse_double(row.at(index), name));
  return values;
}

std::string write_csv(const CsvTable& table) {
  std::string text;
  auto append_row = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) text += ',';
      text += cells[i];
    }
    text += '\n';
  };
  append_row(table.header);
  for (const auto& row : table.rows) append_row(row);
  return text;
}

CsvTable read_csv(std::string_view text) {
  CsvTable table;
  for (auto line : split(text, '\n')) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    for (auto cell : split(line, ',')) cells.emplace_back(cell);
    if (table.header.empty()) {
      table.header = std::move(cells);
    } else {
      if (cells.size() != table.header.size()) throw ConfigError("CSV row width differs from header");
      table.rows.push_back(std::move(cells));
    }
  }
  if (table.header.empty()) throw ConfigError("CSV has no header");
  return table;
}

std::vector<ZeroResult> output_order(std::vector<ZeroResult> zeros) {
  // Mirror pairs agree in Im only to rounding, so Im is compared on a 1e-8 grid.
  auto im_key = [](const ZeroResult& z) { return std::llround(z.lambda.imag() * 1e8); };
  std::stable_sort(zeros.begin(), zeros.end(), [&](const ZeroResult& a, const ZeroResult& b) {
    if (im_key(a) != im_key(b)) return im_key(a) > im_key(b);
    return a.lambda.real() < b.lambda.real();
  });
  return zeros;
}

std::string resonances_to_json(std::span<const ZeroResult> zeros) {
  Json array = Json::array();
  for (const ZeroResult& z : zeros) {
    Json record;
    record["re"] = z.lambda.real();
    record["im"] = z.lambda.imag();
    record["multiplicity"] = z.multiplicity;
    record["classification"] = to_string(z.classification);
    record["residual"] = z.newton_residual;
    array.push_back(std::move(record));
  }
  return array.dump(2) + "\n";
}

std::string resonances_to_csv(std::span<const ZeroResult> zeros) {
  CsvTable table{{"re", "im", "multiplicity", "classification", "residual"}, {}};
  for (const ZeroResult& z : zeros) {
    table.rows.push_back({format_number(z.lambda.real()), format_number(z.lambda.imag()),
                          std::to_string(z.multiplicity), to_string(z.classification),
                          format_number(z.newton_residual)});
  }
  return write_csv(table);
}

std::vector<ZeroResult> resonances_from_json(std::string_view text) {
  Json array;
  try {
    array = Json::parse(text);
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("malformed resonance JSON: ") + e.what());
  }
  if (!array.is_array()) throw ConfigError("resonance JSON must be an array");
  std::vector<ZeroResult> zeros;
  for (const auto& record : array) {
    try {
      ZeroResult z;
      z.lambda = cplx(record.at("re").get<double>(), record.at("im").get<double>());
      z.multiplicity = record.at("multiplicity").get<int>();
      z.classification = parse_kind(record.at("classification").get<std::string>());
      z.newton_residual = record.at("residual").get<double>();
      zeros.push_back(z);
    } catch (const Json::exception& e) {
      throw ConfigError(std::string("malformed resonance record: ") + e.what());
    }
  }
  return zeros;
}

CsvTable trace_table(const TraceCurve& numeric, const TraceCurve& reference, bool with_errors) {
  if (numeric.times != reference.times) throw GridMismatchError("trace curves on different time grids");
  CsvTable table;
  table.header = with_errors ? std::vector<std::string>{"t", "numeric", "analytic", "abs_err", "rel_err"}
                             : std::vector<std::string>{"t", "numeric", "poisson_rhs"};
  for (std::size_t i = 0; i < numeric.times.size(); ++i) {
    const double a = numeric.values[i];
    const double b = reference.values[i];
    std::vector<std::string> row{format_number(numeric.times[i]), format_number(a), format_number(b)};
    if (with_errors) {
      const double err = std::abs(a - b);
      row.push_back(format_number(err));
      row.push_back(format_number(err / std::max(std::abs(b), 0.05)));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

TraceCurve curve_from_csv(const CsvTable& table, std::string_view column) {
  TraceCurve curve;
  curve.times = table.column("t");
  curve.values = table.column(column);
  curve.meta = std::string(column);
  return curve;
}

std::string run_resonances(const RunConfig& config) {
  const Potential pot = build_potential(config.potential);
  const auto zeros = output_order(find_zeros(pot, *config.region, config.tol));
  return config.format == OutputFormat::csv ? resonances_to_csv(zeros) : resonances_to_json(zeros);
}

std::string run_trace(const RunConfig& config) {
  const Potential pot = build_potential(config.potential);
  const auto& times = *config.times;
  const TraceCurve numeric = flat_trace_difference(pot, grid_of(config), times, trace_options(config));
  if (config.potential.kind == PotentialKind::poschl_teller) {
    return write_csv(trace_table(numeric, pt_closed_form(config.potential.ell, times), true));
  }
  PoissonConfig poisson;
  poisson.truncation_radius = *config.radius;
  poisson.resonances = find_zeros(pot, *config.region, config.tol);
  poisson.A_plus = pot.plus.decay_rate;
  poisson.A_minus = pot.minus.decay_rate;
  poisson.times = times;
  poisson.zero_resonance_multiplicity = config.zero_resonance_multiplicity;
  return write_csv(trace_table(numeric, poisson_rhs(poisson).curve, false));
}

std::string run_compare(const RunConfig& config) {
  const TraceCurve a = curve_from_csv(read_csv(read_file(config.inputs[0])), config.column);
  const TraceCurve b = curve_from_csv(read_csv(read_file(config.inputs[1])), config.column);
  const CurveComparison c = compare_curves(a, b);
  Json report;
  report["max_abs_error"] = c.max_abs_error;
  report["max_rel_error"] = c.max_rel_error;
  report["worst_time"] = c.worst_time;
  report["points"] = a.times.size();
  return report.dump() + "\n";
}

std::string run_birman_krein(const RunConfig& config) {
  const Potential pot = build_potential(config.potential);
  const TestFunction f = make_bump(config.bump_center, config.bump_width);
  const BirmanKreinReport r = birman_krein_check(f, pot, grid_of(config), config.zero_resonance_multiplicity);
  Json report;
  report["lhs"] = r.lhs;
  report["rhs"] = r.rhs.value;
  report["rel_error"] = r.rel_error;
  Json settings;
  settings["potential"] = kind_name(config.potential.kind);
  settings["ell"] = config.potential.ell;
  settings["bump_center"] = config.bump_center;
  settings["bump_width"] = config.bump_width;
  settings["grid_L"] = *config.grid_half_width;
  settings["grid_N"] = *config.grid_points;
  settings["zero_multiplicity"] = config.zero_resonance_multiplicity;
  settings["lambda_max"] = r.rhs.lambda_max;
  settings["tail_warning"] = r.rhs.tail_warning;
  settings["negative_eigenvalues"] = r.negative_eigenvalues;
  report["settings"] = std::move(settings);
  return report.dump() + "\n";
}

std::string run_potential_info(const RunConfig& config) {
  const Potential pot = build_potential(config.potential);
  Json info;
  info["name"] = pot.name;
  info["ell"] = config.potential.ell;
  info["A_plus"] = pot.plus.decay_rate;
  info["A_minus"] = pot.minus.decay_rate;
  info["match_point_plus"] = pot.plus.match_point;
  info["match_point_minus"] = pot.minus.match_point;
  info["tail_residual_plus"] = pot.plus.residual;
  info["tail_residual_minus"] = pot.minus.residual;
  info["tail_plus"] = pot.plus.coefficients;
  info["tail_minus"] = pot.minus.coefficients;
  if (pot.radial) {
    const SdSGeometry& g = pot.radial->geometry;
    Json sds;
    sds["mass"] = g.mass;
    sds["lambda_cosmo"] = g.cosmological_constant;
    sds["r_minus"] = g.r_minus;
    sds["r_plus"] = g.r_plus;
    sds["r_third"] = g.r_third;
    sds["A_minus"] = g.A_minus;
    sds["A_plus"] = g.A_plus;
    sds["r0"] = g.r0;
    info["sds"] = std::move(sds);
  }
  return info.dump(2) + "\n";
}

int run(Command command, const RunConfig& raw, std::ostream& out, std::ostream& err) {
  try {
    const RunConfig config = resolve_defaults(raw);
    validate(command, config);
    std::string artifact;
    switch (command) {
      case Command::resonances:
        artifact = run_resonances(config);
        break;
      case Command::trace:
        artifact = run_trace(config);
        break;
      case Command::compare:
        artifact = run_compare(config);
        break;
      case Command::birman_krein:
        artifact = run_birman_krein(config);
        break;
      case Command::potential_info:
        artifact = run_potential_info(config);
        break;
    }
    if (config.out.empty()) {
      out << artifact;
    } else {
      std::ofstream file(config.out, std::ios::binary);
      if (!(file << artifact)) throw ConfigError("cannot write '" + config.out + "'");
    }
    return exit_ok;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return exit_config_error;
  } catch (const GridMismatchError& e) {
    err << "config error: " << e.what() << '\n';
    return exit_config_error;
  } catch (const Error& e) {
    err << "numerical failure: " << e.what() << '\n';
    return exit_numerical_failure;
  }
}

}  // namespace qnmtrace::cli
