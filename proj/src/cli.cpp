#include "nvberry/cli.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "nvberry/measurement.hpp"
#include "nvberry/protocols.hpp"
#include "nvberry/trajectory.hpp"

namespace nvberry {

namespace {

std::string trim(const std::string& s) {
  const char* ws = " \t\r\n";
  const auto a = s.find_first_not_of(ws);
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(ws);
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& v, const std::string& where) {
  errno = 0;
  const char* s = v.c_str();
  char* end = nullptr;
  const double x = std::strtod(s, &end);
  if (end == s || *end != '\0' || errno == ERANGE || !std::isfinite(x))
    throw ParseError(where + ": expected a finite number, got '" + v + "'");
  return x;
}

long long parse_integer(const std::string& v, const std::string& where) {
  errno = 0;
  const char* s = v.c_str();
  char* end = nullptr;
  const long long x = std::strtoll(s, &end, 10);
  if (end != s && *end == '\0' && errno != ERANGE) return x;
  const double d = parse_double(v, where);
  const double r = std::round(d);
  if (std::abs(d - r) > 1e-9 * std::max(1.0, std::abs(d)))
    throw ParseError(where + ": expected an integer, got '" + v + "'");
  return static_cast<long long>(r);
}

std::uint64_t parse_unsigned(const std::string& v, const std::string& where) {
  const long long x = parse_integer(v, where);
  if (x < 0) throw ParseError(where + ": expected a nonnegative integer, got '" + v + "'");
  return static_cast<std::uint64_t>(x);
}

GaugeChoice parse_gauge(const std::string& v, const std::string& where) {
  if (v == "raw") return GaugeChoice::Raw;
  if (v == "microwave_fixed") return GaugeChoice::MicrowaveFixed;
  throw ParseError(where + ": gauge must be raw or microwave_fixed, got '" + v + "'");
}

const char* gauge_name(GaugeChoice g) {
  return g == GaugeChoice::Raw ? "raw" : "microwave_fixed";
}

PropagationMethod parse_method(const std::string& v, const std::string& where) {
  if (v == "exponential") return PropagationMethod::PiecewiseExponential;
  if (v == "rk4") return PropagationMethod::RK4;
  throw ParseError(where + ": method must be exponential or rk4, got '" + v + "'");
}

DecoherenceSettings::Kind parse_model(const std::string& v, const std::string& where) {
  if (v == "auto") return DecoherenceSettings::Auto;
  if (v == "none") return DecoherenceSettings::None;
  if (v == "t2star") return DecoherenceSettings::T2Star;
  if (v == "t2") return DecoherenceSettings::T2;
  throw ParseError(where + ": model must be auto, none, t2star or t2, got '" + v + "'");
}

const std::vector<std::string> kSections = {"geometry",    "numeric",  "decoherence", "readout",
                                            "sensitivity", "protocol", "sweep"};

const std::vector<std::pair<std::string, std::string>> kKeys = {
    {"geometry", "omega"},          {"geometry", "theta"},
    {"geometry", "theta0"},         {"geometry", "phi0"},
    {"geometry", "rotations"},      {"geometry", "start_offset"},
    {"geometry", "retard"},         {"geometry", "m"},
    {"numeric", "gauge"},           {"numeric", "method"},
    {"numeric", "dt"},              {"numeric", "tolerance"},
    {"numeric", "splitting_ratio"}, {"decoherence", "model"},
    {"decoherence", "t2star"},      {"decoherence", "t2"},
    {"readout", "repetitions"},     {"readout", "efficiency"},
    {"readout", "noise"},           {"readout", "dark_to_bright"},
    {"readout", "seed"},            {"readout", "estimate_repetitions"},
    {"sensitivity", "overhead"},    {"sensitivity", "measurement_time"},
    {"sensitivity", "total_time"},  {"protocol", "splitting_field"},
    {"sweep", "parameter"},         {"sweep", "min"},
    {"sweep", "max"},               {"sweep", "count"},
    {"sweep", "target"}};

void apply_field(RunConfig& c, const std::string& sec, const std::string& key,
                 const std::string& value, const std::string& where) {
  if (std::find(kSections.begin(), kSections.end(), sec) == kSections.end())
    throw ParseError(where + ": unknown section [" + sec + "]");
  const std::string full = where + " " + sec + "." + key;
  auto num = [&] { return parse_double(value, full); };
  auto integer = [&] { return parse_integer(value, full); };

  if (sec == "geometry") {
    if (key == "omega") { c.geometry.omega = num(); return; }
    if (key == "theta") { c.geometry.theta = num(); return; }
    if (key == "theta0") { c.geometry.theta0 = num(); return; }
    if (key == "phi0") { c.geometry.phi0 = num(); return; }
    if (key == "rotations") { c.geometry.rotations = static_cast<int>(integer()); return; }
    if (key == "start_offset") { c.geometry.start_offset = num(); return; }
    if (key == "retard") { c.geometry.retard = num(); return; }
    if (key == "m") { c.geometry.m = static_cast<int>(integer()); return; }
  } else if (sec == "numeric") {
    if (key == "gauge") { c.numeric.gauge = parse_gauge(value, full); return; }
    if (key == "method") { c.numeric.method = parse_method(value, full); return; }
    if (key == "dt") { c.numeric.dt = num(); return; }
    if (key == "tolerance") { c.numeric.tolerance = num(); return; }
    if (key == "splitting_ratio") { c.numeric.splitting_ratio = num(); return; }
  } else if (sec == "decoherence") {
    if (key == "model") { c.decoherence.model = parse_model(value, full); return; }
    if (key == "t2star") { c.decoherence.t2star = num(); return; }
    if (key == "t2") { c.decoherence.t2 = num(); return; }
  } else if (sec == "readout") {
    if (key == "repetitions") { c.readout.repetitions = parse_unsigned(value, full); return; }
    if (key == "efficiency") { c.readout.efficiency = num(); return; }
    if (key == "noise") { c.readout.noise = value; return; }
    if (key == "dark_to_bright") { c.readout.dark_to_bright = num(); return; }
    if (key == "seed") { c.readout.seed = parse_unsigned(value, full); return; }
    if (key == "estimate_repetitions") {
      c.readout.estimate_repetitions = parse_unsigned(value, full);
      return;
    }
  } else if (sec == "sensitivity") {
    if (key == "overhead") { c.sensitivity.overhead = num(); return; }
    if (key == "measurement_time") { c.sensitivity.measurement_time = num(); return; }
    if (key == "total_time") { c.sensitivity.total_time = num(); return; }
  } else if (sec == "protocol") {
    if (key == "splitting_field") { c.protocol.splitting_field = num(); return; }
  } else if (sec == "sweep") {
    if (key == "parameter") { c.sweep.parameter = value; return; }
    if (key == "min") { c.sweep.min = num(); return; }
    if (key == "max") { c.sweep.max = num(); return; }
    if (key == "count") { c.sweep.count = static_cast<int>(integer()); return; }
    if (key == "target") { c.sweep.target = value; return; }
  }
  throw ParseError(where + ": unknown key '" + key + "' in section [" + sec + "]");
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

struct Cell {
  enum Kind { Number, Integer, Text, Blank } kind = Blank;
  std::string column;
  double number = 0.0;
  std::uint64_t integer = 0;
  std::string text;
};

Cell num(std::string col, double v) { return {Cell::Number, std::move(col), v, 0, {}}; }
Cell uint_cell(std::string col, std::uint64_t v) { return {Cell::Integer, std::move(col), 0.0, v, {}}; }
Cell txt(std::string col, std::string v) { return {Cell::Text, std::move(col), 0.0, 0, std::move(v)}; }
Cell blank(std::string col) { return {Cell::Blank, std::move(col), 0.0, 0, {}}; }

using Row = std::vector<Cell>;

void emit(const std::vector<Row>& rows, const RunConfig& cfg, std::ostream& out) {
  std::ofstream file;
  std::ostream* sink = &out;
  if (!cfg.out_path.empty()) {
    file.open(cfg.out_path);
    if (!file) throw ValidationError("cannot open output file '" + cfg.out_path + "'");
    sink = &file;
  }
  if (rows.empty()) return;
  if (cfg.json) {
    for (const Row& row : rows) {
      nlohmann::ordered_json obj;
      for (const Cell& c : row) {
        switch (c.kind) {
          case Cell::Number: obj[c.column] = c.number; break;
          case Cell::Integer: obj[c.column] = c.integer; break;
          case Cell::Text: obj[c.column] = c.text; break;
          case Cell::Blank: obj[c.column] = nullptr; break;
        }
      }
      *sink << obj.dump() << "\n";
    }
    return;
  }
  for (std::size_t i = 0; i < rows[0].size(); ++i)
    *sink << (i ? "," : "") << csv_escape(rows[0][i].column);
  *sink << "\n";
  for (const Row& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) *sink << ",";
      switch (row[i].kind) {
        case Cell::Number: *sink << fmt_double(row[i].number); break;
        case Cell::Integer: *sink << std::to_string(row[i].integer); break;
        case Cell::Text: *sink << csv_escape(row[i].text); break;
        case Cell::Blank: break;
      }
    }
    *sink << "\n";
  }
}

DecoherenceModel model_for(const RunConfig& c, bool ramsey) {
  switch (c.decoherence.model) {
    case DecoherenceSettings::None: return {DecoherenceModel::None, 0.0};
    case DecoherenceSettings::T2Star: return {DecoherenceModel::GaussianT2Star, c.decoherence.t2star};
    case DecoherenceSettings::T2: return {DecoherenceModel::ExponentialT2, c.decoherence.t2};
    case DecoherenceSettings::Auto: break;
  }
  return ramsey ? DecoherenceModel{DecoherenceModel::GaussianT2Star, c.decoherence.t2star}
                : DecoherenceModel{DecoherenceModel::ExponentialT2, c.decoherence.t2};
}

const char* model_name(const DecoherenceModel& m) {
  switch (m.kind) {
    case DecoherenceModel::GaussianT2Star: return "t2star";
    case DecoherenceModel::ExponentialT2: return "t2";
    case DecoherenceModel::None: break;
  }
  return "none";
}

ReadoutParams readout_for(const RunConfig& c) {
  ReadoutParams p;
  p.repetitions = c.readout.repetitions;
  p.efficiency = c.readout.efficiency;
  p.noise = c.readout.noise == "poisson" ? ReadoutParams::Poisson : ReadoutParams::Gaussian;
  p.dark_to_bright = c.readout.dark_to_bright;
  return p;
}

Row berry_row(const RunConfig& c) {
  const auto& g = c.geometry;
  require_valid_m(g.m);
  Trajectory traj = ramsey_trajectory(g.omega, g.theta, kTwoPi);
  PhaseResult analytic = geometric_phase(traj, g.m, c.numeric.gauge);

  PhysicalConstants pc;
  pc.zero_field_splitting = c.numeric.splitting_ratio * g.omega;
  PropagationConfig prop{c.numeric.method, c.numeric.dt, c.numeric.tolerance};
  PhaseDecomposition numeric = extract_geometric_phase(traj, g.m, c.numeric.gauge, prop, pc);

  return {num("omega", g.omega),
          num("theta", g.theta),
          num("m", g.m),
          txt("gauge", gauge_name(c.numeric.gauge)),
          num("splitting_ratio", c.numeric.splitting_ratio),
          num("phase_analytic", analytic.geometric),
          num("phase_numeric", numeric.geometric),
          num("phase_difference", numeric.geometric - analytic.geometric),
          num("solid_angle", analytic.solid_angle.value_or(0.0)),
          num("margin", numeric.margin)};
}

Row protocol_row(const RunConfig& c, bool ramsey) {
  const auto& g = c.geometry;
  DecoherenceModel model = model_for(c, ramsey);
  PhysicalConstants pc;
  SpindleConfig spindle{g.omega, g.theta0, g.start_offset};

  ProtocolResult r = ramsey ? run_ramsey(g.omega, g.theta, g.phi0, g.retard, model, pc)
                            : run_echo(spindle, g.rotations, g.retard, model, pc);
  // readout noise is inverted at the steepest fringe point, so the Monte Carlo
  // estimate retards the closing pulse to put the prediction at quadrature
  const double op_retard = kPi / 2.0 - r.phase_estimate;
  ProtocolResult op = ramsey ? run_ramsey(g.omega, g.theta, g.phi0, op_retard, model, pc)
                             : run_echo(spindle, g.rotations, op_retard, model, pc);

  std::vector<ProtocolResult> reps(c.readout.estimate_repetitions, op);
  ReadoutParams rp = readout_for(c);
  EstimateResult est = end_to_end_estimate(reps, rp, c.readout.seed);
  const double predicted = phase_uncertainty(rp) / r.coherence_factor;

  Row row{num("omega", g.omega)};
  if (ramsey) {
    row.push_back(num("theta", g.theta));
    row.push_back(num("phi0", g.phi0));
  } else {
    row.push_back(num("theta0", g.theta0));
    row.push_back(uint_cell("rotations", static_cast<std::uint64_t>(g.rotations)));
    row.push_back(num("start_offset", g.start_offset));
  }
  row.push_back(num("retard", g.retard));
  row.push_back(txt("model", model_name(model)));
  row.push_back(num("timescale", model.timescale));
  row.push_back(num("duration", r.duration));
  row.push_back(num("margin", r.margin));
  row.push_back(num("phase", r.phase_estimate));
  row.push_back(num("population", r.population_m0));
  row.push_back(num("coherence", r.coherence_factor));
  row.push_back(uint_cell("repetitions", c.readout.repetitions));
  row.push_back(num("efficiency", c.readout.efficiency));
  row.push_back(txt("noise", c.readout.noise));
  row.push_back(uint_cell("seed", c.readout.seed));
  row.push_back(uint_cell("estimate_repetitions", c.readout.estimate_repetitions));
  row.push_back(num("estimate_mean", est.phase_mean));
  row.push_back(num("estimate_std", est.phase_std));
  row.push_back(num("estimate_std_predicted", predicted));
  return row;
}

std::vector<Row> sensitivity_rows(const RunConfig& c) {
  auto make = [&](const char* protocol, double coherence_time) {
    SensitivityParams p;
    p.efficiency = c.readout.efficiency;
    p.omega = c.geometry.omega;
    p.coherence_time = coherence_time;
    p.overhead = c.sensitivity.overhead;
    p.measurement_time = c.sensitivity.measurement_time;
    p.total_time = c.sensitivity.total_time;
    const double cycle =
        p.measurement_time > 0.0 ? p.measurement_time : p.overhead * coherence_time;
    return Row{txt("protocol", protocol),
               num("coherence_time", coherence_time),
               num("efficiency", p.efficiency),
               num("omega", p.omega),
               num("overhead", p.overhead),
               num("measurement_time", cycle),
               num("total_time", p.total_time),
               num("sensitivity", relative_sensitivity(p)),
               num("uncertainty", relative_uncertainty(p))};
  };
  return {make("echo", c.decoherence.t2), make("ramsey", c.decoherence.t2star)};
}

Cell pick(const Row& inner, const std::string& col, const std::string& as) {
  for (const Cell& c : inner)
    if (c.column == col) {
      Cell out = c;
      out.column = as;
      return out;
    }
  return blank(as);
}

std::vector<Row> sweep_rows(const RunConfig& cfg) {
  const Command target = parse_command(cfg.sweep.target);
  std::vector<Row> rows;
  for (int i = 0; i < cfg.sweep.count; ++i) {
    const double value =
        cfg.sweep.count == 1
            ? cfg.sweep.min
            : cfg.sweep.min + (cfg.sweep.max - cfg.sweep.min) * i / (cfg.sweep.count - 1);
    RunConfig c = cfg;
    c.command = target;
    c.readout.seed = cfg.readout.seed + static_cast<std::uint64_t>(i);
    apply_override(c, cfg.sweep.parameter + "=" + fmt_double(value));
    validate(c);

    Row inner;
    if (target == Command::Berry) {
      inner = berry_row(c);
    } else if (target == Command::Ramsey || target == Command::Echo) {
      inner = protocol_row(c, target == Command::Ramsey);
    } else {
      std::vector<Row> two = sensitivity_rows(c);
      inner = c.decoherence.model == DecoherenceSettings::T2Star ? two[1] : two[0];
    }

    const char* analytic_col = target == Command::Berry ? "phase_analytic" : "phase";
    rows.push_back({txt("parameter", cfg.sweep.parameter),
                    num("value", value),
                    uint_cell("seed", c.readout.seed),
                    pick(inner, analytic_col, "phase_analytic"),
                    pick(inner, "phase_numeric", "phase_numeric"),
                    pick(inner, "population", "population"),
                    pick(inner, "coherence", "coherence"),
                    pick(inner, "margin", "margin"),
                    pick(inner, "estimate_mean", "estimate_mean"),
                    pick(inner, "estimate_std", "estimate_std"),
                    pick(inner, "sensitivity", "sensitivity"),
                    pick(inner, "uncertainty", "uncertainty")});
  }
  return rows;
}

const char* stage_name(ErrorCategory cat) {
  switch (cat) {
    case ErrorCategory::Config: return "config";
    case ErrorCategory::Physics: return "physics";
    case ErrorCategory::Numeric: return "numeric";
  }
  return "internal";
}

}  // namespace

Command parse_command(const std::string& name) {
  if (name == "berry") return Command::Berry;
  if (name == "ramsey") return Command::Ramsey;
  if (name == "echo") return Command::Echo;
  if (name == "sensitivity") return Command::Sensitivity;
  if (name == "sweep") return Command::Sweep;
  throw ParseError("unknown command '" + name +
                   "'; expected berry, ramsey, echo, sensitivity or sweep");
}

void apply_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file '" + path + "'");
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = path + ":" + std::to_string(lineno);
    const std::string s = trim(line);
    if (s.empty() || s[0] == '#' || s[0] == ';') continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ParseError(where + ": malformed section header '" + s + "'");
      section = trim(s.substr(1, s.size() - 2));
      if (std::find(kSections.begin(), kSections.end(), section) == kSections.end())
        throw ParseError(where + ": unknown section [" + section + "]");
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw ParseError(where + ": expected key = value, got '" + s + "'");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (section.empty())
      throw ParseError(where + ": key '" + key + "' appears before any section header");
    apply_field(cfg, section, key, value, where);
  }
}

void apply_override(RunConfig& cfg, const std::string& key_value) {
  const auto eq = key_value.find('=');
  if (eq == std::string::npos)
    throw ParseError("override '" + key_value + "' is not of the form key=value");
  const std::string path = trim(key_value.substr(0, eq));
  const std::string value = trim(key_value.substr(eq + 1));
  const std::string where = "override";

  const auto dot = path.find('.');
  if (dot != std::string::npos) {
    apply_field(cfg, path.substr(0, dot), path.substr(dot + 1), value, where);
    return;
  }
  std::vector<std::string> hits;
  for (const auto& [sec, key] : kKeys)
    if (key == path) hits.push_back(sec);
  if (hits.empty()) throw ParseError(where + ": unknown key '" + path + "'");
  if (hits.size() > 1)
    throw ParseError(where + ": key '" + path + "' is ambiguous; qualify it with a section");
  apply_field(cfg, hits.front(), path, value, where);
}

void validate(const RunConfig& c) {
  const auto& g = c.geometry;
  if (!(g.omega > 0.0)) throw ValidationError("geometry.omega must be positive");
  if (!(g.theta > 0.0 && g.theta < kPi))
    throw ValidationError("geometry.theta must lie in (0, pi)");
  if (!(g.theta0 >= 0.0 && g.theta0 < kPi / 2.0))
    throw ValidationError("geometry.theta0 must lie in [0, pi/2)");
  if (!(g.phi0 > 0.0)) throw ValidationError("geometry.phi0 must be positive");
  if (g.rotations < 1) throw ValidationError("geometry.rotations must be at least 1");
  if (g.m < -1 || g.m > 1) throw ValidationError("geometry.m must be -1, 0 or +1");

  if (c.numeric.dt < 0.0) throw ValidationError("numeric.dt must be nonnegative");
  if (!(c.numeric.tolerance > 0.0)) throw ValidationError("numeric.tolerance must be positive");
  if (!(c.numeric.splitting_ratio > 0.0))
    throw ValidationError("numeric.splitting_ratio must be positive");

  if (!(c.decoherence.t2star > 0.0)) throw ValidationError("decoherence.t2star must be positive");
  if (!(c.decoherence.t2 > 0.0)) throw ValidationError("decoherence.t2 must be positive");

  if (c.readout.repetitions < 1)
    throw ValidationError("readout.repetitions must be at least 1");
  if (!(c.readout.efficiency > 0.0 && c.readout.efficiency <= 1.0))
    throw ValidationError("readout.efficiency must lie in (0, 1]");
  if (c.readout.noise != "gaussian" && c.readout.noise != "poisson")
    throw ValidationError("readout.noise must be gaussian or poisson");
  if (!(c.readout.dark_to_bright >= 0.0 && c.readout.dark_to_bright < 1.0))
    throw ValidationError("readout.dark_to_bright must lie in [0, 1)");
  if (c.readout.estimate_repetitions < 100)
    throw ValidationError("readout.estimate_repetitions must be at least 100");

  if (!(c.sensitivity.overhead > 1.0)) throw ValidationError("sensitivity.overhead must exceed 1");
  if (c.sensitivity.measurement_time < 0.0)
    throw ValidationError("sensitivity.measurement_time must be nonnegative");
  if (!(c.sensitivity.total_time > 0.0))
    throw ValidationError("sensitivity.total_time must be positive");

  if (!(c.protocol.splitting_field > 0.0))
    throw ValidationError("protocol.splitting_field must be positive");

  if (c.command == Command::Sweep) {
    const auto& s = c.sweep;
    if (s.parameter.empty()) throw ValidationError("sweep.parameter must name a config key");
    if (s.count < 1) throw ValidationError("sweep.count must be at least 1");
    if (s.count > 1 && !(s.max > s.min))
      throw ValidationError("sweep.max must exceed sweep.min");
    if (s.target != "berry" && s.target != "ramsey" && s.target != "echo" &&
        s.target != "sensitivity")
      throw ValidationError("sweep.target must be berry, ramsey, echo or sensitivity");
  }
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& diag) {
  try {
    validate(cfg);
    std::vector<Row> rows;
    switch (cfg.command) {
      case Command::Berry: rows.push_back(berry_row(cfg)); break;
      case Command::Ramsey: rows.push_back(protocol_row(cfg, true)); break;
      case Command::Echo: rows.push_back(protocol_row(cfg, false)); break;
      case Command::Sensitivity: rows = sensitivity_rows(cfg); break;
      case Command::Sweep: rows = sweep_rows(cfg); break;
    }
    emit(rows, cfg, out);
    return 0;
  } catch (const Error& e) {
    diag << stage_name(e.category()) << " error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    diag << "internal error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace nvberry
