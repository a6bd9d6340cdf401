#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "giantwg/errors.hpp"
#include "giantwg/lindblad.hpp"
#include "giantwg/scattering_one.hpp"
#include "giantwg/scattering_two.hpp"
#include "giantwg/sweep.hpp"

namespace giantwg {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string trim(const std::string& s) {
  const size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& s, int line) {
  size_t pos = 0;
  double v;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw ParseError("line " + std::to_string(line) + ": expected a number, got '" + s + "'");
  }
  if (pos != s.size())
    throw ParseError("line " + std::to_string(line) + ": trailing characters in number '" + s + "'");
  return v;
}

int parse_int(const std::string& s, int line) {
  const double v = parse_double(s, line);
  if (v != std::floor(v) || std::abs(v) > 1e9)
    throw ParseError("line " + std::to_string(line) + ": expected an integer, got '" + s + "'");
  return static_cast<int>(v);
}

AxisSpec parse_axis(const std::string& value, int line) {
  std::istringstream ss(value);
  AxisSpec axis;
  std::string scale;
  if (!(ss >> axis.name >> axis.min >> axis.max >> axis.points >> scale))
    throw ParseError("line " + std::to_string(line) +
                     ": axis needs 'name min max points linear|log'");
  std::string extra;
  if (ss >> extra)
    throw ParseError("line " + std::to_string(line) + ": trailing token '" + extra + "'");
  if (scale == "log")
    axis.log_scale = true;
  else if (scale != "linear")
    throw ParseError("line " + std::to_string(line) + ": axis scale must be linear or log");
  if (axis.points < 1)
    throw ValidationError("axis " + axis.name + ": points must be >= 1");
  if (axis.points > 1 && !(axis.max > axis.min))
    throw ValidationError("axis " + axis.name + ": max must exceed min");
  if (axis.log_scale && !(axis.min > 0.0))
    throw ValidationError("axis " + axis.name + ": log axis needs positive bounds");
  static const char* known[] = {"k_i", "phi", "d", "U", "omega0", "phase_k0d", "p1"};
  bool ok = false;
  for (const char* k : known) ok = ok || (axis.name == k);
  if (!ok) throw ValidationError("axis " + axis.name + ": not a sweepable parameter");
  return axis;
}

SweepTarget parse_target(const std::string& value, int line) {
  if (value == "single_photon") return SweepTarget::SinglePhoton;
  if (value == "g2_map") return SweepTarget::G2Map;
  if (value == "fluorescence_slice") return SweepTarget::FluorescenceSlice;
  if (value == "steady_curve") return SweepTarget::SteadyCurve;
  if (value == "reflected_curve") return SweepTarget::ReflectedCurve;
  if (value == "gap_curve") return SweepTarget::GapCurve;
  throw ParseError("line " + std::to_string(line) + ": unknown target '" + value + "'");
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct PointSetup {
  SystemParams params;
  DriveConfig drive;
  double p1 = 0.0;
  bool has_p1 = false;
};

PointSetup setup_point(const ConfigBundle& bundle,
                       const std::vector<double>& axis_values) {
  PointSetup s;
  s.params = bundle.params;
  s.drive = bundle.drive;
  for (size_t a = 0; a < bundle.axes.size(); ++a) {
    const std::string& name = bundle.axes[a].name;
    const double v = axis_values[a];
    if (name == "k_i") s.drive.k_i = v;
    else if (name == "phi") s.params.phi = v;
    else if (name == "d") s.params.d = v;
    else if (name == "U") s.params.U = v;
    else if (name == "omega0") s.drive.omega0 = v;
    else if (name == "phase_k0d") s.params.phase_k0d = v;
    else if (name == "p1") { s.p1 = v; s.has_p1 = true; }
  }
  if (bundle.theta_rule == "chiral")
    s.params.phase_k0d =
        normalize_angle(kPi - s.params.phi - s.drive.k_i * s.params.d);
  if (bundle.phi_rule == "chiral")
    s.params.phi = chiral_phase(s.drive.k_i, s.params, 0);
  return s;
}

}  // namespace

std::string to_string(SweepTarget target) {
  switch (target) {
    case SweepTarget::SinglePhoton: return "single_photon";
    case SweepTarget::G2Map: return "g2_map";
    case SweepTarget::FluorescenceSlice: return "fluorescence_slice";
    case SweepTarget::SteadyCurve: return "steady_curve";
    case SweepTarget::ReflectedCurve: return "reflected_curve";
    case SweepTarget::GapCurve: return "gap_curve";
  }
  return "unknown";
}

std::vector<double> AxisSpec::values() const {
  std::vector<double> out;
  out.reserve(points);
  if (points == 1) {
    out.push_back(min);
    return out;
  }
  for (int i = 0; i < points; ++i) {
    const double f = static_cast<double>(i) / (points - 1);
    out.push_back(log_scale ? min * std::pow(max / min, f)
                            : min + (max - min) * f);
  }
  return out;
}

ConfigBundle parse_config(std::istream& in) {
  ConfigBundle bundle;
  std::string line;
  int lineno = 0;
  std::vector<std::string> seen;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ParseError("line " + std::to_string(lineno) + ": empty key or value");
    for (const std::string& s : seen)
      if (s == key)
        throw ParseError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    seen.push_back(key);
    bundle.raw.emplace_back(key, value);

    if (key == "target") {
      bundle.target = parse_target(value, lineno);
      bundle.target_set = true;
    } else if (key == "gamma") bundle.params.gamma = parse_double(value, lineno);
    else if (key == "U") bundle.params.U = parse_double(value, lineno);
    else if (key == "phi") bundle.params.phi = parse_double(value, lineno);
    else if (key == "d") bundle.params.d = parse_double(value, lineno);
    else if (key == "phase_k0d") bundle.params.phase_k0d = parse_double(value, lineno);
    else if (key == "k_i") bundle.drive.k_i = parse_double(value, lineno);
    else if (key == "omega0") bundle.drive.omega0 = parse_double(value, lineno);
    else if (key == "direction") {
      if (value == "R") bundle.drive.direction = Direction::R;
      else if (value == "L") bundle.drive.direction = Direction::L;
      else throw ParseError("line " + std::to_string(lineno) + ": direction must be R or L");
    } else if (key == "tau") bundle.tau = parse_double(value, lineno);
    else if (key == "k1") bundle.k1 = parse_double(value, lineno);
    else if (key == "k2") bundle.k2 = parse_double(value, lineno);
    else if (key == "phi_rule" || key == "theta_rule") {
      if (value != "fixed" && value != "chiral")
        throw ParseError("line " + std::to_string(lineno) + ": rule must be fixed or chiral");
      (key == "phi_rule" ? bundle.phi_rule : bundle.theta_rule) = value;
    } else if (key == "series_rel_tol") bundle.controls.series_rel_tol = parse_double(value, lineno);
    else if (key == "series_max_order") bundle.controls.series_max_order = parse_int(value, lineno);
    else if (key == "fock_cutoff") bundle.controls.fock_cutoff = parse_int(value, lineno);
    else if (key == "quadrature_abs_tol") bundle.controls.quadrature_abs_tol = parse_double(value, lineno);
    else if (key == "ode_rel_tol") bundle.controls.ode_rel_tol = parse_double(value, lineno);
    else if (key == "axis") bundle.axes.insert(bundle.axes.begin(), parse_axis(value, lineno));
    else if (key == "axis2") bundle.axes.push_back(parse_axis(value, lineno));
    else throw ParseError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
  }
  if (bundle.axes.empty())
    throw ValidationError("axis: at least one axis is required");
  if (bundle.axes.size() == 2 && bundle.axes[0].name == bundle.axes[1].name)
    throw ValidationError("axis2: must differ from axis");
  bundle.params.validate();
  bundle.drive.validate();
  bundle.controls.validate();
  if (bundle.target == SweepTarget::FluorescenceSlice) {
    bool has_p1_axis = false;
    for (const AxisSpec& a : bundle.axes) has_p1_axis = has_p1_axis || a.name == "p1";
    if (!has_p1_axis)
      throw ValidationError("axis: fluorescence_slice requires a p1 axis");
  }
  return bundle;
}

ConfigBundle parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file '" + path + "'");
  return parse_config(in);
}

namespace {

void evaluate_point(const ConfigBundle& bundle,
                    const std::vector<double>& axis_values,
                    std::vector<SweepRow>& rows) {
  auto add = [&](const std::string& obs, complexd v) {
    rows.push_back({axis_values, obs, v, ""});
  };
  auto add_failed = [&](const std::string& obs, const std::string& flag) {
    rows.push_back({axis_values, obs, complexd(0.0, 0.0), flag});
  };
  auto flag_of = [](const std::exception& e) -> std::string {
    if (const Error* ge = dynamic_cast<const Error*>(&e)) return ge->code;
    return "error";
  };

  const PointSetup s = setup_point(bundle, axis_values);
  switch (bundle.target) {
    case SweepTarget::SinglePhoton: {
      try {
        const ScatterAmplitudes a = scatter_single(s.params, s.drive.k_i, s.drive.direction);
        add("sigma", a.sigma);
        add("green", a.green);
        add("r", a.r);
        add("t", a.t);
      } catch (const std::exception& e) {
        for (const char* o : {"sigma", "green", "r", "t"}) add_failed(o, flag_of(e));
      }
      break;
    }
    case SweepTarget::G2Map: {
      try {
        add("g2_0", g2_transmitted(s.params, s.drive.k_i, bundle.tau, bundle.controls));
      } catch (const std::exception& e) {
        add_failed("g2_0", flag_of(e));
      }
      break;
    }
    case SweepTarget::FluorescenceSlice: {
      try {
        const double k1 = bundle.k1.value_or(s.drive.k_i);
        const double k2 = bundle.k2.value_or(s.drive.k_i);
        const TwoPhotonAmplitude amp = two_photon_s(s.params, k1, k2, bundle.controls);
        add("fluorescence", amp.fluorescence(s.p1));
      } catch (const std::exception& e) {
        add_failed("fluorescence", flag_of(e));
      }
      break;
    }
    case SweepTarget::SteadyCurve: {
      try {
        const LiouvillianMatrix liouville =
            build_liouvillian(s.params, s.drive, bundle.controls);
        const SteadyState ss = steady_state(liouville);
        const Eigen::MatrixXcd b = annihilation(liouville.cutoff);
        add("n", (b.adjoint() * b * ss.rho).trace().real());
        add("b_mean", (b * ss.rho).trace());
        try {
          add("g2", cavity_observables(ss.rho).g2);
        } catch (const std::exception& e) {
          add_failed("g2", flag_of(e));
        }
      } catch (const std::exception& e) {
        for (const char* o : {"n", "b_mean", "g2"}) add_failed(o, flag_of(e));
      }
      break;
    }
    case SweepTarget::ReflectedCurve: {
      try {
        const std::vector<double> rho_l =
            reflected_density(s.params, s.drive, {s.params.d}, bundle.controls);
        add("rho_L", rho_l[0]);
      } catch (const std::exception& e) {
        add_failed("rho_L", flag_of(e));
      }
      break;
    }
    case SweepTarget::GapCurve: {
      try {
        const LiouvillianMatrix liouville =
            build_liouvillian(s.params, s.drive, bundle.controls);
        add("gap", liouvillian_spectrum(liouville).gap);
      } catch (const std::exception& e) {
        add_failed("gap", flag_of(e));
      }
      break;
    }
  }
}

int worker_count(size_t npoints) {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (const char* env = std::getenv("GIANTWG_THREADS")) {
    try {
      n = std::max(1, std::stoi(env));
    } catch (const std::exception&) {
      throw ValidationError("GIANTWG_THREADS: not an integer");
    }
  }
  if (n < 1) n = 1;
  return static_cast<int>(std::min<size_t>(n, npoints));
}

}  // namespace

SweepResult run_sweep(const ConfigBundle& bundle) {
  SweepResult result;
  for (const AxisSpec& a : bundle.axes) result.axis_names.push_back(a.name);

  std::vector<std::vector<double>> grid;
  if (bundle.axes.size() == 1) {
    for (double v : bundle.axes[0].values()) grid.push_back({v});
  } else {
    for (double v0 : bundle.axes[0].values())
      for (double v1 : bundle.axes[1].values()) grid.push_back({v0, v1});
  }

  std::vector<std::vector<SweepRow>> slots(grid.size());
  std::atomic<size_t> next{0};
  auto work = [&]() {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= grid.size()) return;
      evaluate_point(bundle, grid[i], slots[i]);
    }
  };
  const int nthreads = worker_count(grid.size());
  if (nthreads <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }
  for (std::vector<SweepRow>& s : slots)
    for (SweepRow& r : s) result.rows.push_back(std::move(r));
  return result;
}

std::string emit_csv(const SweepResult& result) {
  std::string out;
  for (const std::string& name : result.axis_names) out += name + ",";
  out += "observable,value_re,value_im,flag\n";
  for (const SweepRow& row : result.rows) {
    for (double v : row.axis_values) out += fmt(v) + ",";
    out += row.observable + ",";
    if (row.flag.empty())
      out += fmt(row.value.real()) + "," + fmt(row.value.imag()) + ",";
    else
      out += ",,";
    out += row.flag + "\n";
  }
  return out;
}

std::string emit_json(const ConfigBundle& bundle, const SweepResult& result) {
  nlohmann::ordered_json doc;
  doc["version"] = "giantwg 0.1.0";
  doc["target"] = to_string(bundle.target);
  nlohmann::ordered_json config;
  for (const auto& [key, value] : bundle.raw) config[key] = value;
  doc["config"] = config;
  nlohmann::ordered_json eff;
  eff["gamma"] = bundle.params.gamma;
  eff["U"] = bundle.params.U;
  eff["phi"] = bundle.params.phi;
  eff["d"] = bundle.params.d;
  eff["phase_k0d"] = bundle.params.phase_k0d;
  eff["direction"] = bundle.drive.direction == Direction::R ? "R" : "L";
  eff["k_i"] = bundle.drive.k_i;
  eff["omega0"] = bundle.drive.omega0;
  eff["tau"] = bundle.tau;
  eff["k1"] = bundle.k1 ? nlohmann::ordered_json(*bundle.k1) : nlohmann::ordered_json(nullptr);
  eff["k2"] = bundle.k2 ? nlohmann::ordered_json(*bundle.k2) : nlohmann::ordered_json(nullptr);
  eff["phi_rule"] = bundle.phi_rule;
  eff["theta_rule"] = bundle.theta_rule;
  eff["series_rel_tol"] = bundle.controls.series_rel_tol;
  eff["series_max_order"] = bundle.controls.series_max_order;
  eff["fock_cutoff"] = bundle.controls.fock_cutoff;
  eff["quadrature_abs_tol"] = bundle.controls.quadrature_abs_tol;
  eff["ode_rel_tol"] = bundle.controls.ode_rel_tol;
  doc["effective"] = eff;
  doc["axes"] = result.axis_names;
  nlohmann::ordered_json records = nlohmann::ordered_json::array();
  for (const SweepRow& row : result.rows) {
    nlohmann::ordered_json rec;
    rec["axis_values"] = row.axis_values;
    rec["observable"] = row.observable;
    if (row.flag.empty()) {
      rec["value_re"] = row.value.real();
      rec["value_im"] = row.value.imag();
    } else {
      rec["value_re"] = nullptr;
      rec["value_im"] = nullptr;
    }
    rec["flag"] = row.flag;
    records.push_back(std::move(rec));
  }
  doc["records"] = std::move(records);
  return doc.dump(2) + "\n";
}

}  // namespace giantwg
