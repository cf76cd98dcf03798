#include "soliton/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

#include "soliton/evolution.hpp"
#include "soliton/functionals.hpp"
#include "soliton/groundstate.hpp"
#include "soliton/model.hpp"
#include "soliton/spectral.hpp"
#include "soliton/stability.hpp"

namespace soliton::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::set<std::string> kCommands = {"check-model", "ground-state", "evolve", "travel-test",
                                         "stability",   "speed-curve",  "subadditivity"};

// Reads keys from one JSON object, records defaults, and rejects leftovers.
class Section {
 public:
  Section(const json& src, std::string name) : src_(src), name_(std::move(name)) {
    if (!src_.is_object()) throw ConfigError("'" + name_ + "' must be an object");
  }

  double number(const std::string& key, std::optional<double> fallback = std::nullopt) {
    const json* v = find(key);
    double out = 0.0;
    if (!v) {
      if (!fallback) throw ConfigError("missing required key '" + path(key) + "'");
      out = *fallback;
    } else {
      if (!v->is_number()) throw ConfigError("'" + path(key) + "' must be a number");
      out = v->get<double>();
    }
    if (!std::isfinite(out)) throw ConfigError("'" + path(key) + "' must be finite");
    resolved[key] = out;
    return out;
  }

  std::size_t count(const std::string& key, std::optional<std::size_t> fallback = std::nullopt) {
    const json* v = find(key);
    std::size_t out = 0;
    if (!v) {
      if (!fallback) throw ConfigError("missing required key '" + path(key) + "'");
      out = *fallback;
    } else {
      if (!v->is_number_integer() || v->get<long long>() < 0)
        throw ConfigError("'" + path(key) + "' must be a non-negative integer");
      out = v->get<std::size_t>();
    }
    resolved[key] = out;
    return out;
  }

  bool boolean(const std::string& key, bool fallback) {
    const json* v = find(key);
    bool out = fallback;
    if (v) {
      if (!v->is_boolean()) throw ConfigError("'" + path(key) + "' must be true or false");
      out = v->get<bool>();
    }
    resolved[key] = out;
    return out;
  }

  std::string text(const std::string& key, std::optional<std::string> fallback,
                   const std::set<std::string>& allowed = {}) {
    const json* v = find(key);
    std::string out;
    if (!v) {
      if (!fallback) throw ConfigError("missing required key '" + path(key) + "'");
      out = *fallback;
    } else {
      if (!v->is_string()) throw ConfigError("'" + path(key) + "' must be a string");
      out = v->get<std::string>();
    }
    if (!allowed.empty() && !allowed.contains(out))
      throw ConfigError("'" + path(key) + "' has unsupported value '" + out + "'");
    resolved[key] = out;
    return out;
  }

  std::vector<double> numbers(const std::string& key,
                              std::optional<std::vector<double>> fallback = std::nullopt) {
    const json* v = find(key);
    std::vector<double> out;
    if (!v) {
      if (!fallback) throw ConfigError("missing required key '" + path(key) + "'");
      out = *fallback;
    } else {
      if (!v->is_array()) throw ConfigError("'" + path(key) + "' must be an array of numbers");
      for (const auto& e : *v) {
        if (!e.is_number()) throw ConfigError("'" + path(key) + "' must be an array of numbers");
        out.push_back(e.get<double>());
      }
    }
    resolved[key] = out;
    return out;
  }

  /// Marks a key as consumed without resolving it here.
  const json* take(const std::string& key) { return find(key); }

  void forbid(const std::string& key, const std::string& why) {
    if (src_.contains(key)) throw ConfigError("'" + path(key) + "' " + why);
  }

  void finish() const {
    for (const auto& item : src_.items())
      if (!used_.contains(item.key()))
        throw ConfigError("unknown key '" + path(item.key()) + "'");
  }

  json resolved = json::object();

 private:
  const json* find(const std::string& key) {
    used_.insert(key);
    auto it = src_.find(key);
    return it == src_.end() ? nullptr : &*it;
  }
  std::string path(const std::string& key) const { return name_ + "." + key; }

  const json& src_;
  std::string name_;
  std::set<std::string> used_;
};

const json& section_or_empty(const json& root, const std::string& key) {
  static const json empty = json::object();
  auto it = root.find(key);
  return it == root.end() ? empty : *it;
}

json resolve_model(const json& src) {
  Section s(src, "model");
  const std::string family = s.text("family", std::nullopt, {"mkdv", "abs_power", "polynomial"});
  if (family == "polynomial") {
    s.forbid("k", "is not used by the polynomial family");
    const auto coeffs = s.numbers("coeffs");
    if (coeffs.empty()) throw ConfigError("'model.coeffs' needs the s^2 coefficient");
  } else {
    s.forbid("coeffs", "is only used by the polynomial family");
    const double k = s.number("k");
    if (!(k > 0.0)) throw ConfigError("'model.k' must be positive");
    if (family == "mkdv" && std::floor(k) != k)
      throw ConfigError("'model.k' must be an integer for the mkdv family");
  }
  s.boolean("auto_gauge_shift", true);
  s.finish();
  return s.resolved;
}

json resolve_grid(const json& src) {
  Section s(src, "grid");
  const std::size_t n = s.count("n", 1024);
  const double length = s.number("L", 80.0);
  if (n < 64 || (n & (n - 1)) != 0) throw ConfigError("'grid.n' must be a power of two >= 64");
  if (!(length > 0.0)) throw ConfigError("'grid.L' must be positive");
  s.finish();
  return s.resolved;
}

json resolve_minimizer(const json& src) {
  Section s(src, "minimizer");
  const MinimizerOptions d;
  if (!(s.number("tol", d.tol) > 0.0)) throw ConfigError("'minimizer.tol' must be positive");
  if (s.count("max_iterations", d.max_iterations) == 0)
    throw ConfigError("'minimizer.max_iterations' must be positive");
  s.number("energy_floor", d.energy_floor);
  const double armijo = s.number("armijo", d.armijo);
  if (!(armijo > 0.0 && armijo < 1.0)) throw ConfigError("'minimizer.armijo' must be in (0,1)");
  if (!(s.number("initial_step", d.initial_step) > 0.0))
    throw ConfigError("'minimizer.initial_step' must be positive");
  s.finish();
  return s.resolved;
}

json resolve_evolution(const json& src, double default_t_end) {
  Section s(src, "evolution");
  const double dt = s.number("dt", 1e-3);
  const double t_end = s.number("t_end", default_t_end);
  const double stride = s.number("sample_stride", 0.1);
  if (!(dt > 0.0)) throw ConfigError("'evolution.dt' must be positive");
  if (!(t_end >= 0.0)) throw ConfigError("'evolution.t_end' must be >= 0");
  if (!(stride > 0.0)) throw ConfigError("'evolution.sample_stride' must be positive");
  const double steps = std::round(t_end / dt);
  if (std::abs(steps * dt - t_end) > 1e-9 * std::max(1.0, t_end))
    throw ConfigError("'evolution.t_end' must be a whole number of time steps");
  s.boolean("dealias", true);
  s.count("snapshot_every", 0);
  s.finish();
  return s.resolved;
}

json resolve_initial(const json& src, double length) {
  Section s(src, "initial");
  const std::string kind =
      s.text("kind", "gaussian", {"gaussian", "sine", "kdv_soliton", "mkdv_soliton", "snapshot"});
  if (kind == "gaussian") {
    s.number("amplitude", 1.0);
    if (!(s.number("width", 2.0) > 0.0)) throw ConfigError("'initial.width' must be positive");
    s.number("center", 0.5 * length);
  } else if (kind == "sine") {
    s.number("amplitude", 1.0);
    s.count("mode", 1);
  } else if (kind == "kdv_soliton" || kind == "mkdv_soliton") {
    if (!(s.number("speed", 1.0) > 0.0)) throw ConfigError("'initial.speed' must be positive");
    s.number("center", 0.5 * length);
  } else {
    s.text("path", std::nullopt);
  }
  s.boolean("reference", kind != "sine");
  s.finish();
  return s.resolved;
}

json resolve_perturbation(const json& src, std::size_t index, std::uint64_t seed) {
  Section s(src, "stability.perturbations[" + std::to_string(index) + "]");
  const std::string kind = s.text("kind", std::nullopt, {"scale", "bump", "noise"});
  if (!(s.number("epsilon") >= 0.0)) throw ConfigError("perturbation epsilon must be >= 0");
  if (kind == "bump") {
    s.number("offset", 0.0);
    if (!(s.number("width", 1.0) > 0.0)) throw ConfigError("bump width must be positive");
  } else if (kind == "noise") {
    s.count("seed", seed + index);
  }
  s.finish();
  return s.resolved;
}

json default_perturbations() {
  json list = json::array();
  for (const char* kind : {"scale", "bump", "noise"})
    for (double eps : {1e-3, 1e-2}) list.push_back({{"kind", kind}, {"epsilon", eps}});
  return list;
}

NonlinearityModel build_model(const json& m) {
  const std::string family = m.at("family");
  NonlinearityModel model = family == "mkdv"        ? NonlinearityModel::mkdv(m.at("k"))
                            : family == "abs_power" ? NonlinearityModel::abs_power(m.at("k"))
                                                    : NonlinearityModel::polynomial(m.at("coeffs"));
  if (m.at("auto_gauge_shift").get<bool>()) model = gauge_shift(model).model;
  return model;
}

GridPtr build_grid(const json& g) { return make_grid(g.at("n"), g.at("L")); }

MinimizerOptions build_minimizer(const json& m) {
  MinimizerOptions o;
  o.tol = m.at("tol");
  o.max_iterations = m.at("max_iterations");
  o.energy_floor = m.at("energy_floor");
  o.armijo = m.at("armijo");
  o.initial_step = m.at("initial_step");
  return o;
}

TravelOptions build_travel(const json& e) {
  TravelOptions o;
  o.dt = e.at("dt");
  o.sample_stride = e.at("sample_stride");
  o.dealias = e.at("dealias");
  return o;
}

PerturbationSpec build_perturbation(const json& p) {
  PerturbationSpec spec;
  const std::string kind = p.at("kind");
  spec.kind = kind == "scale" ? PerturbationKind::Scale
              : kind == "bump" ? PerturbationKind::Bump
                               : PerturbationKind::Noise;
  spec.epsilon = p.at("epsilon");
  if (p.contains("offset")) spec.offset = p.at("offset");
  if (p.contains("width")) spec.width = p.at("width");
  if (p.contains("seed")) spec.seed = p.at("seed");
  return spec;
}

Field build_initial(const json& init, const GridPtr& grid, const NonlinearityModel& model) {
  const std::string kind = init.at("kind");
  if (kind == "gaussian") {
    const double a = init.at("amplitude"), w = init.at("width"), x0 = init.at("center");
    return Field::sample(grid, [&](double x) {
      const double d = std::remainder(x - x0, grid->length());
      return a * std::exp(-(d / w) * (d / w));
    });
  }
  if (kind == "sine") {
    const double a = init.at("amplitude");
    const double k = grid->wavenumber(init.at("mode").get<std::size_t>());
    return Field::sample(grid, [&](double x) { return a * std::sin(k * x); });
  }
  if (kind == "kdv_soliton") {
    // (c/2) sech^2(sqrt(c)(x - x0)/2) solves u_t + u_xxx + 6 u u_x = 0.
    const double c = init.at("speed"), x0 = init.at("center");
    return Field::sample(grid, [&](double x) {
      const double s = 1.0 / std::cosh(0.5 * std::sqrt(c) * std::remainder(x - x0, grid->length()));
      return 0.5 * c * s * s;
    });
  }
  if (kind == "mkdv_soliton") {
    if (model.family() != Family::Mkdv)
      throw ConfigError("'initial.kind' mkdv_soliton needs the mkdv family");
    // A sech^{2/k}(B x) with B = k sqrt(c)/2, A^k = (k+1)(k+2) c / 2, in the
    // frame of the model being evolved.
    const double k = model.exponent();
    const double c = init.at("speed").get<double>() - model.shift_speed();
    if (!(c > 0.0)) throw ConfigError("mkdv soliton speed must exceed the gauge-shift speed");
    const double amp = std::pow((k + 1.0) * (k + 2.0) * c / 2.0, 1.0 / k);
    const double b = k * std::sqrt(c) / 2.0;
    const double x0 = init.at("center");
    return Field::sample(grid, [&](double x) {
      return amp * std::pow(1.0 / std::cosh(b * std::remainder(x - x0, grid->length())), 2.0 / k);
    });
  }
  Snapshot snap = read_snapshot(init.at("path").get<std::string>());
  if (!(snap.field.grid() == *grid)) throw ConfigError("snapshot grid does not match 'grid'");
  return Field(grid, std::vector<double>(snap.field.values().begin(), snap.field.values().end()));
}

// --- output helpers -------------------------------------------------------

class CsvWriter {
 public:
  CsvWriter(const fs::path& path, const std::vector<std::string>& header) : path_(path), os_(path) {
    if (!os_) throw IoError("cannot open " + path.string() + " for writing");
    os_ << std::setprecision(17);
    for (std::size_t i = 0; i < header.size(); ++i) os_ << (i ? "," : "") << header[i];
    os_ << '\n';
  }
  template <typename... T>
  void row(const T&... values) {
    std::size_t i = 0;
    ((os_ << (i++ ? "," : "") << values), ...);
    os_ << '\n';
  }
  ~CsvWriter() = default;
  void close() {
    os_.close();
    if (!os_) throw IoError("write failed: " + path_.string());
  }

 private:
  fs::path path_;
  std::ofstream os_;
};

void write_json(const fs::path& path, const json& j) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os << j.dump(2) << '\n';
  if (!os) throw IoError("write failed: " + path.string());
}

void write_trace(const fs::path& path, const EvolutionTrace& trace) {
  const bool ref = !trace.orbital_distance.empty();
  std::vector<std::string> header = {"t", "E", "C"};
  if (ref) {
    header.push_back("orbital_distance");
    header.push_back("best_tau");
  }
  CsvWriter csv(path, header);
  for (std::size_t i = 0; i < trace.times.size(); ++i) {
    if (ref)
      csv.row(trace.times[i], trace.energy_series[i], trace.charge_series[i],
              trace.orbital_distance[i], trace.best_tau[i]);
    else
      csv.row(trace.times[i], trace.energy_series[i], trace.charge_series[i]);
  }
  csv.close();
}

void write_snapshots(const fs::path& dir, const EvolutionTrace& trace) {
  if (trace.snapshots.empty()) return;
  fs::create_directories(dir / "snapshots");
  for (std::size_t i = 0; i < trace.snapshots.size(); ++i) {
    std::ostringstream name;
    name << "snapshot_" << std::setw(5) << std::setfill('0') << i << ".bin";
    write_snapshot(trace.snapshots[i], trace.snapshot_times[i], dir / "snapshots" / name.str());
  }
}

json ground_state_json(const GroundState& gs) {
  return {{"mode", std::string(to_string(gs.mode))},
          {"charge", gs.charge_target},
          {"energy", gs.energy},
          {"multiplier", gs.multiplier},
          {"speed", gs.speed},
          {"physical_speed", gs.physical_speed()},
          {"shift_speed", gs.shift_speed},
          {"residual", gs.residual},
          {"iterations", gs.iterations},
          {"converged", gs.converged}};
}

json drift_json(const EvolutionTrace& trace) {
  return {{"energy_drift", trace.energy_drift},
          {"charge_drift", trace.charge_drift},
          {"samples", trace.times.size()},
          {"well_posedness_guaranteed", trace.well_posedness_guaranteed}};
}

struct Context {
  const json& cfg;
  fs::path out;
  const RunOptions& opts;
  std::ostream& log;
  std::ostream& err;

  void note(const std::string& msg) const {
    if (!opts.quiet) log << msg << '\n';
  }
};

GroundState solve_ground_state(const Context& ctx, const NonlinearityModel& model,
                               const GridPtr& grid, double charge, Mode mode) {
  const MinimizerOptions mo = build_minimizer(ctx.cfg.at("minimizer"));
  GroundState gs = mode == Mode::Gkdv ? minimize_energy_at_charge(model, grid, charge, mo)
                                      : nls_ground_state(model, grid, charge, mo);
  std::ostringstream os;
  os << "ground state: charge " << charge << ", energy " << gs.energy << ", speed " << gs.speed
     << ", residual " << gs.residual << ", " << gs.iterations << " iterations";
  ctx.note(os.str());
  return gs;
}

int run_check_model(const Context& ctx) {
  const NonlinearityModel model = build_model(ctx.cfg.at("model"));
  const json& c = ctx.cfg.at("check");
  const auto range = c.at("sample_range").get<std::vector<double>>();
  const AssumptionReport report =
      check_assumptions(model, {range[0], range[1]}, c.at("samples").get<std::size_t>());
  json out = {{"model", model.describe()}, {"all_passed", report.all_passed()},
              {"warnings", report.warnings}, {"assumptions", json::array()}};
  CsvWriter csv(ctx.out / "assumptions.csv", {"name", "passed", "witness"});
  for (const auto& check : report.checks) {
    out["assumptions"].push_back({{"name", std::string(to_string(check.name))},
                                  {"passed", check.passed},
                                  {"witness", check.witness},
                                  {"note", check.note}});
    std::ostringstream w;
    w << std::setprecision(17);
    for (std::size_t i = 0; i < check.witness.size(); ++i) w << (i ? " " : "") << check.witness[i];
    csv.row(to_string(check.name), check.passed ? "true" : "false", w.str());
    ctx.note(std::string(to_string(check.name)) + (check.passed ? ": pass" : ": FAIL"));
  }
  csv.close();
  write_json(ctx.out / "assumptions.json", out);
  for (const auto& w : report.warnings) ctx.err << "warning: " << w << '\n';
  return kOk;
}

int run_ground_state(const Context& ctx) {
  const NonlinearityModel model = build_model(ctx.cfg.at("model"));
  const GridPtr grid = build_grid(ctx.cfg.at("grid"));
  const json& g = ctx.cfg.at("ground_state");
  const Mode mode = g.at("mode") == "nls" ? Mode::Nls : Mode::Gkdv;
  const GroundState gs = solve_ground_state(ctx, model, grid, g.at("charge"), mode);
  json summary = ground_state_json(gs);
  if (mode == Mode::Nls)
    summary["time_residual"] = nls_time_residual(gs.profile, model, gs.speed);
  write_json(ctx.out / "ground_state.json", summary);
  write_csv(gs.profile, ctx.out / "profile.csv");
  write_snapshot(gs.profile, 0.0, ctx.out / "profile.bin");
  if (!gs.converged) {
    ctx.err << "error: minimizer did not converge (residual " << gs.residual << ")\n";
    return kNumerical;
  }
  return kOk;
}

int run_evolve(const Context& ctx) {
  const NonlinearityModel model = build_model(ctx.cfg.at("model"));
  const GridPtr grid = build_grid(ctx.cfg.at("grid"));
  const json& e = ctx.cfg.at("evolution");
  const json& init = ctx.cfg.at("initial");
  const Field u0 = build_initial(init, grid, model);
  EvolutionOptions eo;
  eo.sample_stride = e.at("sample_stride");
  eo.dealias = e.at("dealias");
  eo.snapshot_every = e.at("snapshot_every");
  if (init.at("reference").get<bool>()) eo.reference = u0;
  if (!well_posedness_guaranteed(model))
    ctx.err << "warning: well-posedness not guaranteed for " << model.describe() << '\n';
  try {
    const EvolutionTrace trace = evolve(u0, model, e.at("dt"), e.at("t_end"), eo);
    write_trace(ctx.out / "trace.csv", trace);
    write_snapshots(ctx.out, trace);
    write_csv(*trace.final_state, ctx.out / "final.csv");
    write_json(ctx.out / "summary.json", drift_json(trace));
    std::ostringstream os;
    os << "evolved to t = " << trace.times.back() << ", drift E " << trace.energy_drift << ", C "
       << trace.charge_drift;
    ctx.note(os.str());
  } catch (const BlowUpError& ex) {
    write_trace(ctx.out / "trace.csv", ex.partial());
    json summary = drift_json(ex.partial());
    summary["error"] = ex.what();
    summary["blowup_time"] = ex.time();
    write_json(ctx.out / "summary.json", summary);
    throw;
  }
  return kOk;
}

int run_travel(const Context& ctx) {
  const NonlinearityModel model = build_model(ctx.cfg.at("model"));
  const GridPtr grid = build_grid(ctx.cfg.at("grid"));
  const GroundState gs =
      solve_ground_state(ctx, model, grid, ctx.cfg.at("ground_state").at("charge"), Mode::Gkdv);
  if (!gs.converged) {
    ctx.err << "error: minimizer did not converge (residual " << gs.residual << ")\n";
    return kNumerical;
  }
  const bool original = ctx.cfg.at("travel").at("frame") == "original";
  const NonlinearityModel frame_model = original ? model.unshifted() : model;
  const json& e = ctx.cfg.at("evolution");
  const TravelReport r = travel_test(gs, frame_model, e.at("t_end"), build_travel(e));
  write_trace(ctx.out / "trace.csv", r.trace);
  json summary = {{"ground_state", ground_state_json(gs)},
                  {"frame", original ? "original" : "model"},
                  {"max_orbital_distance", r.max_orbital_distance},
                  {"measured_speed", r.measured_speed},
                  {"predicted_speed", r.predicted_speed},
                  {"relative_error", r.relative_error()},
                  {"drift", drift_json(r.trace)}};
  write_json(ctx.out / "travel.json", summary);
  std::ostringstream os;
  os << "measured speed " << r.measured_speed << ", predicted " << r.predicted_speed
     << ", max orbital distance " << r.max_orbital_distance;
  ctx.note(os.str());
  return kOk;
}

int run_stability(const Context& ctx) {
  const NonlinearityModel model = build_model(ctx.cfg.at("model"));
  const GridPtr grid = build_grid(ctx.cfg.at("grid"));
  const GroundState gs =
      solve_ground_state(ctx, model, grid, ctx.cfg.at("ground_state").at("charge"), Mode::Gkdv);
  if (!gs.converged) {
    ctx.err << "error: minimizer did not converge (residual " << gs.residual << ")\n";
    return kNumerical;
  }
  const json& st = ctx.cfg.at("stability");
  std::vector<PerturbationSpec> specs;
  for (const auto& p : st.at("perturbations")) specs.push_back(build_perturbation(p));
  StabilityOptions so;
  so.evolution = build_travel(ctx.cfg.at("evolution"));
  so.acceptance_ratio = st.at("acceptance_ratio");
  so.jobs = ctx.opts.jobs;
  const StabilityReport report =
      stability_experiment(gs, model, specs, ctx.cfg.at("evolution").at("t_end"), so);

  CsvWriter csv(ctx.out / "stability.csv", {"kind", "epsilon", "offset", "width", "seed",
                                            "initial_distance", "max_distance", "stable"});
  json rows = json::array();
  bool failed = false;
  for (const auto& row : report.rows) {
    csv.row(to_string(row.spec.kind), row.spec.epsilon, row.spec.offset, row.spec.width,
            row.spec.seed, row.initial_distance, row.max_distance, row.stable ? "true" : "false");
    json j = {{"kind", std::string(to_string(row.spec.kind))},
              {"epsilon", row.spec.epsilon},
              {"initial_distance", row.initial_distance},
              {"max_distance", row.max_distance},
              {"stable", row.stable}};
    if (row.error) {
      j["error"] = *row.error;
      failed = true;
    }
    rows.push_back(j);
  }
  csv.close();

  if (!report.rows.empty() && !report.rows.front().times.empty()) {
    std::vector<std::string> header = {"t"};
    for (std::size_t i = 0; i < report.rows.size(); ++i) header.push_back("row" + std::to_string(i));
    std::ofstream os(ctx.out / "distances.csv");
    if (!os) throw IoError("cannot write distances.csv");
    os << std::setprecision(17);
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << '\n';
    const auto& times = report.rows.front().times;
    for (std::size_t s = 0; s < times.size(); ++s) {
      os << times[s];
      for (const auto& row : report.rows)
        os << ',' << (s < row.distances.size() ? row.distances[s] : std::nan(""));
      os << '\n';
    }
    if (!os) throw IoError("write failed: distances.csv");
  }
  write_json(ctx.out / "stability.json",
             {{"ground_state", ground_state_json(gs)},
              {"acceptance_ratio", report.acceptance_ratio},
              {"well_posedness_guaranteed", report.well_posedness_guaranteed},
              {"all_stable", report.all_stable()},
              {"rows", rows}});
  ctx.note(report.all_stable() ? "all perturbations stayed within the acceptance ratio"
                               : "some perturbations exceeded the acceptance ratio");
  if (failed) {
    ctx.err << "error: at least one perturbation run failed\n";
    return kNumerical;
  }
  return kOk;
}

int run_speed_curve(const Context& ctx) {
  const NonlinearityModel model = build_model(ctx.cfg.at("model"));
  const GridPtr grid = build_grid(ctx.cfg.at("grid"));
  const auto charges = ctx.cfg.at("speed_curve").at("charges").get<std::vector<double>>();
  const auto rows = speed_charge_curve(model, grid, charges, build_minimizer(ctx.cfg.at("minimizer")),
                                       ctx.opts.jobs);
  CsvWriter csv(ctx.out / "speed_curve.csv", {"charge", "speed", "physical_speed", "energy",
                                              "residual", "iterations", "converged", "error"});
  bool failed = false;
  for (const auto& r : rows) {
    csv.row(r.charge, r.speed, r.physical_speed, r.energy, r.residual, r.iterations,
            r.converged ? "true" : "false", r.error ? "\"" + *r.error + "\"" : std::string());
    failed = failed || r.error.has_value();
  }
  csv.close();
  if (failed) {
    ctx.err << "error: at least one charge failed to converge\n";
    return kNumerical;
  }
  return kOk;
}

int run_subadditivity(const Context& ctx) {
  const NonlinearityModel model = build_model(ctx.cfg.at("model"));
  const GridPtr grid = build_grid(ctx.cfg.at("grid"));
  const json& s = ctx.cfg.at("subadditivity");
  SubadditivityOptions so;
  so.minimizer = build_minimizer(ctx.cfg.at("minimizer"));
  so.margin = s.at("margin");
  so.jobs = ctx.opts.jobs;
  const SubadditivityReport r = subadditivity_check(model, grid, s.at("c1"), s.at("c2"), so);
  write_json(ctx.out / "subadditivity.json", {{"c1", r.c1},
                                              {"c2", r.c2},
                                              {"e_c1", r.e1},
                                              {"e_c2", r.e2},
                                              {"e_c1_plus_c2", r.e12},
                                              {"gap", r.gap},
                                              {"margin", so.margin},
                                              {"strict", r.strict},
                                              {"converged", r.converged}});
  ctx.note(r.strict ? "strict subadditivity holds" : "strict subadditivity does not hold");
  if (!r.converged) {
    ctx.err << "error: a minimization did not converge\n";
    return kNumerical;
  }
  return kOk;
}

}  // namespace

json resolve_config(const json& raw) {
  Section top(raw, "config");
  const std::string command = top.text("command", std::nullopt, kCommands);
  top.resolved["model"] = resolve_model(section_or_empty(raw, "model"));
  top.take("model");
  if (!raw.contains("model")) throw ConfigError("missing required key 'config.model'");
  top.text("output_dir", "out");
  top.count("seed", 0);

  auto need = [&](const std::string& key) -> const json& {
    top.take(key);
    return section_or_empty(raw, key);
  };

  if (command == "check-model") {
    Section c(need("check"), "check");
    const auto range = c.numbers("sample_range", std::vector<double>{-50.0, 50.0});
    if (range.size() != 2 || !(range[1] > range[0]))
      throw ConfigError("'check.sample_range' must be [min, max] with min < max");
    if (c.count("samples", 10000) < 100) throw ConfigError("'check.samples' must be >= 100");
    c.finish();
    top.resolved["check"] = c.resolved;
    top.finish();
    return top.resolved;
  }

  top.resolved["grid"] = resolve_grid(need("grid"));
  const double length = top.resolved["grid"]["L"];

  if (command == "evolve") {
    top.resolved["initial"] = resolve_initial(need("initial"), length);
    top.resolved["evolution"] = resolve_evolution(need("evolution"), 10.0);
    top.finish();
    return top.resolved;
  }

  top.resolved["minimizer"] = resolve_minimizer(need("minimizer"));

  if (command == "ground-state" || command == "travel-test" || command == "stability") {
    Section g(need("ground_state"), "ground_state");
    if (!(g.number("charge") > 0.0)) throw ConfigError("'ground_state.charge' must be positive");
    if (command == "ground-state")
      g.text("mode", "gkdv", {"gkdv", "nls"});
    else
      g.forbid("mode", "is fixed to gkdv for this command");
    g.finish();
    top.resolved["ground_state"] = g.resolved;
  }
  if (command == "travel-test") {
    top.resolved["evolution"] = resolve_evolution(need("evolution"), 10.0);
    Section t(need("travel"), "travel");
    t.text("frame", "model", {"model", "original"});
    t.finish();
    top.resolved["travel"] = t.resolved;
  }
  if (command == "stability") {
    top.resolved["evolution"] = resolve_evolution(need("evolution"), 20.0);
    Section s(need("stability"), "stability");
    if (!(s.number("acceptance_ratio", 10.0) > 0.0))
      throw ConfigError("'stability.acceptance_ratio' must be positive");
    const json* list = s.take("perturbations");
    const json perturbations = list ? *list : default_perturbations();
    if (!perturbations.is_array() || perturbations.empty())
      throw ConfigError("'stability.perturbations' must be a non-empty array");
    const auto seed = top.resolved["seed"].get<std::uint64_t>();
    json resolved = json::array();
    for (std::size_t i = 0; i < perturbations.size(); ++i)
      resolved.push_back(resolve_perturbation(perturbations[i], i, seed));
    s.resolved["perturbations"] = resolved;
    s.finish();
    top.resolved["stability"] = s.resolved;
  }
  if (command == "speed-curve") {
    Section s(need("speed_curve"), "speed_curve");
    const auto charges = s.numbers("charges");
    if (charges.empty()) throw ConfigError("'speed_curve.charges' must not be empty");
    for (std::size_t i = 0; i < charges.size(); ++i) {
      if (!(charges[i] > 0.0)) throw ConfigError("'speed_curve.charges' must be positive");
      if (i > 0 && !(charges[i] > charges[i - 1]))
        throw ConfigError("'speed_curve.charges' must be strictly increasing");
    }
    s.finish();
    top.resolved["speed_curve"] = s.resolved;
  }
  if (command == "subadditivity") {
    Section s(need("subadditivity"), "subadditivity");
    if (!(s.number("c1") > 0.0) || !(s.number("c2") > 0.0))
      throw ConfigError("'subadditivity.c1' and 'c2' must be positive");
    if (!(s.number("margin", 0.0) >= 0.0)) throw ConfigError("'subadditivity.margin' must be >= 0");
    s.finish();
    top.resolved["subadditivity"] = s.resolved;
  }
  top.finish();
  return top.resolved;
}

int run(const json& raw, const RunOptions& opts, std::ostream& log, std::ostream& err) {
  json cfg;
  try {
    cfg = resolve_config(raw);
    // Model construction errors (e.g. bad exponents) are validation failures.
    build_model(cfg.at("model"));
  } catch (const std::exception& ex) {
    err << "config error: " << ex.what() << '\n';
    return kValidation;
  }
  const fs::path out = opts.out_dir ? *opts.out_dir : fs::path(cfg.at("output_dir").get<std::string>());
  try {
    fs::create_directories(out);
    write_json(out / "manifest.json", cfg);
  } catch (const std::exception& ex) {
    err << "i/o error: " << ex.what() << '\n';
    return kIo;
  }

  const Context ctx{cfg, out, opts, log, err};
  const std::string command = cfg.at("command");
  try {
    if (command == "check-model") return run_check_model(ctx);
    if (command == "ground-state") return run_ground_state(ctx);
    if (command == "evolve") return run_evolve(ctx);
    if (command == "travel-test") return run_travel(ctx);
    if (command == "stability") return run_stability(ctx);
    if (command == "speed-curve") return run_speed_curve(ctx);
    return run_subadditivity(ctx);
  } catch (const BlowUpError& ex) {
    err << "numerical failure: " << ex.what() << " (well-posedness "
        << (ex.partial().well_posedness_guaranteed ? "guaranteed" : "not guaranteed") << ")\n";
    return kNumerical;
  } catch (const NumericalError& ex) {
    err << "numerical failure: " << ex.what() << '\n';
    return kNumerical;
  } catch (const IoError& ex) {
    err << "i/o error: " << ex.what() << '\n';
    return kIo;
  } catch (const fs::filesystem_error& ex) {
    err << "i/o error: " << ex.what() << '\n';
    return kIo;
  } catch (const DomainError& ex) {
    err << "invalid input: " << ex.what() << '\n';
    return kValidation;
  }
}

int main(int argc, char** argv) {
  CLI::App app{"Soliton laboratory for the generalized KdV equation"};
  std::string config_path;
  std::string out_dir;
  RunOptions opts;
  app.add_option("--config", config_path, "JSON run configuration")->required();
  app.add_option("--out", out_dir, "Output directory (overrides output_dir)");
  app.add_option("--jobs", opts.jobs, "Concurrent jobs for sweeps")->check(CLI::PositiveNumber);
  app.add_flag("--quiet", opts.quiet, "Suppress progress messages");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kValidation;
  }
  if (!out_dir.empty()) opts.out_dir = out_dir;

  std::ifstream is(config_path);
  if (!is) {
    std::cerr << "i/o error: cannot read " << config_path << '\n';
    return kIo;
  }
  json raw;
  try {
    raw = json::parse(is);
  } catch (const json::parse_error& ex) {
    std::cerr << "config error: " << ex.what() << '\n';
    return kValidation;
  }
  return run(raw, opts, std::cout, std::cerr);
}

}  // namespace soliton::cli
