#include "kerrwig/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "kerrwig/classical.hpp"
#include "kerrwig/current.hpp"
#include "kerrwig/diagnostics.hpp"
#include "kerrwig/errors.hpp"
#include "kerrwig/parallel.hpp"
#include "kerrwig/wigner.hpp"

namespace kerrwig::cli {

using io::Json;
namespace fs = std::filesystem;

Command parse_command(const std::string& name) {
  if (name == "evolve") return Command::evolve;
  if (name == "ring") return Command::ring;
  if (name == "current") return Command::current;
  if (name == "shear") return Command::shear;
  if (name == "classical") return Command::classical;
  throw ConfigError("unknown command '" + name + "'");
}

std::string command_name(Command c) {
  switch (c) {
    case Command::evolve: return "evolve";
    case Command::ring: return "ring";
    case Command::current: return "current";
    case Command::shear: return "shear";
    case Command::classical: return "classical";
  }
  return "?";
}

namespace {

// Collects every schema problem before failing, so one run reports them all.
class Schema {
 public:
  void keys(const Json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) {
      error(path, "must be an object");
      return;
    }
    for (const auto& [key, value] : obj.items()) {
      bool known = false;
      for (const char* a : allowed) known = known || key == a;
      if (!known) error(path + "." + key, "unknown key");
    }
  }

  double number(const Json& obj, const char* key, const std::string& path, double fallback) {
    if (!obj.contains(key)) return fallback;
    const Json& v = obj.at(key);
    if (!v.is_number()) {
      error(path + "." + key, "must be a number");
      return fallback;
    }
    const double d = v.get<double>();
    if (!std::isfinite(d)) error(path + "." + key, "must be finite");
    return d;
  }

  int integer(const Json& obj, const char* key, const std::string& path, int fallback) {
    if (!obj.contains(key)) return fallback;
    const Json& v = obj.at(key);
    if (!v.is_number_integer()) {
      error(path + "." + key, "must be an integer");
      return fallback;
    }
    return v.get<int>();
  }

  bool boolean(const Json& obj, const char* key, const std::string& path, bool fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj.at(key).is_boolean()) {
      error(path + "." + key, "must be true or false");
      return fallback;
    }
    return obj.at(key).get<bool>();
  }

  std::string string(const Json& obj, const char* key, const std::string& path, const std::string& fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj.at(key).is_string()) {
      error(path + "." + key, "must be a string");
      return fallback;
    }
    return obj.at(key).get<std::string>();
  }

  void require(bool ok, const std::string& path, const std::string& what) {
    if (!ok) error(path, what);
  }

  void error(const std::string& path, const std::string& what) { errors_.push_back(path + ": " + what); }
  bool failed() const { return !errors_.empty(); }

  void throw_if_failed() const {
    if (errors_.empty()) return;
    std::string msg = "invalid configuration";
    for (const auto& e : errors_) msg += "\n  " + e;
    throw ConfigError(msg);
  }

 private:
  std::vector<std::string> errors_;
};

complex parse_complex(Schema& schema, const Json& v, const std::string& path) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return {v[0].get<double>(), v[1].get<double>()};
  schema.error(path, "must be a number or [re, im]");
  return {};
}

void parse_params(Schema& s, const Json& doc, RunConfig& cfg) {
  if (!doc.contains("params")) return;
  const Json& p = doc.at("params");
  s.keys(p, "params", {"mass", "spring", "hbar", "lambda2", "lambda2_x"});
  if (!p.is_object()) return;
  cfg.params.mass = s.number(p, "mass", "params", 1.0);
  cfg.params.spring = s.number(p, "spring", "params", 1.0);
  cfg.params.hbar = s.number(p, "hbar", "params", 1.0);
  cfg.params.lambda2_p = s.number(p, "lambda2", "params", 0.0);
  cfg.params.lambda2_x = s.number(p, "lambda2_x", "params", cfg.params.lambda2_p);
  try {
    cfg.params.validate();
  } catch (const std::invalid_argument& e) {
    s.error("params", e.what());
  }
}

void parse_state(Schema& s, const Json& doc, RunConfig& cfg) {
  if (!doc.contains("state")) {
    s.error("state", "required");
    return;
  }
  const Json& st = doc.at("state");
  const std::string kind = st.is_object() ? s.string(st, "kind", "state", "") : "";
  if (kind == "coherent") {
    s.keys(st, "state", {"kind", "alpha"});
    s.require(st.contains("alpha"), "state.alpha", "required");
    cfg.state = CoherentSpec{st.contains("alpha") ? parse_complex(s, st.at("alpha"), "state.alpha") : complex{}};
  } else if (kind == "gaussian") {
    s.keys(st, "state", {"kind", "center"});
    const Json c = st.value("center", Json());
    if (!(c.is_array() && c.size() == 2 && c[0].is_number() && c[1].is_number())) {
      s.error("state.center", "must be [x0, p0]");
      return;
    }
    const double scale = std::sqrt(2.0 * cfg.params.hbar);
    cfg.state = CoherentSpec{complex(c[0].get<double>(), c[1].get<double>()) / scale};
    cfg.gaussian_center = true;
  } else if (kind == "squeezed") {
    s.keys(st, "state", {"kind", "zeta"});
    s.require(st.contains("zeta"), "state.zeta", "required");
    cfg.state = SqueezedSpec{s.number(st, "zeta", "state", 0.0)};
  } else if (kind == "fock") {
    s.keys(st, "state", {"kind", "terms"});
    const Json terms = st.value("terms", Json());
    if (!terms.is_array() || terms.empty()) {
      s.error("state.terms", "must be a nonempty list of [n, re] or [n, re, im]");
      return;
    }
    FockSpec spec;
    for (std::size_t k = 0; k < terms.size(); ++k) {
      const Json& t = terms[k];
      const std::string path = "state.terms[" + std::to_string(k) + "]";
      if (!t.is_array() || t.size() < 2 || t.size() > 3 || !t[0].is_number_integer() || t[0].get<int>() < 0) {
        s.error(path, "must be [n, re] or [n, re, im] with integer n >= 0");
        continue;
      }
      bool numeric = true;
      for (std::size_t m = 1; m < t.size(); ++m) numeric = numeric && t[m].is_number();
      if (!numeric) {
        s.error(path, "amplitude parts must be numbers");
        continue;
      }
      spec.terms.emplace_back(t[0].get<int>(), complex(t[1].get<double>(), t.size() == 3 ? t[2].get<double>() : 0.0));
    }
    cfg.state = spec;
  } else {
    s.error("state.kind", "must be one of coherent, gaussian, squeezed, fock");
  }
}

void parse_grid(Schema& s, const Json& doc, RunConfig& cfg) {
  if (!doc.contains("grid")) {
    if (!s.failed()) cfg.grid = default_grid(cfg.state, cfg.params.hbar);
    return;
  }
  const Json& g = doc.at("grid");
  s.keys(g, "grid", {"half_width", "points", "x_min", "x_max", "p_min", "p_max", "nx", "np"});
  if (!g.is_object()) return;
  if (g.contains("half_width")) {
    for (const char* k : {"x_min", "x_max", "p_min", "p_max", "nx", "np"})
      if (g.contains(k)) s.error(std::string("grid.") + k, "cannot be combined with half_width");
    const double L = s.number(g, "half_width", "grid", 6.0);
    const int n = s.integer(g, "points", "grid", kDefaultGridPoints);
    cfg.grid = PhaseGrid{-L, L, -L, L, n, n};
  } else {
    if (g.contains("points")) s.error("grid.points", "only valid with half_width");
    cfg.grid = PhaseGrid{s.number(g, "x_min", "grid", -6.0), s.number(g, "x_max", "grid", 6.0),
                         s.number(g, "p_min", "grid", -6.0), s.number(g, "p_max", "grid", 6.0),
                         s.integer(g, "nx", "grid", kDefaultGridPoints), s.integer(g, "np", "grid", kDefaultGridPoints)};
  }
  try {
    cfg.grid.validate();
  } catch (const std::invalid_argument& e) {
    s.error("grid", e.what());
  }
}

void parse_times(Schema& s, const Json& doc, RunConfig& cfg) {
  if (!doc.contains("times")) return;
  const Json& t = doc.at("times");
  cfg.times.clear();
  if (t.is_array()) {
    for (std::size_t k = 0; k < t.size(); ++k) {
      if (!t[k].is_number()) {
        s.error("times[" + std::to_string(k) + "]", "must be a number");
        continue;
      }
      cfg.times.push_back(t[k].get<double>());
    }
  } else if (t.is_object()) {
    s.keys(t, "times", {"start", "stop", "count", "step", "unit"});
    const std::string unit = s.string(t, "unit", "times", "time");
    double scale = 1.0;
    if (unit == "recurrence") {
      if (cfg.params.lambda2_p == 0.0)
        s.error("times.unit", "recurrence unit needs a nonzero lambda2");
      else
        scale = recurrence_time(cfg.params);
    } else if (unit != "time") {
      s.error("times.unit", "must be 'time' or 'recurrence'");
    }
    const double start = s.number(t, "start", "times", 0.0) * scale;
    const double stop = s.number(t, "stop", "times", 0.0) * scale;
    if (t.contains("count") == t.contains("step")) {
      s.error("times", "give exactly one of count or step");
    } else if (t.contains("count")) {
      const int count = s.integer(t, "count", "times", 1);
      s.require(count >= 1, "times.count", "must be at least 1");
      for (int k = 0; k < count; ++k) cfg.times.push_back(count == 1 ? start : start + (stop - start) * k / (count - 1));
    } else {
      const double step = s.number(t, "step", "times", 1.0) * scale;
      s.require(step > 0.0, "times.step", "must be positive");
      if (step > 0.0)
        for (int k = 0;; ++k) {
          const double v = start + k * step;
          if (v > stop + 1e-12 * std::max(1.0, std::abs(stop))) break;
          cfg.times.push_back(v);
        }
    }
  } else {
    s.error("times", "must be a list or {start, stop, count|step}");
  }
  s.require(!cfg.times.empty(), "times", "must not be empty");
}

void parse_sections(Schema& s, const Json& doc, RunConfig& cfg) {
  if (doc.contains("ring")) {
    const Json& r = doc.at("ring");
    s.keys(r, "ring", {"radius", "n_theta", "co_rotating"});
    if (r.is_object()) {
      cfg.ring.radius = s.number(r, "radius", "ring", 1.0);
      cfg.ring.n_theta = s.integer(r, "n_theta", "ring", 512);
      cfg.ring.co_rotating = s.boolean(r, "co_rotating", "ring", true);
      s.require(cfg.ring.radius > 0.0, "ring.radius", "must be positive");
      s.require(cfg.ring.n_theta >= 64, "ring.n_theta", "must be at least 64");
    }
  }
  if (doc.contains("current")) {
    const Json& c = doc.at("current");
    s.keys(c, "current", {"sigma", "stagnation_tol", "quiver_stride"});
    if (c.is_object()) {
      if (c.contains("sigma")) {
        cfg.current.sigmas.clear();
        const Json& sg = c.at("sigma");
        const Json list = sg.is_array() ? sg : Json::array({sg});
        for (const auto& v : list) {
          if (!v.is_number() || v.get<double>() < 0.0 || v.get<double>() > 1.0)
            s.error("current.sigma", "values must be numbers in [0, 1]");
          else
            cfg.current.sigmas.push_back(v.get<double>());
        }
        s.require(!list.empty(), "current.sigma", "must not be empty");
      }
      cfg.current.stagnation_tol = s.number(c, "stagnation_tol", "current", 1e-6);
      cfg.current.quiver_stride = s.integer(c, "quiver_stride", "current", 1);
      s.require(cfg.current.stagnation_tol > 0.0, "current.stagnation_tol", "must be positive");
      s.require(cfg.current.quiver_stride >= 1, "current.quiver_stride", "must be at least 1");
    }
  }
  if (doc.contains("shear")) {
    const Json& sh = doc.at("shear");
    s.keys(sh, "shear", {"window", "baseline_window", "mad_factor"});
    if (sh.is_object()) {
      cfg.shear.window = s.integer(sh, "window", "shear", 5);
      cfg.shear.baseline_window = s.integer(sh, "baseline_window", "shear", 51);
      cfg.shear.mad_factor = s.number(sh, "mad_factor", "shear", 3.0);
      s.require(cfg.shear.window >= 1 && cfg.shear.window % 2 == 1, "shear.window", "must be odd and positive");
      s.require(cfg.shear.baseline_window >= 1 && cfg.shear.baseline_window % 2 == 1, "shear.baseline_window",
                "must be odd and positive");
      s.require(cfg.shear.mad_factor > 0.0, "shear.mad_factor", "must be positive");
    }
  }
  if (doc.contains("output")) {
    const Json& o = doc.at("output");
    s.keys(o, "output", {"format", "strict"});
    if (o.is_object()) {
      cfg.format = s.string(o, "format", "output", "csv");
      cfg.strict = s.boolean(o, "strict", "output", false);
      s.require(cfg.format == "csv" || cfg.format == "binary", "output.format", "must be csv or binary");
    }
  }
}

}  // namespace

RunConfig parse_config(const Json& document) {
  Schema s;
  RunConfig cfg;
  cfg.document = document;
  s.keys(document, "config",
         {"description", "state", "cutoff", "truncation_tol", "params", "grid", "times", "ring", "current", "shear",
          "output"});
  if (!document.is_object()) s.throw_if_failed();
  if (document.contains("description") && !document.at("description").is_string())
    s.error("description", "must be a string");
  cfg.cutoff = s.integer(document, "cutoff", "config", -1);
  cfg.truncation_tol = s.number(document, "truncation_tol", "config", kDefaultTruncationTol);
  s.require(!document.contains("cutoff") || cfg.cutoff >= 0, "cutoff", "must be nonnegative");
  s.require(cfg.truncation_tol > 0.0 && cfg.truncation_tol < 1.0, "truncation_tol", "must lie in (0, 1)");
  parse_params(s, document, cfg);
  parse_state(s, document, cfg);
  parse_grid(s, document, cfg);
  parse_times(s, document, cfg);
  parse_sections(s, document, cfg);
  s.throw_if_failed();
  cfg.hash = io::config_hash(document);
  return cfg;
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(doc);
}

namespace {

std::string indexed(const std::string& stem, std::size_t k) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "_t%04zu", k);
  return stem + buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void write_json(const fs::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

class Runner {
 public:
  Runner(const RunConfig& cfg, const RunOptions& opt, Command cmd, std::ostream& log)
      : cfg_(cfg), log_(log), cmd_(cmd), dir_(opt.out_dir) {
    format_ = opt.format.empty() ? cfg.format : opt.format;
    strict_ = opt.strict || cfg.strict;
    if (format_ != "csv" && format_ != "binary") throw ConfigError("format must be csv or binary");
  }

  int operator()() {
    fs::create_directories(dir_);
    switch (cmd_) {
      case Command::evolve: evolve(); break;
      case Command::ring: ring(); break;
      case Command::current: current(); break;
      case Command::shear: shear(); break;
      case Command::classical: classical(); break;
    }
    if (strict_ && !warnings_.empty()) {
      for (const auto& w : warnings_) log_ << "strict: " << w << '\n';
      return kExitNumerical;
    }
    return kExitOk;
  }

 private:
  Json metadata() const {
    return Json{{"command", command_name(cmd_)},
                {"config", cfg_.document},
                {"config_hash", cfg_.hash},
                {"code_version", io::kCodeVersion},
                {"params", io::to_json(cfg_.params)},
                {"grid", io::to_json(cfg_.grid)}};
  }

  StateVector state() const { return make_state(cfg_.state, cfg_.cutoff, cfg_.truncation_tol); }

  ScalarField wigner_at(const StateVector& s0, double t) {
    ScalarField w = wigner_grid(kerrwig::evolve(s0, t, cfg_.params), cfg_.grid, cfg_.params.hbar);
    for (const auto& msg : w.warnings) warnings_.push_back("t=" + io::format_double(t) + ": " + msg);
    return w;
  }

  std::string write_field(const std::string& stem, const std::vector<io::NamedColumn>& cols, const Json& meta,
                          int stride = 1) {
    const std::string name = stem + (format_ == "csv" ? ".csv" : ".bin");
    std::ofstream out(dir_ / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir_ / name).string());
    if (format_ == "csv")
      io::write_fields_csv(out, cfg_.grid, cols, meta, stride);
    else
      io::write_fields_binary(out, cfg_.grid, cols, meta, stride);
    return name;
  }

  void evolve() {
    const StateVector s0 = state();
    Json snapshots = Json::array();
    for (std::size_t k = 0; k < cfg_.times.size(); ++k) {
      const double t = cfg_.times[k];
      const ScalarField w = wigner_at(s0, t);
      Json meta = metadata();
      meta["t"] = t;
      meta["warnings"] = w.warnings;
      const std::string file = write_field(indexed("W", k), {{"W", &w.values}}, meta);
      const Negativity neg = negativity(w);
      Json entry{{"t", t},
                 {"file", file},
                 {"min", neg.min_value},
                 {"negative_volume", neg.negative_volume},
                 {"integral", w.integral()},
                 {"warnings", w.warnings}};
      if (cfg_.grid.nx == cfg_.grid.np && std::abs(cfg_.grid.hx() - cfg_.grid.hp()) <= 1e-12 * cfg_.grid.hx()) {
        const SpectralSummary spec = spectral_content(w, cfg_.params.hbar);
        entry["spectral_centroid"] = spec.centroid;
        entry["spectral_high_fraction"] = spec.high_fraction;
      }
      snapshots.push_back(entry);
    }
    write_json(dir_ / "negativity.json", Json{{"config_hash", cfg_.hash}, {"snapshots", snapshots}});
  }

  void ring() {
    const StateVector s0 = state();
    const double r = cfg_.ring.radius;
    Json rows = Json::array();
    for (std::size_t k = 0; k < cfg_.times.size(); ++k) {
      const double t = cfg_.times[k];
      const ScalarField w = wigner_at(s0, t);
      std::optional<double> shift;
      if (cfg_.ring.co_rotating) shift = classical_phase(r, t, cfg_.params);
      const RingTrace trace = ring_trace(w, r, cfg_.ring.n_theta, shift, t);
      std::vector<double> shifted(trace.values.size());
      for (std::size_t m = 0; m < shifted.size(); ++m) shifted[m] = trace.minus_theta_shifted(m);
      Json meta = metadata();
      meta["t"] = t;
      meta["radius"] = r;
      meta["classical_shift"] = shift ? Json(*shift) : Json(nullptr);
      const std::string file = indexed("ring", k) + ".csv";
      std::ostringstream out;
      io::write_table_csv(out, {"theta", "minus_theta_shifted", "value"}, {trace.thetas, shifted, trace.values}, meta);
      write_text(dir_ / file, out.str());
      rows.push_back(Json{{"t", t},
                          {"file", file},
                          {"ring_probability", ring_probability(trace)},
                          {"pulse_mean_angle", pulse_mean_angle(trace)}});
    }
    write_json(dir_ / "ring_summary.json", Json{{"config_hash", cfg_.hash}, {"radius", r}, {"traces", rows}});
  }

  void current() {
    const StateVector s0 = state();
    Json report = Json::array();
    for (std::size_t k = 0; k < cfg_.times.size(); ++k) {
      const double t = cfg_.times[k];
      const ScalarField w = wigner_at(s0, t);
      const FieldDerivatives d = derivatives_of(w);
      for (std::size_t si = 0; si < cfg_.current.sigmas.size(); ++si) {
        const double sigma = cfg_.current.sigmas[si];
        const CurrentBundle b = current_general(d, cfg_.params, sigma);
        const ScalarField delta = vorticity(b.quantum);
        Json meta = metadata();
        meta["t"] = t;
        meta["sigma"] = sigma;
        meta["quiver_stride"] = cfg_.current.quiver_stride;
        char stem[32];
        std::snprintf(stem, sizeof stem, "current_s%02zu", si);
        const std::string file = write_field(indexed(stem, k),
                                             {{"Jx", &b.total.jx},
                                              {"Jp", &b.total.jp},
                                              {"jx", &b.classical.jx},
                                              {"jp", &b.classical.jp},
                                              {"JQx", &b.quantum.jx},
                                              {"JQp", &b.quantum.jp},
                                              {"delta", &delta.values}},
                                             meta, cfg_.current.quiver_stride);
        const double peak = b.total.max_norm();
        double radial = 0.0;
        const PhaseGrid& g = cfg_.grid;
        for (int i = 0; i < g.nx; ++i)
          for (int j = 0; j < g.np; ++j) {
            const std::size_t n = g.index(i, j);
            radial = std::max(radial, std::abs(g.x(i) * b.total.jx[n] + g.p(j) * b.total.jp[n]));
          }
        const StagnationReport stag = stagnation_points(b.total, cfg_.current.stagnation_tol);
        Json points = Json::array();
        for (const auto& pt : stag.points) points.push_back(Json{{"x", pt.x}, {"p", pt.p}, {"cells", pt.cells}});
        const double defect = peak > 0.0 ? radial / peak : 0.0;
        report.push_back(Json{{"t", t},
                              {"sigma", sigma},
                              {"file", file},
                              {"max_norm", peak},
                              {"tangential_defect", defect},
                              {"tangential", defect <= 1e-10},
                              {"stagnation_points", points},
                              {"extended_stagnation_clusters", stag.extended.size()},
                              {"degenerate", stag.degenerate}});
      }
    }
    write_json(dir_ / "stagnation.json", Json{{"config_hash", cfg_.hash}, {"fields", report}});
  }

  void shear() {
    if (static_cast<int>(cfg_.times.size()) < 3 * cfg_.shear.baseline_window)
      throw ConfigError("shear: need at least 3*baseline_window time samples (have " +
                        std::to_string(cfg_.times.size()) + ")");
    for (std::size_t k = 1; k < cfg_.times.size(); ++k)
      if (!(cfg_.times[k] > cfg_.times[k - 1])) throw ConfigError("shear: times must be strictly increasing");
    const StateVector s0 = state();
    ShearSeries series = pi_series(s0, cfg_.params, cfg_.times, cfg_.grid, cfg_.shear.window);
    const auto events = detect_special_states(series, cfg_.shear.baseline_window, cfg_.shear.mad_factor);
    Json meta = metadata();
    meta["window"] = cfg_.shear.window;
    meta["baseline_window"] = cfg_.shear.baseline_window;
    meta["mad_factor"] = cfg_.shear.mad_factor;
    std::ostringstream out;
    io::write_table_csv(out, {"t", "pi", "smoothed", "deviation"},
                        {series.times, series.pi_values, series.smoothed, series.deviation}, meta);
    write_text(dir_ / "shear_series.csv", out.str());
    Json list = Json::array();
    for (const auto& e : events)
      list.push_back(Json{{"t", e.time},
                          {"index", e.index},
                          {"kind", e.kind},
                          {"score", e.score},
                          {"fraction", std::to_string(e.numerator) + "/" + std::to_string(e.denominator)}});
    write_json(dir_ / "events.json", Json{{"config_hash", cfg_.hash},
                                          {"period", series.period},
                                          {"baseline_window", cfg_.shear.baseline_window},
                                          {"mad_factor", cfg_.shear.mad_factor},
                                          {"events", list}});
  }

  void classical() {
    const auto* coherent = std::get_if<CoherentSpec>(&cfg_.state);
    if (coherent == nullptr) throw ConfigError("classical: state must be coherent or gaussian");
    const GaussianDensity twin = classical_twin(coherent->alpha, cfg_.params.hbar);
    std::vector<double> measures;
    for (std::size_t k = 0; k < cfg_.times.size(); ++k) {
      const double t = cfg_.times[k];
      const ScalarField rho = liouville_pullback(ClassicalDensity{twin}, t, cfg_.grid, cfg_.params);
      Json meta = metadata();
      meta["t"] = t;
      write_field(indexed("rho", k), {{"rho", &rho.values}}, meta);
      measures.push_back(classical_shear_measure(twin, t, cfg_.params));
    }
    Json meta = metadata();
    meta["weighting"] = "rho";
    meta["method"] = "co-rotating quadrature of the transported Gaussian";
    std::ostringstream out;
    io::write_table_csv(out, {"t", "shear_measure"}, {cfg_.times, measures}, meta);
    write_text(dir_ / "shear_measure.csv", out.str());

    Json fit{{"config_hash", cfg_.hash}, {"weighting", "rho"}};
    const std::size_t n = measures.size();
    if (n >= 2) {
      double mt = 0.0, my = 0.0;
      for (std::size_t k = 0; k < n; ++k) mt += cfg_.times[k], my += measures[k];
      mt /= n, my /= n;
      double sxy = 0.0, sxx = 0.0, syy = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        sxy += (cfg_.times[k] - mt) * (measures[k] - my);
        sxx += (cfg_.times[k] - mt) * (cfg_.times[k] - mt);
        syy += (measures[k] - my) * (measures[k] - my);
      }
      if (sxx > 0.0) {
        fit["slope"] = sxy / sxx;
        fit["intercept"] = my - sxy / sxx * mt;
        fit["r2"] = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
      }
    }
    write_json(dir_ / "shear_fit.json", fit);
  }

  const RunConfig& cfg_;
  std::ostream& log_;
  Command cmd_;
  fs::path dir_;
  std::string format_;
  bool strict_ = false;
  std::vector<std::string> warnings_;
};

}  // namespace

int run(Command command, const RunConfig& config, const RunOptions& options, std::ostream& log) {
  try {
    return Runner(config, options, command, log)();
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const TruncationError& e) {
    log << "numerical error: " << e.what() << " (cutoff " << e.cutoff() << ", tail " << e.tail_mass() << ")\n";
    return kExitNumerical;
  } catch (const NumericalError& e) {
    log << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    log << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::out_of_range& e) {
    log << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
}

int main_entry(int argc, char** argv) {
  CLI::App app{"Kerr oscillator phase-space dynamics: Wigner fields, currents and shear diagnostics", "kerrwig"};
  app.require_subcommand(1);
  std::string config_path, out_dir = ".", format;
  unsigned threads = 0;
  bool strict = false;
  const std::vector<std::pair<const char*, const char*>> commands{
      {"evolve", "Wigner snapshots and negativity summary"},
      {"ring", "ring traces and ring probabilities"},
      {"current", "current fields, vorticity and stagnation report"},
      {"shear", "shear polarization series and special-state events"},
      {"classical", "classical Liouville snapshots and shear measure"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "run configuration (JSON)")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--threads", threads, "worker threads, 0 = all cores");
    sub->add_option("--format", format, "csv or binary")->check(CLI::IsMember({"csv", "binary"}));
    sub->add_flag("--strict", strict, "exit with status 3 on numerical-validity warnings");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  const Command command = parse_command(app.get_subcommands().front()->get_name());
  RunConfig config;
  try {
    config = load_config(config_path);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << '\n';
    return kExitConfig;
  }
  set_thread_count(threads);
  return run(command, config, RunOptions{out_dir, format, strict}, std::cerr);
}

}  // namespace kerrwig::cli
