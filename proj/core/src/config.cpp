#include "migsim/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <thread>

#include "migsim/errors.hpp"

namespace migsim {

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = [] {
    std::set<std::string> k;
    k.insert({"model.dimension", "model.side"});
    for (const char* kernel : {"model.a_plus", "model.a_minus"}) {
      for (const char* leaf :
           {"family", "amplitude", "radius", "scale", "eps_cut"}) {
        k.insert(std::string(kernel) + "." + leaf);
      }
    }
    for (const char* bg : {"model.b_plus", "model.b_minus"}) {
      for (const char* leaf : {"level", "cosine_amplitude", "cosine_mode"}) {
        k.insert(std::string(bg) + "." + leaf);
      }
    }
    k.insert({"run.t_end", "run.snapshot_times", "run.replicates", "run.seed",
              "run.event_cap", "run.audit_interval", "run.workers",
              "run.event_log", "run.init", "run.init_kappa", "run.init_points"});
    k.insert({"analysis.probe_boxes", "analysis.n_max", "analysis.confidence",
              "analysis.bootstrap_resamples", "analysis.r_bins",
              "analysis.r_max", "analysis.input"});
    k.insert({"kinetic.nodes", "kinetic.dt", "kinetic.t_end", "kinetic.rho0",
              "kinetic.field_dumps"});
    return k;
  }();
  return keys;
}

KernelSpec read_kernel(const TomlDocument& doc, const std::string& prefix) {
  KernelSpec spec;
  spec.family = doc.get_string(prefix + ".family", spec.family);
  spec.amplitude = doc.get_double(prefix + ".amplitude", spec.amplitude);
  spec.radius = doc.get_double(prefix + ".radius", spec.radius);
  spec.scale = doc.get_double(prefix + ".scale", spec.scale);
  spec.eps_cut = doc.get_double(prefix + ".eps_cut", spec.eps_cut);
  return spec;
}

BackgroundSpec read_background(const TomlDocument& doc,
                               const std::string& prefix) {
  BackgroundSpec spec;
  spec.level = doc.get_double(prefix + ".level", spec.level);
  spec.cosine_amplitude =
      doc.get_double(prefix + ".cosine_amplitude", spec.cosine_amplitude);
  spec.cosine_mode =
      static_cast<int>(doc.get_int(prefix + ".cosine_mode", spec.cosine_mode));
  return spec;
}

Kernel build_kernel(const KernelSpec& spec, int dim, const std::string& key) {
  try {
    if (spec.family == "tophat") {
      return Kernel::tophat(spec.amplitude, spec.radius, dim);
    }
    if (spec.family == "gaussian") {
      return Kernel::gaussian(spec.amplitude, spec.scale, dim, spec.eps_cut);
    }
    if (spec.family == "exponential") {
      return Kernel::exponential(spec.amplitude, spec.scale, dim, spec.eps_cut);
    }
  } catch (const std::invalid_argument& e) {
    throw config_error("key '" + key + "': " + e.what());
  }
  throw config_error("key '" + key +
                     ".family': must be tophat, gaussian, or exponential");
}

Background build_background(const BackgroundSpec& spec, const std::string& key) {
  try {
    if (spec.cosine_amplitude == 0.0) return Background::constant(spec.level);
    return Background::cosine(spec.level, spec.cosine_amplitude,
                              spec.cosine_mode);
  } catch (const std::invalid_argument& e) {
    throw config_error("key '" + key + "': " + e.what());
  }
}

}  // namespace

ExperimentConfig ExperimentConfig::from_document(const TomlDocument& doc) {
  for (const auto& [key, value] : doc.entries()) {
    (void)value;
    if (!known_keys().count(key)) {
      throw config_error("unknown key '" + key + "'");
    }
  }

  ExperimentConfig cfg;
  cfg.dimension = static_cast<int>(doc.get_int("model.dimension", cfg.dimension));
  cfg.side = doc.get_double("model.side", cfg.side);
  cfg.a_plus = read_kernel(doc, "model.a_plus");
  cfg.a_minus = read_kernel(doc, "model.a_minus");
  cfg.b_plus = read_background(doc, "model.b_plus");
  cfg.b_minus = read_background(doc, "model.b_minus");

  cfg.t_end = doc.get_double("run.t_end", cfg.t_end);
  cfg.snapshot_times =
      doc.get_double_array("run.snapshot_times", cfg.snapshot_times);
  cfg.replicates = doc.get_uint("run.replicates", cfg.replicates);
  if (doc.has("run.seed")) {
    cfg.seed = doc.get_uint("run.seed");
    cfg.seed_set = true;
  }
  cfg.event_cap = doc.get_uint("run.event_cap", cfg.event_cap);
  cfg.audit_interval = doc.get_uint("run.audit_interval", cfg.audit_interval);
  cfg.workers = static_cast<int>(doc.get_int("run.workers", cfg.workers));
  cfg.event_log = doc.get_bool("run.event_log", cfg.event_log);
  cfg.init = doc.get_string("run.init", cfg.init);
  cfg.init_kappa = doc.get_double("run.init_kappa", cfg.init_kappa);
  cfg.init_points = doc.get_double_array("run.init_points", cfg.init_points);

  cfg.probe_boxes = doc.get_double_array("analysis.probe_boxes", cfg.probe_boxes);
  cfg.n_max = static_cast<int>(doc.get_int("analysis.n_max", cfg.n_max));
  cfg.confidence = doc.get_double("analysis.confidence", cfg.confidence);
  cfg.bootstrap_resamples = static_cast<int>(
      doc.get_int("analysis.bootstrap_resamples", cfg.bootstrap_resamples));
  cfg.r_bins = static_cast<int>(doc.get_int("analysis.r_bins", cfg.r_bins));
  cfg.r_max = doc.get_double("analysis.r_max", cfg.r_max);
  cfg.analysis_input = doc.get_string("analysis.input", cfg.analysis_input);

  cfg.nodes = static_cast<int>(doc.get_int("kinetic.nodes", cfg.nodes));
  cfg.dt = doc.get_double("kinetic.dt", cfg.dt);
  cfg.kinetic_t_end = doc.get_double("kinetic.t_end", cfg.kinetic_t_end);
  cfg.rho0 = doc.get_double("kinetic.rho0", cfg.rho0);
  cfg.field_dumps = doc.get_bool("kinetic.field_dumps", cfg.field_dumps);
  return cfg;
}

ExperimentConfig ExperimentConfig::from_text(
    const std::string& text, const std::string& origin,
    const std::vector<std::string>& overrides) {
  TomlDocument doc = TomlDocument::parse(text, origin);
  for (const std::string& ov : overrides) {
    const std::size_t eq = ov.find('=');
    if (eq == std::string::npos) {
      throw config_error("override must look like key=value: " + ov);
    }
    doc.set_from_string(ov.substr(0, eq), ov.substr(eq + 1));
  }
  return from_document(doc);
}

ExperimentConfig ExperimentConfig::from_file(
    const std::string& path, const std::vector<std::string>& overrides) {
  TomlDocument doc = TomlDocument::parse_file(path);
  for (const std::string& ov : overrides) {
    const std::size_t eq = ov.find('=');
    if (eq == std::string::npos) {
      throw config_error("override must look like key=value: " + ov);
    }
    doc.set_from_string(ov.substr(0, eq), ov.substr(eq + 1));
  }
  return from_document(doc);
}

void ExperimentConfig::validate() const {
  if (dimension != 1 && dimension != 2) {
    throw config_error("key 'model.dimension': must be 1 or 2");
  }
  if (!(side > 0.0) || !std::isfinite(side)) {
    throw config_error("key 'model.side': must be positive and finite");
  }
  if (!seed_set) {
    throw config_error(
        "key 'run.seed': required; runs must be reproducible, so there is no "
        "wall-clock fallback");
  }
  if (replicates < 1) {
    throw config_error("key 'run.replicates': must be at least 1");
  }
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) {
    throw config_error("key 'run.t_end': must be finite and nonnegative");
  }
  for (std::size_t i = 0; i < snapshot_times.size(); ++i) {
    if (snapshot_times[i] < 0.0 || snapshot_times[i] > t_end) {
      throw config_error("key 'run.snapshot_times': entries must lie in [0, t_end]");
    }
    if (i > 0 && snapshot_times[i] <= snapshot_times[i - 1]) {
      throw config_error("key 'run.snapshot_times': must increase strictly");
    }
  }
  if (init != "empty" && init != "poisson" && init != "points") {
    throw config_error("key 'run.init': must be empty, poisson, or points");
  }
  if (init == "poisson" && init_kappa < 0.0) {
    throw config_error("key 'run.init_kappa': must be nonnegative");
  }
  if (init == "points" &&
      init_points.size() % static_cast<std::size_t>(dimension) != 0) {
    throw config_error(
        "key 'run.init_points': flattened coordinates, length must be a "
        "multiple of the dimension");
  }
  if (workers < 0) {
    throw config_error("key 'run.workers': must be nonnegative");
  }

  // Model-level checks surface with their config keys attached.
  const ModelParams params = model();
  try {
    params.validate();
  } catch (const std::invalid_argument& e) {
    throw config_error(std::string("model block: ") + e.what());
  }

  const std::size_t group = 2 * static_cast<std::size_t>(dimension);
  if (probe_boxes.size() % group != 0) {
    throw config_error(
        "key 'analysis.probe_boxes': flattened lo/hi groups of " +
        std::to_string(group) + " numbers each");
  }
  for (const Box& b : probe_box_list()) {
    if (!b.valid(params.window)) {
      throw config_error(
          "key 'analysis.probe_boxes': boxes must satisfy 0 <= lo < hi <= side");
    }
  }
  if (n_max < 1 || n_max > 8) {
    throw config_error("key 'analysis.n_max': must lie in [1, 8]");
  }
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw config_error("key 'analysis.confidence': must lie in (0, 1)");
  }
  if (bootstrap_resamples < 10) {
    throw config_error("key 'analysis.bootstrap_resamples': must be at least 10");
  }
  if (r_bins < 1) {
    throw config_error("key 'analysis.r_bins': must be at least 1");
  }
  if (effective_r_max() > side / 2.0) {
    throw config_error("key 'analysis.r_max': may not exceed side / 2");
  }

  if (nodes < 4) {
    throw config_error("key 'kinetic.nodes': must be at least 4");
  }
  if (!(dt > 0.0)) {
    throw config_error("key 'kinetic.dt': must be positive");
  }
  if (rho0 > 0.0 && !std::isfinite(rho0)) {
    throw config_error("key 'kinetic.rho0': must be finite");
  }
}

ModelParams ExperimentConfig::model() const {
  ModelParams p;
  p.window = TorusWindow{side, dimension};
  p.a_plus = build_kernel(a_plus, dimension, "model.a_plus");
  p.a_minus = build_kernel(a_minus, dimension, "model.a_minus");
  p.b_plus = build_background(b_plus, "model.b_plus");
  p.b_minus = build_background(b_minus, "model.b_minus");
  return p;
}

InitialCondition ExperimentConfig::initial_condition() const {
  if (init == "empty") return EmptyInit{};
  if (init == "poisson") return PoissonInit{init_kappa};
  ExplicitInit e;
  const std::size_t d = static_cast<std::size_t>(dimension);
  for (std::size_t i = 0; i + d <= init_points.size(); i += d) {
    Position p{init_points[i], d == 2 ? init_points[i + 1] : 0.0};
    e.points.push_back(p);
  }
  return e;
}

std::vector<Box> ExperimentConfig::probe_box_list() const {
  std::vector<Box> out;
  const std::size_t d = static_cast<std::size_t>(dimension);
  const std::size_t group = 2 * d;
  if (probe_boxes.empty()) {
    // Default probe: the centered box covering half the side per axis.
    Box b;
    for (std::size_t k = 0; k < d; ++k) {
      b.lo[k] = side * 0.25;
      b.hi[k] = side * 0.75;
    }
    out.push_back(b);
    return out;
  }
  for (std::size_t i = 0; i + group <= probe_boxes.size(); i += group) {
    Box b;
    for (std::size_t k = 0; k < d; ++k) {
      b.lo[k] = probe_boxes[i + k];
      b.hi[k] = probe_boxes[i + d + k];
    }
    out.push_back(b);
  }
  return out;
}

ReplicateOptions ExperimentConfig::replicate_options() const {
  ReplicateOptions opts;
  opts.sim.event_cap = event_cap;
  opts.sim.audit_interval = audit_interval;
  opts.record_events = event_log;
  return opts;
}

int ExperimentConfig::effective_workers() const {
  if (workers > 0) return workers;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

TomlDocument ExperimentConfig::to_document() const {
  TomlDocument doc;
  doc.set("model.dimension", static_cast<long long>(dimension));
  doc.set("model.side", side);
  auto put_kernel = [&](const std::string& prefix, const KernelSpec& k) {
    doc.set(prefix + ".family", k.family);
    doc.set(prefix + ".amplitude", k.amplitude);
    doc.set(prefix + ".radius", k.radius);
    doc.set(prefix + ".scale", k.scale);
    doc.set(prefix + ".eps_cut", k.eps_cut);
  };
  put_kernel("model.a_plus", a_plus);
  put_kernel("model.a_minus", a_minus);
  auto put_background = [&](const std::string& prefix, const BackgroundSpec& b) {
    doc.set(prefix + ".level", b.level);
    doc.set(prefix + ".cosine_amplitude", b.cosine_amplitude);
    doc.set(prefix + ".cosine_mode", static_cast<long long>(b.cosine_mode));
  };
  put_background("model.b_plus", b_plus);
  put_background("model.b_minus", b_minus);

  doc.set("run.t_end", t_end);
  doc.set("run.snapshot_times", snapshot_times);
  doc.set("run.replicates", static_cast<long long>(replicates));
  if (seed_set) doc.set("run.seed", static_cast<long long>(seed));
  doc.set("run.event_cap", static_cast<long long>(event_cap));
  doc.set("run.audit_interval", static_cast<long long>(audit_interval));
  doc.set("run.workers", static_cast<long long>(workers));
  doc.set("run.event_log", event_log);
  doc.set("run.init", init);
  doc.set("run.init_kappa", init_kappa);
  doc.set("run.init_points", init_points);

  doc.set("analysis.probe_boxes", probe_boxes);
  doc.set("analysis.n_max", static_cast<long long>(n_max));
  doc.set("analysis.confidence", confidence);
  doc.set("analysis.bootstrap_resamples",
          static_cast<long long>(bootstrap_resamples));
  doc.set("analysis.r_bins", static_cast<long long>(r_bins));
  doc.set("analysis.r_max", r_max);
  doc.set("analysis.input", analysis_input);

  doc.set("kinetic.nodes", static_cast<long long>(nodes));
  doc.set("kinetic.dt", dt);
  doc.set("kinetic.t_end", kinetic_t_end);
  doc.set("kinetic.rho0", rho0);
  doc.set("kinetic.field_dumps", field_dumps);
  return doc;
}

std::uint64_t ExperimentConfig::config_hash() const {
  return fnv1a64(to_document().canonical());
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace migsim
