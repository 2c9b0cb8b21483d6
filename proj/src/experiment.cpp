#include "voter/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <json.hpp>

#include "voter/channel.hpp"
#include "voter/control.hpp"
#include "voter/dynamics.hpp"
#include "voter/ensemble.hpp"
#include "voter/errors.hpp"
#include "voter/influence.hpp"
#include "voter/infotheory.hpp"
#include "voter/meanfield.hpp"

namespace voter {

namespace {

using json = nlohmann::ordered_json;

constexpr const char* kVersion = "1.0.0";

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::size_t parse_count(const std::string& text) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(text, &pos);
  } catch (const std::exception&) {
    throw InvalidArgument("not a non-negative integer: '" + text + "'");
  }
  if (pos != text.size() || text.find('-') != std::string::npos)
    throw InvalidArgument("not a non-negative integer: '" + text + "'");
  return static_cast<std::size_t>(v);
}

double parse_real(const std::string& text) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &pos);
  } catch (const std::exception&) {
    throw InvalidArgument("not a number: '" + text + "'");
  }
  if (pos != text.size()) throw InvalidArgument("not a number: '" + text + "'");
  return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(trim(item));
  return parts;
}

std::vector<double> eps_or(const ExperimentConfig& c, std::vector<double> fallback) {
  const auto& e = c.eps.empty() ? fallback : c.eps;
  for (double v : e) static_cast<void>(NoiseResponse(v));  // validates the range
  return e;
}

std::vector<std::size_t> tau_or(const ExperimentConfig& c, std::vector<std::size_t> fallback) {
  return c.tau.empty() ? fallback : c.tau;
}

EnsembleOptions options_of(const ExperimentConfig& c) {
  EnsembleOptions o;
  o.runs = c.runs;
  o.seed = c.seed;
  o.alpha = c.alpha;
  o.workers = c.workers;
  o.burn_in = c.burn_in;
  return o;
}

ForcingPlan forcing_of(const ExperimentConfig& c, const Graph& g) {
  if (c.force == "none") return {};
  const std::size_t i = parse_count(c.force);
  if (i >= g.node_count()) throw InvalidArgument("forced agent out of range");
  return ForcingPlan::single(static_cast<NodeId>(i), true);
}

InfluenceMode mode_of(const ExperimentConfig& c) {
  if (c.mode == "steady") return InfluenceMode::Steady;
  if (c.mode == "transient") return InfluenceMode::Transient;
  throw InvalidArgument("mode must be steady or transient");
}

json config_json(const ExperimentConfig& c) {
  json j;
  j["experiment"] = c.experiment;
  j["topology"] = c.topology;
  j["graph_file"] = c.graph_file;
  j["n"] = c.n;
  j["m"] = c.m;
  j["graph_seed"] = c.graph_seed;
  j["eps"] = c.eps;
  j["tau"] = c.tau;
  j["sizes"] = c.sizes;
  j["runs"] = c.runs;
  j["seed"] = c.seed;
  j["alpha"] = c.alpha;
  j["mode"] = c.mode;
  j["horizon"] = c.horizon;
  j["burn_in"] = c.burn_in ? json(*c.burn_in) : json(nullptr);
  j["agent"] = c.agent;
  j["force"] = c.force;
  j["spacing"] = c.spacing;
  j["m_max"] = c.m_max;
  j["tol"] = c.tol;
  j["workers"] = c.workers;
  j["out"] = c.out;
  return j;
}

struct Context {
  const ExperimentConfig& config;
  std::filesystem::path dir;
  json extra = json::object();
  std::vector<std::filesystem::path> files;

  std::ofstream open(const std::string& name) {
    files.push_back(dir / name);
    std::ofstream out(files.back(), std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidArgument("cannot write " + files.back().string());
    return out;
  }
};

std::size_t default_steady_horizon(const Graph& g, const NoiseResponse& noise, const ForcingPlan& f) {
  return 2 * auto_burn_in(g, noise, f).steps;
}

void density_trace(Context& ctx) {
  const auto& c = ctx.config;
  const Graph g = build_topology(c);
  const ForcingPlan forcing = forcing_of(c, g);
  const bool line = is_controlled_line(g) && forcing.size() == 1 && forcing.value(0) == true;
  auto out = ctx.open(c.experiment + ".csv");
  out << "eps,t,density,meanfield\n";
  json per_eps = json::array();
  for (double e : eps_or(c, {0.001, 0.01, 0.05})) {
    const NoiseResponse noise(e);
    EnsembleSpec spec;
    spec.graph = g;
    spec.noise = noise;
    spec.forcing = forcing;
    spec.runs = c.runs;
    spec.base_seed = c.seed;
    spec.alpha = c.alpha;
    spec.workers = c.workers;
    spec.horizon = c.horizon ? c.horizon : default_steady_horizon(g, noise, forcing);
    const EnsembleSummary s = run_ensemble(spec).summary;
    const std::size_t free_agents = g.node_count() - forcing.size();
    std::optional<MeanFieldSystem> mf;
    Eigen::VectorXd p;
    if (line) {
      mf.emplace(g.node_count() - 1, e);
      p = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(mf->n()), 0.5);
    }
    for (std::size_t t = 0; t <= spec.horizon; ++t) {
      out << num(e) << ',' << t << ',' << num(free_agents ? s.mean_density(t, true) : s.mean_density(t)) << ',';
      if (mf) {
        out << num(p.mean());
        p = iterate(*mf, p, 1);
      }
      out << '\n';
    }
    json entry;
    entry["eps"] = e;
    entry["horizon"] = spec.horizon;
    entry["precision"] = s.precision_bound;
    if (mf) entry["meanfield_S"] = mean_density(*mf).value;
    per_eps.push_back(entry);
  }
  ctx.extra["series"] = per_eps;
}

void multi_info_scan(Context& ctx) {
  const auto& c = ctx.config;
  const Graph g = build_topology(c);
  const ForcingPlan forcing = forcing_of(c, g);
  if (c.agent >= g.node_count()) throw InvalidArgument("agent out of range");
  const auto taus = tau_or(c, {1, 4});
  const std::size_t horizon = c.horizon ? c.horizon : 100;
  const std::size_t max_tau = *std::max_element(taus.begin(), taus.end());
  auto out = ctx.open(c.experiment + ".csv");
  out << "eps,t,tau,multi_information\n";
  for (double e : eps_or(c, {0.001, 0.01, 0.05})) {
    EnsembleSpec spec;
    spec.graph = g;
    spec.noise = NoiseResponse(e);
    spec.forcing = forcing;
    spec.runs = c.runs;
    spec.base_seed = c.seed;
    spec.workers = c.workers;
    spec.horizon = horizon + max_tau;
    spec.record_marginals = false;
    for (std::size_t t = 0; t <= spec.horizon; ++t) spec.retain_times.push_back(t);
    const EnsembleResult r = run_ensemble(spec);
    for (std::size_t t = 0; t <= horizon; ++t)
      for (std::size_t tau : taus)
        out << num(e) << ',' << t << ',' << tau << ','
            << num(delayed_multi_information(r.samples, static_cast<NodeId>(c.agent), t, tau).value_bits) << '\n';
  }
  ctx.extra["noise_floor_bits"] = independence_threshold_bits(c.runs);
}

void graph_coloring(Context& ctx) {
  const auto& c = ctx.config;
  const Graph g = build_topology(c);
  const double e = eps_or(c, {0.001}).front();
  const std::size_t tau = tau_or(c, {4}).front();
  const InfluenceMode mode = mode_of(c);
  const NoiseResponse noise(e);
  const EnsembleOptions opt = options_of(c);
  const auto influence = influence_scores(g, noise, mode, tau, opt);
  const auto info = multi_information_scores(g, noise, mode, 0, tau, opt);
  const auto ri = rank_agents(influence), rm = rank_agents(info);
  std::vector<std::size_t> pos_i(g.node_count()), pos_m(g.node_count());
  for (std::size_t k = 0; k < ri.size(); ++k) {
    pos_i[ri[k]] = k + 1;
    pos_m[rm[k]] = k + 1;
  }
  auto out = ctx.open(c.experiment + ".csv");
  out << "agent,degree,influence,multi_information,influence_rank,multi_information_rank\n";
  for (NodeId i = 0; i < g.node_count(); ++i)
    out << i << ',' << g.undirected_degree(i) << ',' << num(influence[i]) << ',' << num(info[i]) << ','
        << pos_i[i] << ',' << pos_m[i] << '\n';
  std::size_t overlap = 0;
  const std::size_t top = std::min<std::size_t>(5, ri.size());
  for (std::size_t a = 0; a < top; ++a)
    overlap += std::count(rm.begin(), rm.begin() + static_cast<std::ptrdiff_t>(top), ri[a]);
  ctx.extra["eps"] = e;
  ctx.extra["tau"] = tau;
  ctx.extra["top5_overlap"] = overlap;
}

void spacetime(Context& ctx) {
  const auto& c = ctx.config;
  const Graph g = build_topology(c);
  const ForcingPlan forcing = forcing_of(c, g);
  const auto eps = eps_or(c, {0.0, 0.01});
  const std::size_t horizon = c.horizon ? c.horizon : 2 * g.node_count();
  json files = json::array();
  for (std::size_t k = 0; k < eps.size(); ++k) {
    Engine rng = make_stream(c.seed + k);
    const auto traj = simulate(g, std::nullopt, NoiseResponse(eps[k]), forcing, horizon, rng);
    const std::string name = c.experiment + "_" + std::to_string(k) + ".txt";
    auto out = ctx.open(name);
    write_spacetime(out, traj);
    files.push_back({{"eps", eps[k]}, {"file", name}, {"final_density", density(traj, horizon, !forcing.empty())}});
  }
  ctx.extra["diagrams"] = files;
}

void mi_profile(Context& ctx) {
  const auto& c = ctx.config;
  const std::size_t n = c.n;
  const Graph g = make_line(n);
  const ForcingPlan forcing = ForcingPlan::single(0, true);
  const NodeId i = static_cast<NodeId>(c.agent);
  if (i == 0 || i >= n) throw InvalidArgument("agent must lie in 1..n-1");
  const auto taus = tau_or(c, {1, 5, 10});
  const std::size_t span = std::max<std::size_t>(*std::max_element(taus.begin(), taus.end()), n - i);
  auto out = ctx.open(c.experiment + ".csv");
  out << "eps,kind,tau,j,w\n";
  json fits = json::array();
  for (double e : eps_or(c, {0.001, 0.01, 0.05})) {
    const NoiseResponse noise(e);
    EnsembleSpec spec;
    spec.graph = g;
    spec.noise = noise;
    spec.forcing = forcing;
    spec.runs = c.runs;
    spec.base_seed = c.seed;
    spec.workers = c.workers;
    const std::size_t t = c.burn_in ? *c.burn_in : auto_burn_in(g, noise, forcing).steps;
    spec.horizon = t + span;
    spec.record_marginals = false;
    for (std::size_t s = t; s <= spec.horizon; ++s) spec.retain_times.push_back(s);
    const EnsembleResult r = run_ensemble(spec);
    for (std::size_t tau : taus)
      for (const auto& p : mutual_information_profile(r.samples, i, t, tau))
        out << num(e) << ",fixed," << tau << ',' << p.j << ',' << num(p.value_bits) << '\n';
    const auto matched = delay_matched_profile(r.samples, i, t, static_cast<NodeId>(n));
    for (const auto& p : matched)
      out << num(e) << ",matched," << p.tau << ',' << p.j << ',' << num(p.value_bits) << '\n';

    const double lc = control_length(e).value;
    std::vector<ProfilePoint> window;
    for (const auto& p : matched)
      if (!std::isfinite(lc) || p.j <= i + 3.0 * lc) window.push_back(p);
    json f{{"eps", e}, {"t", t}};
    try {
      const double floor = independence_threshold_bits(c.runs);
      const DecayFit d = fit_exponential_decay(above_floor_prefix(window, floor), i, floor);
      f["lambda"] = d.lambda;
      f["alpha"] = d.alpha;
      f["correlation"] = d.correlation;
      f["points_used"] = d.points_used;
    } catch (const InsufficientData&) {
      f["lambda"] = nullptr;
    }
    fits.push_back(f);
  }
  ctx.extra["noise_floor_bits"] = independence_threshold_bits(c.runs);
  ctx.extra["fits"] = fits;
}

void lambda_lc(Context& ctx) {
  const auto& c = ctx.config;
  const LambdaStudy study = lambda_vs_control_length(c.n, eps_or(c, {0.005, 0.01, 0.02, 0.05}), options_of(c));
  auto out = ctx.open(c.experiment + ".csv");
  out << "eps,inverse_control_length,lambda,alpha,correlation,points_used,points_excluded\n";
  for (std::size_t k = 0; k < study.points.size(); ++k) {
    const auto& p = study.points[k];
    const auto& f = study.measurements[k].fit;
    out << num(p.epsilon) << ',' << num(p.inverse_control_length) << ',' << num(p.lambda) << ','
        << num(f.alpha) << ',' << num(f.correlation) << ',' << f.points_used << ',' << f.points_excluded << '\n';
  }
  ctx.extra["slope"] = study.fit.slope;
  ctx.extra["intercept"] = study.fit.intercept;
  ctx.extra["correlation"] = study.fit.correlation;
  ctx.extra["low_confidence"] = study.fit.low_confidence;
}

void strategy(Context& ctx) {
  const auto& c = ctx.config;
  const EnsembleOptions opt = options_of(c);
  auto out = ctx.open(c.experiment + ".csv");
  out << "eps,t,single,spaced,spaced_free\n";
  json rows = json::array();
  for (double e : eps_or(c, {0.001, 0.01, 0.05})) {
    json entry{{"eps", e}};
    std::size_t d;
    if (c.spacing == "auto") {
      const double lambda = measure_decay_rate(c.n, e, 1, opt).fit.lambda;
      entry["lambda_1"] = lambda;
      d = spacing_from_lambda(lambda);
    } else {
      d = parse_count(c.spacing);
    }
    const SpacedForcingResult r = spaced_forcing_experiment(c.n, e, d, c.horizon, opt);
    for (std::size_t t = 0; t <= r.horizon; ++t) {
      out << num(e) << ',' << t << ',' << num(r.single_density[t]) << ',' << num(r.spaced_density[t]) << ',';
      if (!r.spaced_free_density.empty()) out << num(r.spaced_free_density[t]);
      out << '\n';
    }
    entry["spacing"] = d;
    entry["controlled_agents"] = r.controlled_agents;
    entry["single_steady"] = r.single_steady;
    entry["spaced_steady"] = r.spaced_steady;
    entry["spaced_free_steady"] = r.spaced_free_steady ? json(*r.spaced_free_steady) : json(nullptr);
    rows.push_back(entry);
  }
  ctx.extra["strategies"] = rows;
}

void capacity_table(Context& ctx) {
  const auto& c = ctx.config;
  if (c.m_max == 0) throw InvalidArgument("m_max must be positive");
  auto out = ctx.open(c.experiment + ".csv");
  out << "eps,m,error_probability,capacity\n";
  for (double e : eps_or(c, {0.01, 0.05, 0.1}))
    for (std::size_t m = 1; m <= c.m_max; ++m)
      out << num(e) << ',' << m << ',' << num(error_probability({e, m})) << ',' << num(capacity({e, m})) << '\n';
}

void gramian_bounds(Context& ctx) {
  const auto& c = ctx.config;
  const std::vector<std::size_t> sizes = c.sizes.empty() ? std::vector<std::size_t>{3, 5, 10} : c.sizes;
  auto out = ctx.open(c.experiment + ".csv");
  out << "n,eps,energy,lower,upper,log_lower,log_upper,truncation_k,tail_bound,lyapunov_residual\n";
  for (std::size_t n : sizes)
    for (double e : eps_or(c, {0.01, 0.05, 0.1})) {
      const StateSpaceSystem sys = build_system(n, e);
      const GramianResult w = observability_gramian(sys, c.tol);
      const EnergyBounds b = observation_energy_bounds(n, e);
      out << n << ',' << num(e) << ',' << num(w.matrix(0, 0)) << ',' << num(b.lower) << ',' << num(b.upper)
          << ',' << num(b.log_lower) << ',' << num(b.log_upper) << ',' << w.truncation_k << ','
          << num(w.tail_bound) << ',' << num(observability_residual(sys, w.matrix).cwiseAbs().maxCoeff()) << '\n';
    }
}

void control_length_curve(Context& ctx) {
  const auto& c = ctx.config;
  auto out = ctx.open(c.experiment + ".csv");
  out << "eps,control_length\n";
  for (double e : eps_or(c, parse_real_list("0.001:0.49:100"))) out << num(e) << ',' << num(control_length(e).value) << '\n';
}

const std::map<std::string, std::function<void(Context&)>>& registry() {
  static const std::map<std::string, std::function<void(Context&)>> r = {
      {"density-trace", density_trace},   {"multi-info-scan", multi_info_scan},
      {"graph-coloring-data", graph_coloring}, {"spacetime", spacetime},
      {"mi-profile", mi_profile},         {"lambda-lc", lambda_lc},
      {"strategy", strategy},             {"capacity", capacity_table},
      {"gramian-bounds", gramian_bounds}, {"control-length", control_length_curve},
  };
  return r;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [k, f] : registry()) v.push_back(k);
    return v;
  }();
  return names;
}

std::vector<double> parse_real_list(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) throw InvalidArgument("empty list");
  if (t.find(':') != std::string::npos) {
    const auto parts = split(t, ':');
    if (parts.size() != 3) throw InvalidArgument("range must be lo:hi:count");
    const double lo = parse_real(parts[0]), hi = parse_real(parts[1]);
    const std::size_t k = parse_count(parts[2]);
    if (k == 0 || (k == 1 && lo != hi) || hi < lo) throw InvalidArgument("invalid range '" + t + "'");
    std::vector<double> v(k);
    for (std::size_t i = 0; i < k; ++i)
      v[i] = k == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(k - 1);
    return v;
  }
  std::vector<double> v;
  for (const auto& p : split(t, ',')) v.push_back(parse_real(p));
  return v;
}

std::vector<std::size_t> parse_count_list(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) throw InvalidArgument("empty list");
  std::vector<std::size_t> v;
  for (const auto& p : split(t, ',')) v.push_back(parse_count(p));
  return v;
}

void apply_setting(ExperimentConfig& c, const std::string& raw_key, const std::string& raw_value) {
  std::string key = trim(raw_key);
  std::replace(key.begin(), key.end(), '-', '_');
  const std::string v = trim(raw_value);
  if (key == "experiment") c.experiment = v;
  else if (key == "topology") {
    if (v != "line" && v != "scale-free" && v != "file") throw InvalidArgument("unknown topology '" + v + "'");
    c.topology = v;
  } else if (key == "graph_file") { c.graph_file = v; c.topology = "file"; }
  else if (key == "n") c.n = parse_count(v);
  else if (key == "m") c.m = parse_count(v);
  else if (key == "graph_seed") c.graph_seed = parse_count(v);
  else if (key == "eps" || key == "eps_range") c.eps = parse_real_list(v);
  else if (key == "tau") c.tau = parse_count_list(v);
  else if (key == "sizes") c.sizes = parse_count_list(v);
  else if (key == "runs") c.runs = parse_count(v);
  else if (key == "seed") c.seed = parse_count(v);
  else if (key == "alpha") c.alpha = parse_real(v);
  else if (key == "mode") {
    if (v != "steady" && v != "transient") throw InvalidArgument("mode must be steady or transient");
    c.mode = v;
  } else if (key == "horizon") c.horizon = parse_count(v);
  else if (key == "burn_in") {
    if (v == "auto") c.burn_in.reset(); else c.burn_in = parse_count(v);
  } else if (key == "agent") c.agent = parse_count(v);
  else if (key == "force") { if (v != "none") parse_count(v); c.force = v; }
  else if (key == "spacing") { if (v != "auto") parse_count(v); c.spacing = v; }
  else if (key == "m_max") c.m_max = parse_count(v);
  else if (key == "tol") c.tol = parse_real(v);
  else if (key == "workers") c.workers = static_cast<unsigned>(parse_count(v));
  else if (key == "out") c.out = v;
  else throw InvalidArgument("unknown config key '" + raw_key + "'");
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig c;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InvalidArgument("config line " + std::to_string(number) + ": expected key = value");
    apply_setting(c, line.substr(0, eq), line.substr(eq + 1));
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config " + path);
  return parse_config(in);
}

Graph build_topology(const ExperimentConfig& c) {
  if (c.topology == "line") return make_line(c.n);
  if (c.topology == "scale-free") return make_scale_free(c.n, c.m, c.graph_seed);
  if (c.topology == "file") {
    if (c.graph_file.empty()) throw InvalidArgument("topology 'file' needs graph_file");
    return load_edge_list(c.graph_file);
  }
  throw InvalidArgument("unknown topology '" + c.topology + "'");
}

ExperimentOutput run_experiment(const ExperimentConfig& config) {
  const auto it = registry().find(config.experiment);
  if (it == registry().end()) throw InvalidArgument("unknown experiment '" + config.experiment + "'");
  if (config.runs == 0) throw InvalidArgument("runs must be positive");
  std::filesystem::create_directories(config.out);
  Context ctx{config, config.out, json::object(), {}};
  it->second(ctx);

  json meta;
  meta["experiment"] = config.experiment;
  meta["version"] = kVersion;
  meta["config"] = config_json(config);
  meta["precision"] = precision(config.runs, config.alpha);
  json files = json::array();
  for (const auto& f : ctx.files) files.push_back(f.filename().string());
  meta["files"] = files;
  meta["results"] = ctx.extra;
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  meta["generated_at"] = stamp;

  ctx.files.push_back(ctx.dir / (config.experiment + ".json"));
  std::ofstream out(ctx.files.back(), std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidArgument("cannot write " + ctx.files.back().string());
  out << meta.dump(2) << '\n';
  return {ctx.files};
}

}  // namespace voter
