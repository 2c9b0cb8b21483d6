#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "voter/channel.hpp"
#include "voter/control.hpp"
#include "voter/dynamics.hpp"
#include "voter/ensemble.hpp"
#include "voter/errors.hpp"
#include "voter/experiment.hpp"
#include "voter/graph.hpp"
#include "voter/influence.hpp"
#include "voter/infotheory.hpp"
#include "voter/meanfield.hpp"
#include "voter/oracle.hpp"

using namespace voter;
using json = nlohmann::ordered_json;

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

struct TopologyFlags {
  std::optional<std::size_t> line;
  std::optional<std::size_t> scale_free;
  std::size_t m = 1;
  std::uint64_t graph_seed = 1;
  std::string graph_file;

  void add(CLI::App* app) {
    auto* l = app->add_option("--line", line, "Controlled line with N free agents (N+1 nodes)");
    auto* s = app->add_option("--scale-free", scale_free, "Scale-free graph with N nodes");
    auto* g = app->add_option("--graph", graph_file, "Edge-list file");
    l->excludes(s)->excludes(g);
    s->excludes(g);
    app->add_option("--m", m, "Scale-free attachments per vertex");
    app->add_option("--graph-seed", graph_seed, "Scale-free generator seed");
  }

  Graph build(std::size_t default_line = 50) const {
    if (scale_free) return make_scale_free(*scale_free, m, graph_seed);
    if (!graph_file.empty()) return load_edge_list(graph_file);
    return make_line(line.value_or(default_line));
  }
  bool is_line() const { return !scale_free && graph_file.empty(); }
};

struct EnsembleFlags {
  std::size_t runs = 10'000;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  std::string burn_in = "auto";
  unsigned workers = 1;

  void add(CLI::App* app) {
    app->add_option("--runs,-N", runs, "Number of realizations");
    app->add_option("--alpha", alpha, "Risk level of the reported precision");
    app->add_option("--seed", seed, "Base seed; run r uses seed + r");
    app->add_option("--burn-in", burn_in, "Steps before measuring, or 'auto'");
    app->add_option("--workers", workers, "Worker threads");
  }
  EnsembleOptions options() const {
    EnsembleOptions o;
    o.runs = runs;
    o.alpha = alpha;
    o.seed = seed;
    o.workers = workers;
    if (burn_in != "auto") o.burn_in = std::stoull(burn_in);
    return o;
  }
};

ForcingPlan parse_forcing(const std::string& text, const Graph& g) {
  if (text == "none" || text.empty()) return {};
  ForcingPlan plan;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    bool value = true;
    if (auto colon = item.find(':'); colon != std::string::npos) {
      value = item.substr(colon + 1) != "0";
      item.erase(colon);
    }
    plan.force(static_cast<NodeId>(std::stoul(item)), value);
  }
  plan.validate(g.node_count());
  return plan;
}

std::vector<ProfilePoint> read_profile(const std::string& path, NodeId agent) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open profile " + path);
  std::vector<ProfilePoint> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cols.push_back(c);
    if (cols.size() < 2) throw InvalidArgument("profile rows need columns j,...,w");
    char* end = nullptr;
    const double j = std::strtod(cols.front().c_str(), &end);
    if (end == cols.front().c_str()) continue;  // header
    const auto jj = static_cast<NodeId>(j);
    out.push_back({jj, jj > agent ? jj - agent : 0, std::stod(cols.back())});
  }
  return out;
}

int run(int argc, char** argv) {
  CLI::App app{"Noisy voter model toolkit"};
  app.require_subcommand(1);

  // run
  auto* run_cmd = app.add_subcommand("run", "Run a named experiment");
  std::string experiment, config_path;
  std::map<std::string, std::string> settings;
  run_cmd->add_option("experiment", experiment, "Experiment name")->required();
  run_cmd->add_option("--config", config_path, "Flat key = value config file");
  const std::vector<std::pair<std::string, std::string>> keys = {
      {"topology", "line | scale-free | file"}, {"graph", "Edge-list file"}, {"n", "Free agents / nodes"},
      {"m", "Scale-free attachments"}, {"graph-seed", "Scale-free seed"}, {"eps", "Noise list a,b,c"},
      {"eps-range", "Noise grid lo:hi:count"}, {"tau", "Delay list"}, {"sizes", "System sizes"},
      {"runs", "Realizations"}, {"seed", "Base seed"}, {"alpha", "Risk level"},
      {"mode", "steady | transient"}, {"horizon", "Time steps"}, {"burn-in", "Steps or auto"},
      {"agent", "Agent index"}, {"force", "Forced agent or none"}, {"spacing", "auto or d"},
      {"m-max", "Largest channel length"}, {"tol", "Gramian tolerance"}, {"workers", "Worker threads"},
      {"out", "Output directory"}};
  for (const auto& [k, help] : keys) {
    run_cmd->add_option_function<std::string>(
        "--" + k, [&settings, key = k](const std::string& v) { settings[key] = v; }, help);
  }

  // meanfield
  auto* mf_cmd = app.add_subcommand("meanfield", "Stationary profile, control length and mean density");
  std::size_t mf_n = 50, mf_t = 0;
  double mf_eps = 0.01;
  mf_cmd->add_option("--n", mf_n, "Free agents");
  mf_cmd->add_option("--eps", mf_eps, "Noise")->required();
  mf_cmd->add_option("--t", mf_t, "Also print P(t) from P(0) = 1/2");

  // capacity
  auto* cap_cmd = app.add_subcommand("capacity", "Channel capacity table");
  std::string cap_eps = "0.01,0.05,0.1";
  std::size_t cap_m = 50;
  cap_cmd->add_option("--eps", cap_eps, "Noise list");
  cap_cmd->add_option("--m-max", cap_m, "Largest channel length");

  // gramian
  auto* gr_cmd = app.add_subcommand("gramian", "Observability or reachability Gramian");
  std::size_t gr_n = 5;
  double gr_eps = 0.05, gr_tol = 1e-14;
  bool gr_reach = false, gr_obs = false;
  std::string gr_out;
  gr_cmd->add_option("--n", gr_n, "State dimension");
  gr_cmd->add_option("--eps", gr_eps, "Noise")->required();
  gr_cmd->add_option("--tol", gr_tol, "Truncation tolerance");
  auto* reach_flag = gr_cmd->add_flag("--reach", gr_reach, "Reachability Gramian");
  gr_cmd->add_flag("--obs", gr_obs, "Observability Gramian (default)")->excludes(reach_flag);
  gr_cmd->add_option("--out", gr_out, "Write the matrix CSV here (default stdout)");

  // oracle
  auto* or_cmd = app.add_subcommand("oracle", "Exact enumeration of small systems");
  TopologyFlags or_topo;
  or_topo.add(or_cmd);
  double or_eps = 0.1;
  std::string or_check = "marginals", or_force = "default";
  std::size_t or_t = 0, or_tau = 1;
  NodeId or_i = 1;
  std::optional<NodeId> or_j;
  or_cmd->add_option("--eps", or_eps, "Noise");
  or_cmd->add_option("--force", or_force, "Forced agents i[:v],... or none");
  or_cmd->add_option("--check", or_check, "marginals | mi | multi | stationary")
      ->check(CLI::IsMember({"marginals", "mi", "multi", "stationary"}));
  or_cmd->add_option("--t", or_t, "Time (from i.i.d. Bernoulli(1/2))");
  or_cmd->add_option("--tau", or_tau, "Delay");
  or_cmd->add_option("--i", or_i, "Source agent");
  or_cmd->add_option("--j", or_j, "Target agent (mi)");
  bool or_stationary_start = false;
  or_cmd->add_flag("--from-stationary", or_stationary_start, "Start from the stationary law");

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "One realization");
  TopologyFlags sim_topo;
  sim_topo.add(sim_cmd);
  double sim_eps = 0.01;
  std::size_t sim_h = 100;
  std::uint64_t sim_seed = 0;
  std::string sim_force = "default", sim_traj, sim_st, sim_initial;
  sim_cmd->add_option("--eps", sim_eps, "Noise");
  sim_cmd->add_option("--horizon", sim_h, "Steps");
  sim_cmd->add_option("--seed", sim_seed, "Seed");
  sim_cmd->add_option("--force", sim_force, "Forced agents i[:v],... or none");
  sim_cmd->add_option("--initial", sim_initial, "Initial state as a 0/1 string");
  sim_cmd->add_option("--dump-trajectory", sim_traj, "Write the trajectory CSV");
  sim_cmd->add_option("--spacetime", sim_st, "Write the space-time diagram");

  // info
  auto* info_cmd = app.add_subcommand("info", "Delayed mutual or multi-information from an ensemble");
  TopologyFlags info_topo;
  info_topo.add(info_cmd);
  EnsembleFlags info_ens;
  info_ens.add(info_cmd);
  double info_eps = 0.01;
  std::string info_force = "default";
  NodeId info_i = 1;
  std::optional<NodeId> info_j;
  std::size_t info_t = 0, info_tau = 1;
  bool info_steady = false;
  info_cmd->add_option("--eps", info_eps, "Noise");
  info_cmd->add_option("--force", info_force, "Forced agents i[:v],... or none");
  info_cmd->add_option("--i", info_i, "Source agent");
  info_cmd->add_option("--j", info_j, "Target agent; omit for multi-information");
  info_cmd->add_option("--t", info_t, "Measurement time (after burn-in with --steady)");
  info_cmd->add_option("--tau", info_tau, "Delay");
  info_cmd->add_flag("--steady", info_steady, "Measure after the burn-in");

  // influence
  auto* inf_cmd = app.add_subcommand("influence", "Intrusive influence by forcing");
  TopologyFlags inf_topo;
  inf_topo.add(inf_cmd);
  EnsembleFlags inf_ens;
  inf_ens.add(inf_cmd);
  double inf_eps = 0.001;
  std::optional<NodeId> inf_agent;
  bool inf_rank = false;
  std::string inf_mode = "transient";
  std::size_t inf_t = 4;
  inf_cmd->add_option("--eps", inf_eps, "Noise");
  auto* force_opt = inf_cmd->add_option("--force", inf_agent, "Agent to force to 1");
  inf_cmd->add_flag("--rank", inf_rank, "Rank every agent by influence and by multi-information")->excludes(force_opt);
  inf_cmd->add_option("--mode", inf_mode, "steady | transient")->check(CLI::IsMember({"steady", "transient"}));
  inf_cmd->add_option("--t,--tau", inf_t, "Measurement time / delay");

  // fit
  auto* fit_cmd = app.add_subcommand("fit", "Exponential decay fit of a profile CSV (j, ..., w)");
  std::string fit_path;
  NodeId fit_agent = 1;
  double fit_min = 0.0;
  fit_cmd->add_option("--profile-from", fit_path, "Profile CSV")->required();
  fit_cmd->add_option("--agent", fit_agent, "Source agent i");
  fit_cmd->add_option("--min", fit_min, "Exclude values at or below this");

  // strategy
  auto* st_cmd = app.add_subcommand("strategy", "Single versus spaced forcing on the line");
  EnsembleFlags st_ens;
  st_ens.add(st_cmd);
  std::size_t st_n = 50, st_h = 0;
  double st_eps = 0.01;
  std::string st_spacing = "auto", st_out;
  st_cmd->add_option("--n", st_n, "Free agents");
  st_cmd->add_option("--eps", st_eps, "Noise");
  st_cmd->add_option("--spacing", st_spacing, "auto or d");
  st_cmd->add_option("--horizon", st_h, "Steps (0: automatic)");
  st_cmd->add_option("--out", st_out, "Write the density curves CSV here");

  // graph
  auto* g_cmd = app.add_subcommand("graph", "Generate a graph as an edge list");
  TopologyFlags g_topo;
  g_topo.add(g_cmd);
  std::string g_out;
  g_cmd->add_option("--out", g_out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  auto default_forcing = [](const std::string& text, const TopologyFlags& t, const Graph& g) {
    if (text == "default") return t.is_line() ? ForcingPlan::single(0, true) : ForcingPlan{};
    return parse_forcing(text, g);
  };

  if (*run_cmd) {
    ExperimentConfig cfg = config_path.empty() ? ExperimentConfig{} : load_config(config_path);
    cfg.experiment = experiment;
    for (const auto& [k, v] : settings) apply_setting(cfg, k == "graph" ? "graph_file" : k, v);
    const auto out = run_experiment(cfg);
    for (const auto& f : out.files) std::cout << f.string() << '\n';
    return 0;
  }

  if (*mf_cmd) {
    const MeanFieldSystem sys(mf_n, mf_eps);
    const auto st = stationary(sys);
    const auto lc = control_length(mf_eps);
    const auto s = mean_density(sys);
    const Eigen::VectorXd half = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(mf_n), 0.5);
    std::cout << "# control_length=" << num(lc.value) << " mean_density=" << num(s.value)
              << " steady_state_time=" << steady_state_time(sys, half) << '\n';
    Eigen::VectorXd pt;
    if (mf_t) pt = iterate(sys, half, mf_t);
    std::cout << (mf_t ? "i,stationary,p_t\n" : "i,stationary\n");
    for (std::size_t i = 0; i < mf_n; ++i) {
      std::cout << i + 1 << ',' << num(st.pi[static_cast<Eigen::Index>(i)]);
      if (mf_t) std::cout << ',' << num(pt[static_cast<Eigen::Index>(i)]);
      std::cout << '\n';
    }
    return 0;
  }

  if (*cap_cmd) {
    std::cout << "eps,m,error_probability,capacity\n";
    for (double e : parse_real_list(cap_eps))
      for (std::size_t m = 1; m <= cap_m; ++m)
        std::cout << num(e) << ',' << m << ',' << num(error_probability({e, m})) << ','
                  << num(capacity({e, m})) << '\n';
    return 0;
  }

  if (*gr_cmd) {
    const StateSpaceSystem sys = build_system(gr_n, gr_eps);
    const GramianResult w = gr_reach ? reachability_gramian(sys, gr_tol) : observability_gramian(sys, gr_tol);
    std::ostringstream csv;
    for (Eigen::Index r = 0; r < w.matrix.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.matrix.cols(); ++c) csv << (c ? "," : "") << num(w.matrix(r, c));
      csv << '\n';
    }
    if (gr_out.empty()) {
      std::cout << csv.str();
    } else {
      std::ofstream(gr_out) << csv.str();
    }
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(w.matrix).eigenvalues();
    json j;
    j["kind"] = gr_reach ? "reachability" : "observability";
    j["n"] = gr_n;
    j["eps"] = gr_eps;
    j["eigenvalues"] = std::vector<double>(ev.data(), ev.data() + ev.size());
    j["truncation_k"] = w.truncation_k;
    j["tail_bound"] = w.tail_bound;
    const Eigen::MatrixXd res = gr_reach ? reachability_residual(sys, w.matrix) : observability_residual(sys, w.matrix);
    j["lyapunov_residual"] = res.cwiseAbs().maxCoeff();
    if (gr_eps > 0.0) {
      const EnergyBounds b = observation_energy_bounds(gr_n, gr_eps);
      j["energy_bounds"] = {{"lower", b.lower}, {"upper", b.upper}, {"log_lower", b.log_lower}, {"log_upper", b.log_upper}};
    }
    (gr_out.empty() ? std::cerr : std::cout) << j.dump(2) << '\n';
    return 0;
  }

  if (*or_cmd) {
    const Graph g = or_topo.build(2);
    const ForcingPlan forcing = default_forcing(or_force, or_topo, g);
    const ExactChain chain(g, NoiseResponse(or_eps), forcing);
    const Eigen::VectorXd start = or_stationary_start ? exact_stationary(chain) : uniform_initial(chain);
    if (or_check == "marginals") {
      const auto m = exact_marginals(chain, start, or_t);
      std::cout << "i,p_one\n";
      for (std::size_t i = 0; i < m.size(); ++i) std::cout << i << ',' << num(m[i]) << '\n';
    } else if (or_check == "stationary") {
      const Eigen::VectorXd pi = exact_stationary(chain);
      const auto m = exact_marginals(chain, pi, 0);
      std::cout << "i,p_one\n";
      for (std::size_t i = 0; i < m.size(); ++i) std::cout << i << ',' << num(m[i]) << '\n';
    } else if (or_check == "mi") {
      std::cout << "i,j,t,tau,mi_bits\n";
      for (NodeId j = 0; j < g.node_count(); ++j) {
        if (or_j && j != *or_j) continue;
        std::cout << or_i << ',' << j << ',' << or_t << ',' << or_tau << ','
                  << num(exact_delayed_mi(chain, start, or_i, j, or_t, or_tau)) << '\n';
      }
    } else {
      std::cout << "i,t,tau,multi_information_bits\n"
                << or_i << ',' << or_t << ',' << or_tau << ','
                << num(exact_delayed_multi_info(chain, start, or_i, or_t, or_tau)) << '\n';
    }
    return 0;
  }

  if (*sim_cmd) {
    const Graph g = sim_topo.build();
    const ForcingPlan forcing = default_forcing(sim_force, sim_topo, g);
    std::optional<BitState> init;
    if (!sim_initial.empty()) init = BitState::from_string(sim_initial);
    Engine rng = make_stream(sim_seed);
    const auto traj = simulate(g, init, NoiseResponse(sim_eps), forcing, sim_h, rng);
    if (!sim_traj.empty()) {
      std::ofstream out(sim_traj);
      write_trajectory_csv(out, traj);
    }
    if (!sim_st.empty()) {
      std::ofstream out(sim_st);
      write_spacetime(out, traj);
    }
    std::cout << "final_density=" << num(density(traj, sim_h, !forcing.empty())) << '\n';
    return 0;
  }

  if (*info_cmd) {
    const Graph g = info_topo.build();
    const ForcingPlan forcing = default_forcing(info_force, info_topo, g);
    const NoiseResponse noise(info_eps);
    const EnsembleOptions opt = info_ens.options();
    EnsembleSpec spec;
    spec.graph = g;
    spec.noise = noise;
    spec.forcing = forcing;
    spec.runs = opt.runs;
    spec.base_seed = opt.seed;
    spec.alpha = opt.alpha;
    spec.workers = opt.workers;
    std::size_t t = info_t;
    if (info_steady) t += opt.burn_in ? *opt.burn_in : auto_burn_in(g, noise, forcing).steps;
    spec.horizon = t + info_tau;
    spec.retain_times = {t, t + info_tau};
    spec.record_marginals = false;
    const EnsembleResult r = run_ensemble(spec);
    const DelayedInfoResult d = info_j ? delayed_mutual_information(r.samples, info_i, *info_j, t, info_tau)
                                       : delayed_multi_information(r.samples, info_i, t, info_tau);
    json j{{"i", d.i}, {"j", d.j ? json(*d.j) : json(nullptr)}, {"t", d.t}, {"tau", d.tau},
           {"runs", d.runs}, {"value_bits", d.value_bits}, {"deterministic", d.deterministic},
           {"noise_floor_bits", independence_threshold_bits(d.runs)}};
    std::cout << j.dump(2) << '\n';
    return 0;
  }

  if (*inf_cmd) {
    const Graph g = inf_topo.build();
    const NoiseResponse noise(inf_eps);
    const InfluenceMode mode = inf_mode == "steady" ? InfluenceMode::Steady : InfluenceMode::Transient;
    const EnsembleOptions opt = inf_ens.options();
    if (inf_agent) {
      const InfluenceScore s = influence_by_forcing(g, noise, *inf_agent, mode, inf_t, opt);
      std::cout << "agent,mean_density,t,runs\n"
                << s.agent << ',' << num(s.mean_density) << ',' << s.t_measure << ',' << s.runs << '\n';
      return 0;
    }
    if (!inf_rank) throw InvalidArgument("influence needs --force <i> or --rank");
    const auto infl = influence_scores(g, noise, mode, inf_t, opt);
    const auto info = multi_information_scores(g, noise, mode, 0, inf_t, opt);
    const auto ri = rank_agents(infl), rm = rank_agents(info);
    std::cout << "position,influence_agent,influence,multi_information_agent,multi_information\n";
    for (std::size_t k = 0; k < ri.size(); ++k)
      std::cout << k + 1 << ',' << ri[k] << ',' << num(infl[ri[k]]) << ',' << rm[k] << ','
                << num(info[rm[k]]) << '\n';
    return 0;
  }

  if (*fit_cmd) {
    const DecayFit f = fit_exponential_decay(read_profile(fit_path, fit_agent), fit_agent, fit_min);
    json j{{"agent", f.agent}, {"alpha", f.alpha}, {"lambda", f.lambda}, {"correlation", f.correlation},
           {"points_used", f.points_used}, {"points_excluded", f.points_excluded}, {"decaying", f.decaying}};
    std::cout << j.dump(2) << '\n';
    return 0;
  }

  if (*st_cmd) {
    const EnsembleOptions opt = st_ens.options();
    json j{{"n", st_n}, {"eps", st_eps}};
    std::size_t d;
    if (st_spacing == "auto") {
      const double lambda = measure_decay_rate(st_n, st_eps, 1, opt).fit.lambda;
      j["lambda_1"] = lambda;
      d = spacing_from_lambda(lambda);
    } else {
      d = std::stoull(st_spacing);
    }
    const SpacedForcingResult r = spaced_forcing_experiment(st_n, st_eps, d, st_h, opt);
    j["spacing"] = d;
    j["controlled_agents"] = r.controlled_agents;
    j["single_steady"] = r.single_steady;
    j["spaced_steady"] = r.spaced_steady;
    j["spaced_free_steady"] = r.spaced_free_steady ? json(*r.spaced_free_steady) : json(nullptr);
    if (!st_out.empty()) {
      std::ofstream out(st_out);
      out << "t,single,spaced,spaced_free\n";
      for (std::size_t t = 0; t <= r.horizon; ++t) {
        out << t << ',' << num(r.single_density[t]) << ',' << num(r.spaced_density[t]) << ',';
        if (!r.spaced_free_density.empty()) out << num(r.spaced_free_density[t]);
        out << '\n';
      }
    }
    std::cout << j.dump(2) << '\n';
    return 0;
  }

  if (*g_cmd) {
    const Graph g = g_topo.build();
    if (g_out.empty()) {
      write_edge_list(std::cout, g);
    } else {
      std::ofstream out(g_out);
      write_edge_list(out, g);
    }
    return 0;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const BudgetExceeded& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const NumericFailure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const InsufficientData& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const UnreachableTarget& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
