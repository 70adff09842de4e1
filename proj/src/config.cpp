#include "graphukf/config.hpp"

#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "graphukf/errors.hpp"

namespace graphukf {

namespace pt = boost::property_tree;

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "experiment.n",         "experiment.steps",     "experiment.trials",
      "experiment.seed",      "experiment.scenario",  "experiment.filters",
      "experiment.phi",       "experiment.q_var",     "experiment.r_nominal",
      "experiment.init_var",  "experiment.threads",   "experiment.out",
      "graph.model",          "graph.p",              "graph.radius",
      "graph.seed",           "loss.gr_beta",         "loss.gr_gamma",
      "loss.huber_sigma",     "loss.cauchy_sigma",    "ut.alpha",
      "ut.beta",              "ut.kappa",             "irls.threshold",
      "irls.max_iters",       "irls.gsp_gain"};
  return keys;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

template <class T>
T get(const pt::ptree& tree, const std::string& key, T fallback) {
  if (!tree.get_child_optional(key)) return fallback;
  try {
    return tree.get<T>(key);
  } catch (const pt::ptree_bad_data&) {
    throw ConfigError("config: bad value for '" + key + "'");
  }
}

}  // namespace

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

GainMode parse_gain_mode(const std::string& text) {
  if (text == "full") return GainMode::Full;
  if (text == "diagonal") return GainMode::Diagonal;
  throw ConfigError("unknown gain mode '" + text + "'");
}

std::string to_string(GainMode mode) { return mode == GainMode::Full ? "full" : "diagonal"; }

TopologyModel parse_topology_model(const std::string& name, double p, double radius) {
  if (name == "erdos_renyi") return ErdosRenyi{p};
  if (name == "ring") return Ring{};
  if (name == "geometric") return RandomGeometric{radius};
  throw ConfigError("unknown graph model '" + name + "'");
}

std::string topology_model_name(const TopologyModel& model) {
  if (std::holds_alternative<ErdosRenyi>(model)) return "erdos_renyi";
  if (std::holds_alternative<Ring>(model)) return "ring";
  return "geometric";
}

ExperimentConfig merge_config(ExperimentConfig c, std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError("config: key '" + section + "' outside a section");
    for (const auto& [key, value] : body) {
      if (!known_keys().count(section + "." + key)) {
        throw ConfigError("config: unknown key '" + section + "." + key + "'");
      }
    }
  }

  c.n = get(tree, "experiment.n", c.n);
  c.d_steps = get(tree, "experiment.steps", c.d_steps);
  c.m_trials = get(tree, "experiment.trials", c.m_trials);
  c.seed = get(tree, "experiment.seed", c.seed);
  c.noise_scenario = get(tree, "experiment.scenario", c.noise_scenario);
  if (auto filters = tree.get_optional<std::string>("experiment.filters")) {
    c.filters = split_list(*filters);
  }
  c.phi = get(tree, "experiment.phi", c.phi);
  c.q_var = get(tree, "experiment.q_var", c.q_var);
  c.r_nominal = get(tree, "experiment.r_nominal", c.r_nominal);
  c.init_var = get(tree, "experiment.init_var", c.init_var);
  c.threads = get(tree, "experiment.threads", c.threads);
  c.out_dir = get(tree, "experiment.out", c.out_dir.string());

  double p = 0.5;
  double radius = 0.5;
  if (const auto* er = std::get_if<ErdosRenyi>(&c.graph_model)) p = er->p;
  if (const auto* rg = std::get_if<RandomGeometric>(&c.graph_model)) radius = rg->radius;
  p = get(tree, "graph.p", p);
  radius = get(tree, "graph.radius", radius);
  c.graph_model =
      parse_topology_model(get(tree, "graph.model", topology_model_name(c.graph_model)), p, radius);
  if (auto seed = tree.get_optional<std::string>("graph.seed")) {
    c.graph_seed = get<std::uint64_t>(tree, "graph.seed", 0);
  }

  c.losses.general.beta = get(tree, "loss.gr_beta", c.losses.general.beta);
  c.losses.general.gamma = get(tree, "loss.gr_gamma", c.losses.general.gamma);
  c.losses.huber.sigma = get(tree, "loss.huber_sigma", c.losses.huber.sigma);
  c.losses.cauchy.sigma = get(tree, "loss.cauchy_sigma", c.losses.cauchy.sigma);

  c.ut_alpha = get(tree, "ut.alpha", c.ut_alpha);
  c.ut_beta = get(tree, "ut.beta", c.ut_beta);
  c.ut_kappa = get(tree, "ut.kappa", c.ut_kappa);

  c.irls_threshold = get(tree, "irls.threshold", c.irls_threshold);
  c.irls_max_iters = get(tree, "irls.max_iters", c.irls_max_iters);
  c.gsp_gain = parse_gain_mode(get(tree, "irls.gsp_gain", to_string(c.gsp_gain)));
  return c;
}

ExperimentConfig parse_config(std::istream& in) { return merge_config(ExperimentConfig{}, in); }

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  return parse_config(in);
}

void write_config(const ExperimentConfig& c, std::ostream& out) {
  out << std::setprecision(17);
  std::string filters;
  for (std::size_t k = 0; k < c.filters.size(); ++k) {
    filters += (k ? "," : "") + c.filters[k];
  }
  out << "[experiment]\n"
      << "n=" << c.n << "\nsteps=" << c.d_steps << "\ntrials=" << c.m_trials
      << "\nseed=" << c.seed << "\nscenario=" << c.noise_scenario << "\nfilters=" << filters
      << "\nphi=" << c.phi << "\nq_var=" << c.q_var << "\nr_nominal=" << c.r_nominal
      << "\ninit_var=" << c.init_var << "\nthreads=" << c.threads << "\nout=" << c.out_dir.string()
      << "\n\n[graph]\nmodel=" << topology_model_name(c.graph_model);
  if (const auto* er = std::get_if<ErdosRenyi>(&c.graph_model)) out << "\np=" << er->p;
  if (const auto* rg = std::get_if<RandomGeometric>(&c.graph_model)) {
    out << "\nradius=" << rg->radius;
  }
  out << "\nseed=" << c.resolved_graph_seed() << "\n\n[loss]\ngr_beta=" << c.losses.general.beta
      << "\ngr_gamma=" << c.losses.general.gamma << "\nhuber_sigma=" << c.losses.huber.sigma
      << "\ncauchy_sigma=" << c.losses.cauchy.sigma << "\n\n[ut]\nalpha=" << c.ut_alpha
      << "\nbeta=" << c.ut_beta << "\nkappa=" << c.ut_kappa << "\n\n[irls]\nthreshold="
      << c.irls_threshold << "\nmax_iters=" << c.irls_max_iters
      << "\ngsp_gain=" << to_string(c.gsp_gain) << '\n';
}

}  // namespace graphukf
