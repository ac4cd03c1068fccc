#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "zeno/experiments.hpp"
#include "zeno/models.hpp"

namespace zeno {

namespace pt = boost::property_tree;

const char* field_family_name(FieldFamily f) {
  switch (f) {
    case FieldFamily::none: return "none";
    case FieldFamily::shaped: return "shaped";
    case FieldFamily::rectangular: return "rectangular";
  }
  return "?";
}

const char* observation_kind_name(ObservationKind k) {
  switch (k) {
    case ObservationKind::none: return "none";
    case ObservationKind::instantaneous: return "instantaneous";
    case ObservationKind::sequence: return "sequence";
    case ObservationKind::continuous: return "continuous";
  }
  return "?";
}

namespace {

FieldFamily parse_family(const std::string& s) {
  if (s == "none") return FieldFamily::none;
  if (s == "shaped") return FieldFamily::shaped;
  if (s == "rectangular") return FieldFamily::rectangular;
  throw std::invalid_argument("scenario: unknown field family '" + s + "'");
}

ObservationKind parse_kind(const std::string& s) {
  if (s == "none") return ObservationKind::none;
  if (s == "instantaneous") return ObservationKind::instantaneous;
  if (s == "sequence") return ObservationKind::sequence;
  if (s == "continuous") return ObservationKind::continuous;
  throw std::invalid_argument("scenario: unknown observation kind '" + s + "'");
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (item.find_first_not_of(" \t", used) != std::string::npos) {
      throw std::invalid_argument("scenario: bad number '" + item + "'");
    }
    out.push_back(v);
  }
  return out;
}

bool parse_bool(const std::string& s) {
  if (s == "true" || s == "yes" || s == "1") return true;
  if (s == "false" || s == "no" || s == "0") return false;
  throw std::invalid_argument("scenario: expected a boolean, got '" + s + "'");
}

// Shortest text that parses back to the same double.
std::string fmt(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string fmt_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + fmt(v[i]);
  return out;
}

template <class T>
T get_or(const pt::ptree& tree, const std::string& key, T fallback) {
  return tree.get<T>(key, fallback);
}

}  // namespace

Scenario parse_scenario(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw std::invalid_argument(std::string("scenario: ") + e.what());
  }
  Scenario s;
  s.name = tree.get<std::string>("scenario.name", "unnamed");
  s.model = tree.get<std::string>("scenario.model");
  const SystemSpec system = model_by_id(s.model);

  auto& f = s.field;
  f.family = parse_family(tree.get<std::string>("field.family", "shaped"));
  f.optimize = parse_bool(tree.get<std::string>("field.optimize", "true"));
  f.amplitude_max = get_or(tree, "field.amplitude_max", f.amplitude_max);
  f.amplitude_init_max = get_or(tree, "field.amplitude_init_max", f.amplitude_init_max);
  f.amplitudes = parse_list(tree.get<std::string>("field.amplitudes", ""));
  f.phases = parse_list(tree.get<std::string>("field.phases", ""));

  auto& o = s.observation;
  o.kind = parse_kind(tree.get<std::string>("observation.kind", "none"));
  o.op = tree.get<std::string>("observation.operator", "");
  o.time = get_or(tree, "observation.time", o.time);
  o.count = get_or<std::size_t>(tree, "observation.count", 0);
  o.optimize_window = parse_bool(tree.get<std::string>("observation.optimize_window", "false"));
  o.gamma_max = get_or(tree, "observation.gamma_max", o.gamma_max);
  o.gamma = get_or(tree, "observation.gamma", o.gamma);
  o.t1 = get_or(tree, "observation.t1", o.t1);
  o.t2 = get_or(tree, "observation.t2", o.t2);

  s.cost.kind = parse_cost_kind(tree.get<std::string>("cost.kind", "field"));
  s.cost.target = get_or(tree, "cost.target_percent", 100.0) / 100.0;
  s.cost.alpha = get_or(tree, "cost.alpha", system.alpha);

  auto& g = s.ga;
  g.population = get_or(tree, "ga.population", g.population);
  g.generations = get_or(tree, "ga.generations", g.generations);
  g.tournament = get_or(tree, "ga.tournament", g.tournament);
  g.crossover_rate = get_or(tree, "ga.crossover_rate", g.crossover_rate);
  g.mutation_rate = get_or(tree, "ga.mutation_rate", g.mutation_rate);
  g.mutation_scale = get_or(tree, "ga.mutation_scale", g.mutation_scale);
  g.elitism = get_or(tree, "ga.elitism", g.elitism);
  g.restarts = get_or(tree, "ga.restarts", g.restarts);
  g.seed = get_or<std::uint64_t>(tree, "ga.seed", g.seed);
  g.threads = get_or(tree, "ga.threads", g.threads);

  s.propagation.t_start = 0.0;
  s.propagation.t_end = system.final_time;
  s.propagation.dt = get_or(tree, "propagation.dt", s.propagation.dt);
  s.search_dt = get_or(tree, "propagation.search_dt", s.search_dt);
  s.trajectory_every = get_or(tree, "propagation.trajectory_every", s.trajectory_every);
  s.output_dir = tree.get<std::string>("output.dir", "");
  s.validate();
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("scenario: cannot open " + path.string());
  return parse_scenario(in);
}

std::string serialize_scenario(const Scenario& s) {
  std::ostringstream os;
  os << "[scenario]\nname = " << s.name << "\nmodel = " << s.model << "\n\n";
  os << "[field]\nfamily = " << field_family_name(s.field.family)
     << "\noptimize = " << (s.field.optimize ? "true" : "false")
     << "\namplitude_max = " << fmt(s.field.amplitude_max) << '\n';
  if (!std::isnan(s.field.amplitude_init_max)) {
    os << "amplitude_init_max = " << fmt(s.field.amplitude_init_max) << '\n';
  }
  if (!s.field.amplitudes.empty()) os << "amplitudes = " << fmt_list(s.field.amplitudes) << '\n';
  if (!s.field.phases.empty()) os << "phases = " << fmt_list(s.field.phases) << '\n';

  const auto& o = s.observation;
  os << "\n[observation]\nkind = " << observation_kind_name(o.kind) << '\n';
  if (!o.op.empty()) os << "operator = " << o.op << '\n';
  if (!std::isnan(o.time)) os << "time = " << fmt(o.time) << '\n';
  if (o.kind == ObservationKind::sequence) os << "count = " << o.count << '\n';
  if (o.kind == ObservationKind::continuous) {
    os << "optimize_window = " << (o.optimize_window ? "true" : "false")
       << "\ngamma_max = " << fmt(o.gamma_max) << "\ngamma = " << fmt(o.gamma)
       << "\nt1 = " << fmt(o.t1) << '\n';
    if (!std::isnan(o.t2)) os << "t2 = " << fmt(o.t2) << '\n';
  }

  os << "\n[cost]\nkind = " << cost_kind_name(s.cost.kind)
     << "\ntarget_percent = " << fmt(100.0 * s.cost.target) << "\nalpha = " << fmt(s.cost.alpha)
     << "\n\n";
  const auto& g = s.ga;
  os << "[ga]\npopulation = " << g.population << "\ngenerations = " << g.generations
     << "\ntournament = " << g.tournament << "\ncrossover_rate = " << fmt(g.crossover_rate)
     << "\nmutation_rate = " << fmt(g.mutation_rate)
     << "\nmutation_scale = " << fmt(g.mutation_scale) << "\nelitism = " << g.elitism
     << "\nrestarts = " << g.restarts << "\nseed = " << g.seed << "\nthreads = " << g.threads
     << "\n\n";
  os << "[propagation]\ndt = " << fmt(s.propagation.dt) << "\nsearch_dt = " << fmt(s.search_dt)
     << "\ntrajectory_every = " << s.trajectory_every << '\n';
  if (!s.output_dir.empty()) os << "\n[output]\ndir = " << s.output_dir.string() << '\n';
  return os.str();
}

std::string config_hash(const Scenario& s) {
  // Output location and worker count do not change results.
  Scenario canonical = s;
  canonical.output_dir.clear();
  canonical.ga.threads = 1;
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : serialize_scenario(canonical)) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

}  // namespace zeno
