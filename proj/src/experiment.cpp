#include "desparse/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include "desparse/baselines.hpp"
#include "desparse/cluster.hpp"
#include "desparse/io.hpp"
#include "desparse/parallel.hpp"
#include "desparse/rng.hpp"

namespace desparse {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;
using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double x = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return x;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + value + "'");
  }
}

long long parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long long x = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return x;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected an integer, got '" + value + "'");
  }
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_double(key, item));
  }
  return out;
}

// Reads "section.key" entries, recording which were defaulted and rejecting unknown keys.
class Reader {
 public:
  Reader(const pt::ptree& tree, std::vector<std::string>& defaulted) : tree_(tree), defaulted_(defaulted) {}

  std::optional<std::string> raw(const std::string& key) {
    known_.insert(key);
    if (auto v = tree_.get_optional<std::string>(pt::ptree::path_type(key, '.'))) return trim(*v);
    defaulted_.push_back(key);
    return std::nullopt;
  }

  double number(const std::string& key, double fallback) {
    auto v = raw(key);
    return v ? parse_double(key, *v) : fallback;
  }

  template <class Int>
  Int integer(const std::string& key, Int fallback) {
    auto v = raw(key);
    return v ? static_cast<Int>(parse_int(key, *v)) : fallback;
  }

  std::uint64_t seed(const std::string& key, std::uint64_t fallback) {
    auto v = raw(key);
    if (!v) return fallback;
    try {
      return std::stoull(*v);
    } catch (const std::exception&) {
      throw ConfigError(key + ": expected an unsigned integer");
    }
  }

  std::string text(const std::string& key, const std::string& fallback) {
    auto v = raw(key);
    return v ? *v : fallback;
  }

  std::optional<double> optional_number(const std::string& key) {
    auto v = raw(key);
    if (!v || *v == "auto") return std::nullopt;
    return parse_double(key, *v);
  }

  void reject_unknown() const {
    for (const auto& [section, body] : tree_) {
      if (body.empty()) throw ConfigError("entry '" + section + "' is outside any section");
      for (const auto& [key, value] : body) {
        if (!known_.contains(section + "." + key)) throw ConfigError("unknown key " + section + "." + key);
      }
    }
  }

 private:
  const pt::ptree& tree_;
  std::vector<std::string>& defaulted_;
  std::set<std::string> known_;
};

struct Entry {
  std::string section;
  std::string key;
  std::string value;
};

std::string fmt(double x) { return io::format_double(x); }

std::string fmt_optional(const std::optional<double>& x) { return x ? fmt(*x) : "auto"; }

std::vector<Entry> config_entries(const ExperimentConfig& c) {
  std::string deltas;
  for (std::size_t i = 0; i < c.delta_list.size(); ++i) {
    if (i > 0) deltas += ", ";
    deltas += fmt(c.delta_list[i]);
  }
  const auto& s = c.sim;
  return {
      {"experiment", "method", to_string(c.method)},
      {"experiment", "seed", std::to_string(c.seed)},
      {"experiment", "threads", std::to_string(c.threads)},
      {"experiment", "n_repetitions", std::to_string(c.n_repetitions)},
      {"experiment", "alpha", fmt(c.alpha)},
      {"experiment", "delta_list", deltas},
      {"sim", "geometry", s.geometry == GeometryKind::grid ? "grid" : "chain"},
      {"sim", "rows", std::to_string(s.rows)},
      {"sim", "cols", std::to_string(s.cols)},
      {"sim", "chain_length", std::to_string(s.chain_length)},
      {"sim", "spacing_mm", fmt(s.spacing_mm)},
      {"sim", "n_sensors", std::to_string(s.n_sensors)},
      {"sim", "gain_model", s.gain == GainModel::iid ? "iid" : "gaussian_kernel"},
      {"sim", "kernel_width_mm", fmt(s.kernel_width_mm)},
      {"sim", "jitter", fmt(s.jitter)},
      {"sim", "n_active_regions", std::to_string(s.n_active_regions)},
      {"sim", "region_radius_mm", fmt(s.region_radius_mm)},
      {"sim", "amplitude", fmt(s.amplitude)},
      {"sim", "rho", fmt(s.rho)},
      {"sim", "sigma", fmt(s.sigma)},
      {"sim", "T", std::to_string(s.T)},
      {"data", "X", c.data_X},
      {"data", "Y", c.data_Y},
      {"solver", "tol", fmt(c.dmtl.solver.tol)},
      {"solver", "max_iter", std::to_string(c.dmtl.solver.max_iter)},
      {"cv", "n_lambdas", std::to_string(c.dmtl.cv.n_lambdas)},
      {"cv", "lambda_min_ratio", fmt(c.dmtl.cv.lambda_min_ratio)},
      {"cv", "n_folds", std::to_string(c.dmtl.cv.n_folds)},
      {"cv", "lambda", fmt_optional(c.dmtl.lambda)},
      {"nodewise", "c", fmt(c.dmtl.nodewise.c)},
      {"nodewise", "tol", fmt(c.dmtl.nodewise.solver.tol)},
      {"nodewise", "max_iter", std::to_string(c.dmtl.nodewise.solver.max_iter)},
      {"cluster", "C", std::to_string(c.n_clusters)},
      {"ensemble", "B", std::to_string(c.ensemble.B)},
      {"ensemble", "subsample_fraction", fmt(c.ensemble.subsample_fraction)},
      {"ensemble", "gamma_min", fmt(c.ensemble.gamma_min)},
      {"baseline", "lambda", fmt_optional(c.baseline_lambda)},
      {"baseline", "sigma2", fmt_optional(c.baseline_sigma2)},
      {"baseline", "snr", fmt(c.baseline_snr)},
  };
}

json config_json(const ExperimentConfig& cfg) {
  json out = json::object();
  for (const auto& e : config_entries(cfg)) out[e.section][e.key] = e.value;
  return out;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void write_timing(const fs::path& out_dir, std::chrono::steady_clock::time_point start) {
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  io::write_file_atomic(out_dir / "timing.json", dump(json{{"wall_time_seconds", seconds}}));
}

json result_json(const InferenceResult& r) {
  const auto& d = r.diagnostics;
  json cv = json::array();
  for (const auto& pt : d.cv_path) cv.push_back({{"lambda", pt.lambda}, {"mean_error", pt.mean_error}});
  Index excluded = 0;
  for (bool e : r.excluded) excluded += e ? 1 : 0;
  json out{{"lambda", r.lambda},
           {"s_hat", r.s_hat},
           {"sigma2_hat", r.noise.sigma2()},
           {"rho_hat", r.noise.rho()},
           {"n_tests", r.n_tests},
           {"excluded_features", excluded},
           {"warnings", d.warnings},
           {"solver",
            {{"mtl_iterations", d.mtl_iterations},
             {"mtl_gap", d.mtl_gap},
             {"mtl_converged", d.mtl_converged},
             {"nodewise_unconverged", d.nodewise_unconverged},
             {"nodewise_max_iterations", d.nodewise_max_iterations}}},
           {"cv_path", cv}};
  if (!r.cluster_diameters.empty()) {
    double sum = 0.0, mx = 0.0;
    for (double x : r.cluster_diameters) {
      sum += x;
      mx = std::max(mx, x);
    }
    out["mean_cluster_diameter_mm"] = sum / static_cast<double>(r.cluster_diameters.size());
    out["max_cluster_diameter_mm"] = mx;
  }
  return out;
}

double mean_diameter(const MethodOutput& out) {
  if (!out.inference || out.inference->cluster_diameters.empty()) return 0.0;
  const auto& d = out.inference->cluster_diameters;
  double sum = 0.0;
  for (double x : d) sum += x;
  return sum / static_cast<double>(d.size());
}

std::string run_file_name(int r) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "run_%04d.bin", r);
  return buf;
}

}  // namespace

std::string to_string(Method m) {
  switch (m) {
    case Method::d_mtlasso: return "d-mtlasso";
    case Method::cd_mtlasso: return "cd-mtlasso";
    case Method::ecd_mtlasso: return "ecd-mtlasso";
    case Method::d_lasso: return "d-lasso";
    case Method::sloreta: return "sloreta";
    case Method::dspm: return "dspm";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::d_mtlasso, Method::cd_mtlasso, Method::ecd_mtlasso, Method::d_lasso, Method::sloreta,
                   Method::dspm}) {
    if (to_string(m) == name) return m;
  }
  throw ConfigError("unknown method '" + std::string(name) + "'");
}

ExperimentConfig parse_config(std::string_view text) {
  pt::ptree tree;
  std::istringstream in{std::string(text)};
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed configuration: ") + e.what());
  }
  ExperimentConfig c;
  Reader r(tree, c.defaulted);

  c.method = parse_method(r.text("experiment.method", to_string(c.method)));
  c.seed = r.seed("experiment.seed", c.seed);
  c.threads = r.integer("experiment.threads", c.threads);
  c.n_repetitions = r.integer("experiment.n_repetitions", c.n_repetitions);
  c.alpha = r.number("experiment.alpha", c.alpha);
  if (auto v = r.raw("experiment.delta_list")) c.delta_list = parse_list("experiment.delta_list", *v);

  auto& s = c.sim;
  const std::string geometry = r.text("sim.geometry", "grid");
  if (geometry == "grid") {
    s.geometry = GeometryKind::grid;
  } else if (geometry == "chain") {
    s.geometry = GeometryKind::chain;
  } else {
    throw ConfigError("sim.geometry must be grid or chain");
  }
  s.rows = r.integer("sim.rows", s.rows);
  s.cols = r.integer("sim.cols", s.cols);
  s.chain_length = r.integer("sim.chain_length", s.chain_length);
  s.spacing_mm = r.number("sim.spacing_mm", s.spacing_mm);
  s.n_sensors = r.integer("sim.n_sensors", s.n_sensors);
  const std::string gain = r.text("sim.gain_model", "gaussian_kernel");
  if (gain == "gaussian_kernel") {
    s.gain = GainModel::gaussian_kernel;
  } else if (gain == "iid") {
    s.gain = GainModel::iid;
  } else {
    throw ConfigError("sim.gain_model must be gaussian_kernel or iid");
  }
  s.kernel_width_mm = r.number("sim.kernel_width_mm", s.kernel_width_mm);
  s.jitter = r.number("sim.jitter", s.jitter);
  s.n_active_regions = r.integer("sim.n_active_regions", s.n_active_regions);
  s.region_radius_mm = r.number("sim.region_radius_mm", s.region_radius_mm);
  s.amplitude = r.number("sim.amplitude", s.amplitude);
  s.rho = r.number("sim.rho", s.rho);
  s.sigma = r.number("sim.sigma", s.sigma);
  s.T = r.integer("sim.T", s.T);

  c.data_X = r.text("data.X", "");
  c.data_Y = r.text("data.Y", "");

  c.dmtl.solver.tol = r.number("solver.tol", c.dmtl.solver.tol);
  c.dmtl.solver.max_iter = r.integer("solver.max_iter", c.dmtl.solver.max_iter);
  c.dmtl.cv.n_lambdas = r.integer("cv.n_lambdas", c.dmtl.cv.n_lambdas);
  c.dmtl.cv.lambda_min_ratio = r.number("cv.lambda_min_ratio", c.dmtl.cv.lambda_min_ratio);
  c.dmtl.cv.n_folds = r.integer("cv.n_folds", c.dmtl.cv.n_folds);
  c.dmtl.lambda = r.optional_number("cv.lambda");
  c.dmtl.nodewise.c = r.number("nodewise.c", c.dmtl.nodewise.c);
  c.dmtl.nodewise.solver.tol = r.number("nodewise.tol", c.dmtl.nodewise.solver.tol);
  c.dmtl.nodewise.solver.max_iter = r.integer("nodewise.max_iter", c.dmtl.nodewise.solver.max_iter);
  c.n_clusters = r.integer("cluster.C", c.n_clusters);
  c.ensemble.B = r.integer("ensemble.B", c.ensemble.B);
  c.ensemble.subsample_fraction = r.number("ensemble.subsample_fraction", c.ensemble.subsample_fraction);
  c.ensemble.gamma_min = r.number("ensemble.gamma_min", c.ensemble.gamma_min);
  c.baseline_lambda = r.optional_number("baseline.lambda");
  c.baseline_sigma2 = r.optional_number("baseline.sigma2");
  c.baseline_snr = r.number("baseline.snr", c.baseline_snr);
  r.reject_unknown();

  if (c.n_repetitions < 1) throw ConfigError("experiment.n_repetitions must be at least 1");
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw ConfigError("experiment.alpha must lie in (0, 1)");
  if (c.threads < 0) throw ConfigError("experiment.threads must be >= 0");
  for (double d : c.delta_list) {
    if (!(d >= 0.0)) throw ConfigError("experiment.delta_list entries must be >= 0");
  }
  if (c.method == Method::cd_mtlasso || c.method == Method::ecd_mtlasso) {
    if (c.n_clusters < 1) throw ConfigError("cluster.C must be at least 1");
  }
  return c;
}

ExperimentConfig load_config(const fs::path& path) {
  std::string text;
  try {
    text = io::read_file(path);
  } catch (const IoError& e) {
    throw ConfigError(std::string("cannot read configuration: ") + e.what());
  }
  return parse_config(text);
}

std::string render_config(const ExperimentConfig& cfg) {
  std::string out;
  std::string section;
  for (const auto& e : config_entries(cfg)) {
    if (e.section != section) {
      if (!section.empty()) out += "\n";
      section = e.section;
      out += "[" + section + "]\n";
    }
    out += e.value.empty() ? e.key + " =\n" : e.key + " = " + e.value + "\n";
  }
  return out;
}

ExperimentConfig repetition_config(const ExperimentConfig& cfg, int repetition) {
  ExperimentConfig out = cfg;
  const auto r = static_cast<std::uint64_t>(repetition);
  out.sim.seed = derive_seed(cfg.seed, 3 * r);
  out.dmtl.cv.seed = derive_seed(cfg.seed, 3 * r + 1);
  out.ensemble.seed = derive_seed(cfg.seed, 3 * r + 2);
  return out;
}

MethodOutput run_method(const ExperimentConfig& cfg, const DesignMatrix& X, const MultiResponse& Y,
                        const Geometry& G) {
  if (G.p() != X.p()) throw InvalidArgument("geometry and design disagree on p");
  MethodOutput out;
  if (cfg.method == Method::sloreta || cfg.method == Method::dspm) {
    const double lambda = cfg.baseline_lambda.value_or(default_baseline_lambda(X, cfg.baseline_snr));
    const double sigma2 = cfg.baseline_sigma2.value_or(cfg.sim.sigma * cfg.sim.sigma);
    const Matrix m = cfg.method == Method::sloreta ? sloreta(X, Y, lambda, sigma2) : dspm(X, Y, lambda, sigma2);
    out.row_norm = m.rowwise().norm();
    out.map = out.row_norm;
    out.pval = Vector::Constant(X.p(), kNaN);
    out.pval_corrected = out.pval;
    return out;
  }
  DMtlConfig dmtl = cfg.dmtl;
  dmtl.threads = cfg.threads;
  InferenceResult r;
  switch (cfg.method) {
    case Method::d_mtlasso: r = d_mtlasso(X, Y, dmtl); break;
    case Method::d_lasso: r = d_mtlasso(X, Y.task(0), dmtl); break;
    case Method::cd_mtlasso: r = cd_mtlasso(X, Y, G, cfg.n_clusters, dmtl); break;
    case Method::ecd_mtlasso: {
      EnsembleConfig e = cfg.ensemble;
      e.threads = cfg.threads;
      r = ecd_mtlasso(X, Y, G, cfg.n_clusters, e, dmtl);
      break;
    }
    default: break;
  }
  out.row_norm = r.beta_debiased.rowwise().norm();
  out.map = r.stat;
  out.pval = r.pval;
  out.pval_corrected = r.pval_corrected;
  out.inference = std::move(r);
  return out;
}

void run_infer(const ExperimentConfig& cfg, const fs::path& out_dir) {
  const auto start = std::chrono::steady_clock::now();
  fs::create_directories(out_dir);
  const ExperimentConfig rc = repetition_config(cfg, 0);
  const Geometry G = make_geometry(rc.sim);
  json files = json::array();

  std::optional<Simulation> sim;
  std::optional<DesignMatrix> X;
  std::optional<MultiResponse> Y;
  if (!cfg.data_X.empty() || !cfg.data_Y.empty()) {
    if (cfg.data_X.empty() || cfg.data_Y.empty()) throw ConfigError("data.X and data.Y must be given together");
    Matrix raw = io::read_matrix(cfg.data_X);
    X = DesignMatrix::if_standardized(raw);
    if (!X) X = DesignMatrix::standardize(raw);
    Y = MultiResponse(io::read_matrix(cfg.data_Y));
  } else {
    sim = simulate(rc.sim);
    io::write_matrix(out_dir / "X.bin", sim->X.data());
    io::write_matrix(out_dir / "Y.bin", sim->Y.data());
    io::write_matrix(out_dir / "B_true.bin", sim->B_true.data());
    files.insert(files.end(), {"X.bin", "Y.bin", "B_true.bin"});
  }
  const DesignMatrix& Xr = sim ? sim->X : *X;
  const MultiResponse& Yr = sim ? sim->Y : *Y;
  const MethodOutput out = run_method(rc, Xr, Yr, G);

  io::CsvWriter table({"index", "x_mm", "y_mm", "row_norm", "statistic", "pval", "pval_corrected"});
  const Matrix& pos = G.positions();
  for (Index j = 0; j < Xr.p(); ++j) {
    table.add_row({std::to_string(j), io::format_double(pos(j, 0)),
                   io::format_double(pos.cols() > 1 ? pos(j, 1) : 0.0), io::format_double(out.row_norm(j)),
                   io::format_double(out.map(j)), io::format_double(out.pval(j)),
                   io::format_double(out.pval_corrected(j))});
  }
  io::write_file_atomic(out_dir / "features.csv", table.str());
  io::write_file_atomic(out_dir / "resolved_config.ini", render_config(cfg));
  files.insert(files.end(), {"features.csv", "resolved_config.ini", "timing.json"});

  json manifest{{"command", "infer"},
                {"method", to_string(cfg.method)},
                {"seed", cfg.seed},
                {"derived_seeds", {{"sim", rc.sim.seed}, {"cv", rc.dmtl.cv.seed}, {"ensemble", rc.ensemble.seed}}},
                {"config", config_json(cfg)},
                {"defaults_applied", cfg.defaulted},
                {"n", Xr.n()},
                {"p", Xr.p()},
                {"T", Yr.T()},
                {"files", files}};
  if (out.inference) manifest["result"] = result_json(*out.inference);
  if (cfg.method == Method::sloreta || cfg.method == Method::dspm) {
    manifest["result"] = {{"lambda", cfg.baseline_lambda.value_or(default_baseline_lambda(Xr, cfg.baseline_snr))},
                          {"sigma2", cfg.baseline_sigma2.value_or(cfg.sim.sigma * cfg.sim.sigma)}};
  }
  io::write_file_atomic(out_dir / "manifest.json", dump(manifest));
  write_timing(out_dir, start);
}

RunRecord read_run_record(const fs::path& path) {
  const Matrix m = io::read_matrix(path);
  if (m.cols() != 5) throw IoError("run record must have five columns: " + path.string());
  RunRecord rec;
  rec.pval_corrected = m.col(0);
  rec.pval = m.col(4);
  rec.map = m.col(1);
  for (Index j = 0; j < m.rows(); ++j) {
    if (m(j, 2) != 0.0) rec.support.push_back(j);
  }
  rec.mean_cluster_diameter = m.rows() > 0 ? m(0, 3) : 0.0;
  return rec;
}

CampaignMetrics campaign_metrics(const std::vector<RunRecord>& runs, const Geometry& G,
                                 const std::vector<double>& delta_list, double alpha) {
  CampaignMetrics out;
  std::vector<Vector> pvals;
  std::vector<Vector> ranking;
  std::vector<std::vector<Index>> supports;
  bool has_pvalues = true;
  for (const auto& r : runs) {
    pvals.push_back(r.pval_corrected);
    ranking.push_back(r.pval);
    supports.push_back(r.support);
    has_pvalues = has_pvalues && !r.pval_corrected.hasNaN();
    out.ple.push_back(ple(r.map, r.support, G));
    out.sd.push_back(spatial_dispersion(r.map, r.support, G));
  }
  for (double delta : delta_list) {
    if (has_pvalues) {
      out.fwer.emplace_back(delta, delta_fwer(pvals, supports, delta, G, alpha));
      out.pr_curves.push_back(pooled_delta_precision_recall(ranking, supports, delta, G));
    } else {
      out.fwer.emplace_back(delta, kNaN);
      out.pr_curves.emplace_back();
    }
  }
  return out;
}

void run_campaign(const ExperimentConfig& cfg, const fs::path& out_dir) {
  const auto start = std::chrono::steady_clock::now();
  if (!cfg.data_X.empty() || !cfg.data_Y.empty()) throw ConfigError("campaigns always simulate; remove [data]");
  const fs::path runs_dir = out_dir / "runs";
  fs::create_directories(runs_dir);
  const Geometry G = make_geometry(cfg.sim);

  std::vector<char> reused(static_cast<std::size_t>(cfg.n_repetitions), 0);
  parallel_for(cfg.n_repetitions, cfg.threads, [&](Index r) {
    const fs::path path = runs_dir / run_file_name(static_cast<int>(r));
    if (fs::exists(path)) {
      reused[r] = 1;
      return;
    }
    ExperimentConfig rc = repetition_config(cfg, static_cast<int>(r));
    rc.threads = 1;
    const Simulation sim = simulate(rc.sim);
    const MethodOutput out = run_method(rc, sim.X, sim.Y, sim.G);
    Matrix record(sim.X.p(), 5);
    record.col(0) = out.pval_corrected;
    record.col(4) = out.pval;
    record.col(1) = out.map;
    record.col(3).setConstant(mean_diameter(out));
    record.col(2).setZero();
    for (Index j : sim.B_true.support()) record(j, 2) = 1.0;
    io::write_matrix(path, record);
  });

  std::vector<RunRecord> runs;
  for (int r = 0; r < cfg.n_repetitions; ++r) runs.push_back(read_run_record(runs_dir / run_file_name(r)));
  const CampaignMetrics metrics = campaign_metrics(runs, G, cfg.delta_list, cfg.alpha);

  io::CsvWriter fwer({"delta_mm", "fwer", "n_runs"});
  for (const auto& [delta, value] : metrics.fwer) {
    fwer.add_row({io::format_double(delta), io::format_double(value), std::to_string(runs.size())});
  }
  io::CsvWriter pr({"delta_mm", "threshold", "precision", "recall"});
  for (std::size_t d = 0; d < cfg.delta_list.size(); ++d) {
    for (const auto& point : metrics.pr_curves[d]) {
      pr.add_row({io::format_double(cfg.delta_list[d]), io::format_double(point.threshold),
                  io::format_double(point.precision), io::format_double(point.recall)});
    }
  }
  io::CsvWriter ple_sd({"run", "ple_mm", "sd_mm", "mean_cluster_diameter_mm"});
  double diameter_sum = 0.0;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    ple_sd.add_row({std::to_string(r), io::format_double(metrics.ple[r]), io::format_double(metrics.sd[r]),
                    io::format_double(runs[r].mean_cluster_diameter)});
    diameter_sum += runs[r].mean_cluster_diameter;
  }
  io::write_file_atomic(out_dir / "fwer.csv", fwer.str());
  io::write_file_atomic(out_dir / "pr_curve.csv", pr.str());
  io::write_file_atomic(out_dir / "ple_sd.csv", ple_sd.str());
  io::write_file_atomic(out_dir / "resolved_config.ini", render_config(cfg));

  json manifest{{"command", "campaign"},
                {"method", to_string(cfg.method)},
                {"seed", cfg.seed},
                {"config", config_json(cfg)},
                {"defaults_applied", cfg.defaulted},
                {"n_runs", runs.size()},
                {"mean_cluster_diameter_mm", diameter_sum / static_cast<double>(runs.size())},
                {"files",
                 {"fwer.csv", "pr_curve.csv", "ple_sd.csv", "resolved_config.ini", "timing.json", "runs/"}}};
  io::write_file_atomic(out_dir / "manifest.json", dump(manifest));
  Index reused_count = 0;
  for (char c : reused) reused_count += c;
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  io::write_file_atomic(out_dir / "timing.json",
                        dump(json{{"wall_time_seconds", seconds}, {"reused_runs", reused_count}}));
}

}  // namespace desparse
