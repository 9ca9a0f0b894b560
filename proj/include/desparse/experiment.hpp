#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "desparse/desparsify.hpp"
#include "desparse/ensemble.hpp"
#include "desparse/metrics.hpp"
#include "desparse/sim.hpp"

namespace desparse {

enum class Method { d_mtlasso, cd_mtlasso, ecd_mtlasso, d_lasso, sloreta, dspm };

std::string to_string(Method m);
Method parse_method(std::string_view name);

/// Fully resolved experiment description. `defaulted` lists the keys
/// ("section.key") that were absent from the parsed document.
struct ExperimentConfig {
  Method method = Method::d_mtlasso;
  SimConfig sim{};
  std::string data_X;  // optional DSPM1 paths replacing the simulated X / Y
  std::string data_Y;
  DMtlConfig dmtl{};
  Index n_clusters = 40;
  EnsembleConfig ensemble{.B = 25};
  std::optional<double> baseline_lambda;
  std::optional<double> baseline_sigma2;
  double baseline_snr = 3.0;
  int n_repetitions = 10;
  double alpha = 0.05;
  std::vector<double> delta_list{0.0, 10.0, 20.0, 40.0};
  std::uint64_t seed = 0;
  int threads = 1;
  std::vector<std::string> defaulted;
};

/// Parses the sectioned key = value format; unknown keys are errors.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Canonical text form with every key, suitable for parse_config.
std::string render_config(const ExperimentConfig& cfg);

/// Per-repetition view of a config: simulation, CV and ensemble seeds derived from cfg.seed.
ExperimentConfig repetition_config(const ExperimentConfig& cfg, int repetition);

/// Output of one method on one data set, at feature level.
struct MethodOutput {
  Vector row_norm;        // ||beta_j||_2 of the debiased (or ridge-normalized) rows
  Vector map;             // amplitude map used for PLE / SD
  Vector pval;            // NaN for baselines
  Vector pval_corrected;  // NaN for baselines
  std::optional<InferenceResult> inference;
};

MethodOutput run_method(const ExperimentConfig& cfg, const DesignMatrix& X, const MultiResponse& Y,
                        const Geometry& G);

/// Simulate (or load) one data set, run the method and write features.csv,
/// manifest.json, resolved_config.ini, timing.json and the data matrices.
void run_infer(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

/// Repeats simulate + infer, one atomic runs/run_NNNN.bin per repetition
/// (existing files are reused), then writes fwer.csv, pr_curve.csv,
/// ple_sd.csv, manifest.json, resolved_config.ini and timing.json.
void run_campaign(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

/// Stored repetition: columns are corrected p-value, map, support indicator,
/// mean cluster diameter (constant column, 0 for unclustered methods) and
/// uncorrected p-value.
struct RunRecord {
  Vector pval_corrected;
  Vector pval;
  Vector map;
  std::vector<Index> support;
  double mean_cluster_diameter = 0.0;
};

RunRecord read_run_record(const std::filesystem::path& path);

/// Campaign metrics recomputed from stored run records. FWER uses the
/// corrected p-values; precision-recall curves rank by the uncorrected ones.
struct CampaignMetrics {
  std::vector<std::pair<double, double>> fwer;  // (delta, FWER)
  std::vector<std::vector<PRPoint>> pr_curves;  // one per delta
  std::vector<double> ple;
  std::vector<double> sd;
};

CampaignMetrics campaign_metrics(const std::vector<RunRecord>& runs, const Geometry& G,
                                 const std::vector<double>& delta_list, double alpha);

}  // namespace desparse
