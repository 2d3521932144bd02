#pragma once

#include <flsh/distribution.hpp>
#include <flsh/function_source.hpp>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace flsh {

enum class Experiment { Cosine, L2, Wasserstein, Convergence };
enum class Method { Chebyshev, MonteCarlo, Sobol };

Experiment parse_experiment(std::string_view s);
Method parse_method(std::string_view s);
std::string_view to_string(Method m) noexcept;

struct ExperimentConfig {
  Experiment experiment = Experiment::Cosine;
  std::size_t n_hashes = 1024;
  /// Embedding dimension: retained terms or sample count.
  std::size_t dim = 64;
  std::size_t pairs = 200;
  Method method = Method::Chebyshev;
  double r = 1.0;
  double clip = 1e-3;
  std::uint64_t seed = 0;
  /// Convergence study only: independent plans per sample size.
  std::size_t seeds = 100;

  /// Throws ConfigError.
  void validate() const;
};

struct CollisionRecord {
  std::size_t pair_id = 0;
  /// Oracle similarity (cosine) or distance (L2, W2).
  double truth = 0.0;
  /// Same quantity measured on the embedded vectors.
  double embedded = 0.0;
  double theoretical = 0.0;
  double observed = 0.0;
  /// sqrt(observed (1 - observed) / n_hashes).
  double std_error = 0.0;
};

/// Random sine pairs sin(2 pi x + d1), sin(2 pi x + d2), d ~ U[0, 2 pi),
/// SimHash on the embeddings.
std::vector<CollisionRecord> run_cosine_experiment(const ExperimentConfig &cfg);

/// Same pairs, p-stable hash with p = 2 and width cfg.r.
std::vector<CollisionRecord> run_l2_experiment(const ExperimentConfig &cfg);

/// Gaussian pairs, mean ~ U[-1, 1], variance ~ U[0, 1]; inverse CDFs clipped
/// to [clip, 1 - clip] and hashed with the p = 2 hash.
std::vector<CollisionRecord> run_wasserstein_experiment(const ExperimentConfig &cfg);

using FunctionPair = std::pair<FunctionSource, FunctionSource>;
using DistributionPair = std::pair<Distribution1D, Distribution1D>;

/// The same experiments on caller-supplied pairs (cfg.pairs is ignored).
/// Functions must live on [0, 1].
std::vector<CollisionRecord> run_cosine_experiment(const ExperimentConfig &cfg,
                                                   const std::vector<FunctionPair> &pairs);
std::vector<CollisionRecord> run_l2_experiment(const ExperimentConfig &cfg,
                                               const std::vector<FunctionPair> &pairs);
std::vector<CollisionRecord>
run_wasserstein_experiment(const ExperimentConfig &cfg,
                           const std::vector<DistributionPair> &pairs);

/// Collision records for one configured experiment (not Convergence).
std::vector<CollisionRecord> run_collision_experiment(const ExperimentConfig &cfg);

struct ConvergenceRow {
  std::size_t n = 0;
  Method method = Method::MonteCarlo;
  double mean_abs_error = 0.0;
};

struct ConvergenceStudy {
  std::vector<ConvergenceRow> rows;
  double slope_mc = 0.0;
  double slope_sobol = 0.0;
};

/// Mean |embedded L2 distance - oracle| over fixed sine pairs and cfg.seeds
/// plans for N = 2^4 .. 2^12, i.i.d. and scrambled Sobol.
ConvergenceStudy run_convergence_study(const ExperimentConfig &cfg);

/// Least-squares slope of log(error) against log(n).
double loglog_slope(const std::vector<double> &n, const std::vector<double> &error);

struct CollisionSummary {
  double mean_abs_error = 0.0;
  double max_abs_error = 0.0;
  /// Fraction of records whose observed rate lies within five standard
  /// errors (plus the embedding allowance) of the theoretical rate.
  double within_five_sigma = 0.0;
};

/// The allowance is |P(embedded) - P(truth)| under the experiment's family.
CollisionSummary summarize(const std::vector<CollisionRecord> &records,
                           const ExperimentConfig &cfg);

// CSV / SVG output

void write_collision_csv(std::ostream &out, const std::vector<CollisionRecord> &records);
void write_convergence_csv(std::ostream &out, const ConvergenceStudy &study);

struct ScatterPoint {
  double theoretical;
  double observed;
};

/// Reads the theoretical and observed columns (by header name).
/// Throws ParseError or IoError.
std::vector<ScatterPoint> read_scatter_csv(const std::filesystem::path &path);

/// Standalone SVG: theoretical on x, observed on y, both over [0, 1], with the
/// y = x reference line.
std::string render_svg_scatter(const std::vector<ScatterPoint> &points,
                               std::string_view title = {});

/// Throws ParseError or IoError.
void emit_svg_scatter(const std::filesystem::path &csv_path,
                      const std::filesystem::path &out_path);

} // namespace flsh
