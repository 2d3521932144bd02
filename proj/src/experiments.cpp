#include <flsh/error.hpp>
#include <flsh/experiments.hpp>
#include <flsh/function_source.hpp>
#include <flsh/hash_families.hpp>
#include <flsh/mc_embed.hpp>
#include <flsh/ortho_embed.hpp>
#include <flsh/quadrature.hpp>
#include <flsh/rng.hpp>
#include <flsh/wasserstein.hpp>

#include <Eigen/Dense>

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>

namespace flsh {

Experiment parse_experiment(std::string_view s) {
  if (s == "cosine")
    return Experiment::Cosine;
  if (s == "l2")
    return Experiment::L2;
  if (s == "wasserstein")
    return Experiment::Wasserstein;
  if (s == "convergence")
    return Experiment::Convergence;
  throw ConfigError("unknown experiment '" + std::string(s) + "'");
}

Method parse_method(std::string_view s) {
  if (s == "chebyshev")
    return Method::Chebyshev;
  if (s == "mc")
    return Method::MonteCarlo;
  if (s == "sobol")
    return Method::Sobol;
  throw ConfigError("unknown method '" + std::string(s) + "'");
}

std::string_view to_string(Method m) noexcept {
  switch (m) {
  case Method::Chebyshev:
    return "chebyshev";
  case Method::MonteCarlo:
    return "mc";
  case Method::Sobol:
    return "sobol";
  }
  return "?";
}

void ExperimentConfig::validate() const {
  if (n_hashes == 0 || dim == 0 || pairs == 0 || seeds == 0)
    throw ConfigError("n_hashes, dim, pairs and seeds must be positive");
  if (!(r > 0.0) || !std::isfinite(r))
    throw ConfigError("r must be positive");
  if (!(clip > 0.0 && clip < 0.5))
    throw ConfigError("clip must lie in (0, 0.5)");
}

namespace {

// Tags keep the per-purpose random streams apart.
enum : std::uint64_t {
  kPairTag = 0x9A1,
  kHashTag = 0x4A54,
  kPlanTag = 0x97A4,
};

/// Embeds functions sharing one domain the same way for every pair.
class Embedder {
public:
  Embedder(const ExperimentConfig &cfg, const IntervalDomain &domain) {
    if (cfg.method == Method::Chebyshev) {
      ortho_ = OrthoEmbedConfig::fixed(cfg.dim, JacobianMode::LebesgueJacobian);
      return;
    }
    McEmbedConfig mc;
    mc.sample_count = cfg.dim;
    mc.p = 2.0;
    mc.sampler = cfg.method == Method::Sobol ? Sampler::Sobol : Sampler::IidUniform;
    mc.scramble = cfg.method == Method::Sobol;
    mc.seed = derive_seed(cfg.seed, kPlanTag);
    plan_.emplace(make_sample_plan(domain, mc));
  }

  Eigen::VectorXd operator()(const FunctionSource &f) const {
    if (ortho_)
      return embed_ortho(f, *ortho_).coefficients;
    return embed_mc(f, *plan_, 2.0);
  }

private:
  std::optional<OrthoEmbedConfig> ortho_;
  std::optional<SamplePlan> plan_;
};

double cosine(const Eigen::VectorXd &u, const Eigen::VectorXd &v) {
  return std::clamp(u.dot(v) / (u.norm() * v.norm()), -1.0, 1.0);
}

double l2_collision(double c, double r) {
  // Identical inputs always collide; the integral form needs c > 0.
  if (c < 1e-300)
    return 1.0;
  return collision_prob_pstable({2.0, r, 64}, c);
}

double observed_rate(const std::vector<bool> &a, const std::vector<bool> &b) {
  std::size_t same = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    same += a[i] == b[i];
  return static_cast<double>(same) / static_cast<double>(a.size());
}

template <typename Vec>
double observed_rate(const Vec &a, const Vec &b) {
  return static_cast<double>((a.array() == b.array()).count()) /
         static_cast<double>(a.size());
}

CollisionRecord make_record(std::size_t pair, double truth, double embedded,
                            double theoretical, double observed, std::size_t n) {
  return {pair,
          truth,
          embedded,
          theoretical,
          observed,
          std::sqrt(observed * (1.0 - observed) / static_cast<double>(n))};
}

FunctionPair sine_pair(const ExperimentConfig &cfg, std::size_t pair) {
  const CounterRng rng(derive_seed(cfg.seed, kPairTag), pair);
  const double d1 = 2.0 * std::numbers::pi * rng.uniform(0, 0);
  const double d2 = 2.0 * std::numbers::pi * rng.uniform(0, 1);
  return {FunctionSource::sine(1.0, 1.0, d1), FunctionSource::sine(1.0, 1.0, d2)};
}

} // namespace

std::vector<CollisionRecord> run_cosine_experiment(const ExperimentConfig &cfg,
                                                   const std::vector<FunctionPair> &pairs) {
  cfg.validate();
  const Embedder embed(cfg, IntervalDomain(0.0, 1.0));
  const SimHashBank bank(derive_seed(cfg.seed, kHashTag), 0, cfg.n_hashes);
  std::vector<CollisionRecord> out;
  out.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto &[f, g] = pairs[i];
    const double truth = cosine_similarity_oracle(f, g);
    const Eigen::VectorXd u = embed(f);
    const Eigen::VectorXd v = embed(g);
    const double observed = observed_rate(bank.hash(u), bank.hash(v));
    out.push_back(make_record(i, truth, cosine(u, v), collision_prob_simhash(truth),
                              observed, cfg.n_hashes));
  }
  return out;
}

std::vector<CollisionRecord> run_l2_experiment(const ExperimentConfig &cfg,
                                               const std::vector<FunctionPair> &pairs) {
  cfg.validate();
  const Embedder embed(cfg, IntervalDomain(0.0, 1.0));
  const PStableHashBank bank(2.0, cfg.r, derive_seed(cfg.seed, kHashTag), 0,
                             cfg.n_hashes);
  std::vector<CollisionRecord> out;
  out.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto &[f, g] = pairs[i];
    const double truth = distance_oracle(f, g, 2.0);
    const Eigen::VectorXd u = embed(f);
    const Eigen::VectorXd v = embed(g);
    const double observed = observed_rate(bank.hash(u), bank.hash(v));
    out.push_back(make_record(i, truth, (u - v).norm(), l2_collision(truth, cfg.r),
                              observed, cfg.n_hashes));
  }
  return out;
}

std::vector<CollisionRecord>
run_wasserstein_experiment(const ExperimentConfig &cfg,
                           const std::vector<DistributionPair> &pairs) {
  cfg.validate();
  const QuantileClip clip(cfg.clip);
  const Embedder embed(cfg, IntervalDomain(clip.lower(), clip.upper()));
  const PStableHashBank bank(2.0, cfg.r, derive_seed(cfg.seed, kHashTag), 0,
                             cfg.n_hashes);
  std::vector<CollisionRecord> out;
  out.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto &[d1, d2] = pairs[i];
    const double truth = wasserstein_gaussian_exact(d1, d2);
    const Eigen::VectorXd u = embed(FunctionSource::quantile(d1, clip));
    const Eigen::VectorXd v = embed(FunctionSource::quantile(d2, clip));
    const double observed = observed_rate(bank.hash(u), bank.hash(v));
    out.push_back(make_record(i, truth, (u - v).norm(), l2_collision(truth, cfg.r),
                              observed, cfg.n_hashes));
  }
  return out;
}

std::vector<CollisionRecord> run_cosine_experiment(const ExperimentConfig &cfg) {
  std::vector<FunctionPair> pairs;
  for (std::size_t i = 0; i < cfg.pairs; ++i)
    pairs.push_back(sine_pair(cfg, i));
  return run_cosine_experiment(cfg, pairs);
}

std::vector<CollisionRecord> run_l2_experiment(const ExperimentConfig &cfg) {
  std::vector<FunctionPair> pairs;
  for (std::size_t i = 0; i < cfg.pairs; ++i)
    pairs.push_back(sine_pair(cfg, i));
  return run_l2_experiment(cfg, pairs);
}

std::vector<CollisionRecord> run_wasserstein_experiment(const ExperimentConfig &cfg) {
  std::vector<DistributionPair> pairs;
  for (std::size_t i = 0; i < cfg.pairs; ++i) {
    const CounterRng rng(derive_seed(cfg.seed, kPairTag), i);
    auto draw = [&](std::uint32_t lane) {
      const double mean = -1.0 + 2.0 * rng.uniform(0, lane);
      const double variance = rng.uniform(0, lane + 1);
      return Distribution1D::gaussian(mean, std::sqrt(variance));
    };
    pairs.emplace_back(draw(0), draw(2));
  }
  return run_wasserstein_experiment(cfg, pairs);
}

std::vector<CollisionRecord> run_collision_experiment(const ExperimentConfig &cfg) {
  switch (cfg.experiment) {
  case Experiment::Cosine:
    return run_cosine_experiment(cfg);
  case Experiment::L2:
    return run_l2_experiment(cfg);
  case Experiment::Wasserstein:
    return run_wasserstein_experiment(cfg);
  case Experiment::Convergence:
    break;
  }
  throw ConfigError("convergence is not a collision experiment");
}

double loglog_slope(const std::vector<double> &n, const std::vector<double> &error) {
  if (n.size() != error.size() || n.size() < 2)
    throw ConfigError("slope fit needs at least two matching points");
  const auto rows = static_cast<Eigen::Index>(n.size());
  Eigen::MatrixXd design(rows, 2);
  Eigen::VectorXd rhs(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    design(i, 0) = 1.0;
    design(i, 1) = std::log(n[static_cast<std::size_t>(i)]);
    rhs[i] = std::log(error[static_cast<std::size_t>(i)]);
  }
  const Eigen::VectorXd beta = design.colPivHouseholderQr().solve(rhs);
  return beta[1];
}

ConvergenceStudy run_convergence_study(const ExperimentConfig &cfg) {
  cfg.validate();
  const IntervalDomain unit(0.0, 1.0);
  // Fixed smooth pairs with distinct frequencies and phases.
  const std::vector<std::pair<FunctionSource, FunctionSource>> pairs{
      {FunctionSource::sine(1.0, 1.0, 0.0), FunctionSource::sine(1.0, 1.0, 1.0)},
      {FunctionSource::sine(1.0, 1.0, 0.4), FunctionSource::sine(0.5, 2.0, 2.1)},
      {FunctionSource::sine(0.8, 3.0, 1.3), FunctionSource::sine(1.2, 1.0, 5.0)},
  };
  std::vector<double> oracle;
  for (const auto &[f, g] : pairs)
    oracle.push_back(distance_oracle(f, g, 2.0));

  ConvergenceStudy study;
  for (const Method method : {Method::MonteCarlo, Method::Sobol}) {
    std::vector<double> ns;
    std::vector<double> errs;
    for (std::size_t exp = 4; exp <= 12; ++exp) {
      const std::size_t n = std::size_t{1} << exp;
      double total = 0.0;
      for (std::size_t s = 0; s < cfg.seeds; ++s) {
        McEmbedConfig mc;
        mc.sample_count = n;
        mc.sampler = method == Method::Sobol ? Sampler::Sobol : Sampler::IidUniform;
        mc.scramble = true;
        mc.seed = derive_seed(derive_seed(cfg.seed, kPlanTag), s);
        const SamplePlan plan = make_sample_plan(unit, mc);
        for (std::size_t k = 0; k < pairs.size(); ++k) {
          const double est = (embed_mc(pairs[k].first, plan, 2.0) -
                              embed_mc(pairs[k].second, plan, 2.0))
                                 .norm();
          total += std::abs(est - oracle[k]);
        }
      }
      const double mean =
          total / static_cast<double>(cfg.seeds * pairs.size());
      study.rows.push_back({n, method, mean});
      ns.push_back(static_cast<double>(n));
      errs.push_back(mean);
    }
    (method == Method::MonteCarlo ? study.slope_mc : study.slope_sobol) =
        loglog_slope(ns, errs);
  }
  return study;
}

CollisionSummary summarize(const std::vector<CollisionRecord> &records,
                           const ExperimentConfig &cfg) {
  CollisionSummary s;
  if (records.empty())
    return s;
  const double n = static_cast<double>(cfg.n_hashes);
  auto prob = [&](double value) {
    return cfg.experiment == Experiment::Cosine ? collision_prob_simhash(value)
                                                : l2_collision(value, cfg.r);
  };
  std::size_t inside = 0;
  for (const auto &rec : records) {
    const double err = std::abs(rec.observed - rec.theoretical);
    s.mean_abs_error += err;
    s.max_abs_error = std::max(s.max_abs_error, err);
    // Binomial noise around the theoretical rate, floored at one count.
    const double p = rec.theoretical;
    const double sigma = std::sqrt(std::max(p * (1.0 - p), 1.0 / n) / n);
    const double allowance = std::abs(prob(rec.embedded) - p);
    if (err <= 5.0 * sigma + allowance)
      ++inside;
  }
  s.mean_abs_error /= static_cast<double>(records.size());
  s.within_five_sigma =
      static_cast<double>(inside) / static_cast<double>(records.size());
  return s;
}

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

} // namespace

void write_collision_csv(std::ostream &out, const std::vector<CollisionRecord> &records) {
  out << "pair_id,truth,embedded,theoretical,observed,std_error\n";
  for (const auto &r : records)
    out << r.pair_id << ',' << format_double(r.truth) << ','
        << format_double(r.embedded) << ',' << format_double(r.theoretical) << ','
        << format_double(r.observed) << ',' << format_double(r.std_error) << '\n';
}

void write_convergence_csv(std::ostream &out, const ConvergenceStudy &study) {
  out << "n,method,mean_abs_error\n";
  for (const auto &row : study.rows)
    out << row.n << ',' << to_string(row.method) << ','
        << format_double(row.mean_abs_error) << '\n';
  out << "# slope,mc," << format_double(study.slope_mc) << '\n';
  out << "# slope,sobol," << format_double(study.slope_sobol) << '\n';
}

std::vector<ScatterPoint> read_scatter_csv(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw IoError("cannot open '" + path.string() + "'");
  std::vector<ScatterPoint> points;
  std::string line;
  std::size_t line_no = 0;
  std::optional<std::size_t> col_theory;
  std::optional<std::size_t> col_observed;
  auto split = [](const std::string &s) {
    std::vector<std::string> fields;
    std::stringstream ss(s);
    std::string field;
    while (std::getline(ss, field, ','))
      fields.push_back(field);
    return fields;
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.empty() || line.front() == '#')
      continue;
    const auto fields = split(line);
    if (!col_theory) {
      for (std::size_t i = 0; i < fields.size(); ++i) {
        if (fields[i] == "theoretical")
          col_theory = i;
        if (fields[i] == "observed")
          col_observed = i;
      }
      if (!col_theory || !col_observed)
        throw ParseError("header needs 'theoretical' and 'observed' columns", line_no);
      continue;
    }
    if (fields.size() <= std::max(*col_theory, *col_observed))
      throw ParseError("row has too few columns", line_no);
    try {
      std::size_t used = 0;
      const double t = std::stod(fields[*col_theory], &used);
      const double o = std::stod(fields[*col_observed]);
      points.push_back({t, o});
    } catch (const std::exception &) {
      throw ParseError("non-numeric value", line_no);
    }
  }
  return points;
}

std::string render_svg_scatter(const std::vector<ScatterPoint> &points,
                               std::string_view title) {
  constexpr double size = 480.0;
  constexpr double margin = 50.0;
  constexpr double plot = size - 2.0 * margin;
  auto px = [&](double v) { return margin + plot * std::clamp(v, 0.0, 1.0); };
  auto py = [&](double v) { return size - margin - plot * std::clamp(v, 0.0, 1.0); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size
      << "\" height=\"" << size << "\" viewBox=\"0 0 " << size << ' ' << size
      << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!title.empty())
    svg << "<text x=\"" << size / 2 << "\" y=\"24\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n";
  // Axes
  svg << "<line class=\"axis\" x1=\"" << px(0) << "\" y1=\"" << py(0) << "\" x2=\""
      << px(1) << "\" y2=\"" << py(0) << "\" stroke=\"black\"/>\n";
  svg << "<line class=\"axis\" x1=\"" << px(0) << "\" y1=\"" << py(0) << "\" x2=\""
      << px(0) << "\" y2=\"" << py(1) << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double v = i / 4.0;
    svg << "<text x=\"" << px(v) << "\" y=\"" << py(0) + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << v << "</text>\n";
    svg << "<text x=\"" << px(0) - 8 << "\" y=\"" << py(v) + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << v << "</text>\n";
  }
  svg << "<text x=\"" << size / 2 << "\" y=\"" << size - 10
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
         "theoretical</text>\n";
  svg << "<text x=\"14\" y=\"" << size / 2 << "\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 14 "
      << size / 2 << ")\">observed</text>\n";
  // y = x
  svg << "<line class=\"diagonal\" x1=\"" << px(0) << "\" y1=\"" << py(0)
      << "\" x2=\"" << px(1) << "\" y2=\"" << py(1)
      << "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
  for (const auto &p : points)
    svg << "<circle class=\"point\" cx=\"" << format_double(px(p.theoretical))
        << "\" cy=\"" << format_double(py(p.observed))
        << "\" r=\"2.5\" fill=\"steelblue\" fill-opacity=\"0.7\"/>\n";
  svg << "</svg>\n";
  return svg.str();
}

void emit_svg_scatter(const std::filesystem::path &csv_path,
                      const std::filesystem::path &out_path) {
  const auto points = read_scatter_csv(csv_path);
  std::ofstream out(out_path);
  if (!out)
    throw IoError("cannot open '" + out_path.string() + "' for writing");
  out << render_svg_scatter(points, csv_path.stem().string());
  if (!out)
    throw IoError("write to '" + out_path.string() + "' failed");
}

} // namespace flsh
