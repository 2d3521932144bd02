#pragma once

#include <flsh/domain.hpp>
#include <flsh/function_source.hpp>
#include <flsh/hash_families.hpp>
#include <flsh/mc_embed.hpp>
#include <flsh/ortho_embed.hpp>

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

namespace flsh {

enum class HashKind { SimHash, PStable };

struct HashFamilySpec {
  HashKind kind = HashKind::PStable;
  double p = 2.0;
  double r = 1.0;
};

/// Monte Carlo embedding over a fixed domain; the plan is derived from the
/// config so it can be rebuilt after loading.
struct McEmbeddingSpec {
  McEmbedConfig config;
  IntervalDomain domain;
};

using EmbeddingSpec = std::variant<OrthoEmbedConfig, McEmbeddingSpec>;

struct IndexConfig {
  /// L: number of tables (OR amplification).
  std::size_t tables = 16;
  /// K: hashes concatenated into one bucket key (AND amplification).
  std::size_t hashes_per_band = 4;
  HashFamilySpec family;
  EmbeddingSpec embedding = OrthoEmbedConfig::fixed(64);
  std::uint64_t master_seed = 0;

  /// Throws ConfigError.
  void validate() const;
};

struct BucketKey {
  std::uint32_t table = 0;
  /// K signed hashes, or K bits stored as 0/1 for SimHash.
  std::vector<std::int64_t> values;

  std::uint64_t fingerprint() const noexcept;
  friend bool operator==(const BucketKey &, const BucketKey &) = default;
};

struct QueryHit {
  std::string id;
  /// l^p distance, or 1 - cosine similarity for SimHash indexes.
  double distance;
};

enum class Rerank {
  /// Distance between stored embeddings.
  Embedded,
  /// Quadrature distance between the query and each candidate rebuilt from
  /// its descriptor (sine and gaussian items only).
  Oracle,
};

struct QueryResult {
  std::vector<QueryHit> hits;
  std::size_t candidate_count = 0;
  /// Fewer candidates than requested.
  bool short_list = false;
};

/**
 * Banded multi-table LSH index over embedded functions.
 *
 * Single writer, many readers: insert() needs exclusive access, query() is
 * const and may run concurrently.
 */
class LshIndex {
public:
  explicit LshIndex(IndexConfig cfg);

  /// Throws DuplicateIdError; embedding errors propagate and leave the index
  /// unchanged.
  void insert(const std::string &id, const FunctionSource &f);
  void insert_embedding(const std::string &id, Eigen::VectorXd embedding,
                        std::string descriptor = {});

  /// Top-k candidates. Throws EmptyIndexError; with Rerank::Oracle, KindError
  /// for a candidate whose descriptor cannot be rebuilt.
  QueryResult query(const FunctionSource &q, std::size_t k,
                    Rerank rerank = Rerank::Embedded) const;
  QueryResult query_embedding(const Eigen::VectorXd &q, std::size_t k) const;

  /// Ids colliding with q on a full key in at least one table, sorted.
  std::vector<std::string> candidates(const Eigen::VectorXd &q) const;

  Eigen::VectorXd embed(const FunctionSource &f) const;
  std::vector<BucketKey> bucket_keys(const Eigen::VectorXd &x) const;
  double distance(const Eigen::VectorXd &u, const Eigen::VectorXd &v) const;

  /// Members of the bucket a key addresses (empty if none).
  std::vector<std::string> bucket_members(const BucketKey &key) const;

  const IndexConfig &config() const noexcept { return cfg_; }
  std::size_t size() const noexcept { return items_.size(); }
  bool contains(const std::string &id) const { return by_id_.contains(id); }
  const Eigen::VectorXd &embedding_of(const std::string &id) const;
  const std::string &descriptor_of(const std::string &id) const;
  std::vector<std::string> ids() const;

  /// Sum over tables of bucket sizes; equals size() * tables.
  std::size_t bucket_membership_count() const;
  std::size_t bucket_count() const;

  /// Little-endian binary format, see docs/index_format.md.
  /// Throws IoError.
  void save(const std::filesystem::path &path) const;
  /// Throws IoError, FormatVersionError, ChecksumError.
  static LshIndex load(const std::filesystem::path &path);

  static constexpr std::uint32_t kFormatVersion = 1;

private:
  struct Item {
    std::string id;
    std::string descriptor;
    Eigen::VectorXd embedding;
  };
  struct Bucket {
    std::vector<std::int64_t> key;
    std::vector<std::uint32_t> members;
  };
  using Table = std::unordered_map<std::uint64_t, std::vector<Bucket>>;

  LshIndex(IndexConfig cfg, std::vector<PStableHashFunction> functions);

  std::vector<std::int64_t> raw_hashes(const Eigen::VectorXd &x) const;
  const Bucket *find_bucket(const BucketKey &key) const;

  IndexConfig cfg_;
  std::optional<SamplePlan> plan_;
  std::unique_ptr<PStableHashBank> pstable_;
  std::unique_ptr<SimHashBank> simhash_;
  std::vector<Item> items_;
  std::unordered_map<std::string, std::uint32_t> by_id_;
  std::vector<Table> tables_;
};

} // namespace flsh
