#include <flsh/dataset.hpp>
#include <flsh/error.hpp>
#include <flsh/lsh_index.hpp>
#include <flsh/quadrature.hpp>
#include <flsh/rng.hpp>

#include <boost/crc.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

namespace flsh {

namespace {

constexpr std::uint64_t kHashSeedTag = 1;

std::uint64_t hash_seed(const IndexConfig &cfg) {
  return derive_seed(cfg.master_seed, kHashSeedTag);
}

double embedding_p(const EmbeddingSpec &spec) {
  if (const auto *mc = std::get_if<McEmbeddingSpec>(&spec))
    return mc->config.p;
  return 2.0;
}

} // namespace

void IndexConfig::validate() const {
  if (tables == 0 || hashes_per_band == 0)
    throw ConfigError("tables and hashes_per_band must be positive");
  if (std::holds_alternative<OrthoEmbedConfig>(embedding))
    std::get<OrthoEmbedConfig>(embedding).validate();
  else
    std::get<McEmbeddingSpec>(embedding).config.validate();
  if (family.kind == HashKind::PStable) {
    if (!(family.p > 0.0 && family.p <= 2.0))
      throw ConfigError("p-stable family needs p in (0, 2]");
    if (!(family.r > 0.0))
      throw ConfigError("p-stable family needs r > 0");
    if (family.p != embedding_p(embedding))
      throw ConfigError("hash family p does not match the embedding's l^p space");
  }
}

std::uint64_t BucketKey::fingerprint() const noexcept {
  std::uint64_t h = mix64(0xF1A5ULL + table);
  for (const auto v : values)
    h = mix64(h ^ static_cast<std::uint64_t>(v));
  return h;
}

LshIndex::LshIndex(IndexConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  const std::size_t count = cfg_.tables * cfg_.hashes_per_band;
  if (cfg_.family.kind == HashKind::PStable)
    pstable_ = std::make_unique<PStableHashBank>(cfg_.family.p, cfg_.family.r,
                                                 hash_seed(cfg_), 0, count);
  else
    simhash_ = std::make_unique<SimHashBank>(hash_seed(cfg_), 0, count);
  if (const auto *mc = std::get_if<McEmbeddingSpec>(&cfg_.embedding))
    plan_ = make_sample_plan(mc->domain, mc->config);
  tables_.resize(cfg_.tables);
}

LshIndex::LshIndex(IndexConfig cfg, std::vector<PStableHashFunction> functions)
    : cfg_(std::move(cfg)) {
  cfg_.validate();
  if (functions.size() != cfg_.tables * cfg_.hashes_per_band)
    throw ChecksumError("hash function count does not match the table layout");
  if (cfg_.family.kind == HashKind::PStable)
    pstable_ = std::make_unique<PStableHashBank>(std::move(functions));
  else
    simhash_ = std::make_unique<SimHashBank>(hash_seed(cfg_), 0, functions.size());
  if (const auto *mc = std::get_if<McEmbeddingSpec>(&cfg_.embedding))
    plan_ = make_sample_plan(mc->domain, mc->config);
  tables_.resize(cfg_.tables);
}

Eigen::VectorXd LshIndex::embed(const FunctionSource &f) const {
  if (plan_) {
    if (!(f.domain().a() == plan_->domain().a() && f.domain().b() == plan_->domain().b()))
      throw DomainError("function domain differs from the index's sample plan");
    return embed_mc(f, *plan_, std::get<McEmbeddingSpec>(cfg_.embedding).config.p);
  }
  return embed_ortho(f, std::get<OrthoEmbedConfig>(cfg_.embedding)).coefficients;
}

std::vector<std::int64_t> LshIndex::raw_hashes(const Eigen::VectorXd &x) const {
  std::vector<std::int64_t> out;
  if (pstable_) {
    const auto h = pstable_->hash(x);
    out.assign(h.data(), h.data() + h.size());
  } else {
    const auto bits = simhash_->hash(x);
    out.assign(bits.begin(), bits.end());
  }
  return out;
}

std::vector<BucketKey> LshIndex::bucket_keys(const Eigen::VectorXd &x) const {
  const auto raw = raw_hashes(x);
  const std::size_t k = cfg_.hashes_per_band;
  std::vector<BucketKey> keys(cfg_.tables);
  for (std::size_t t = 0; t < cfg_.tables; ++t) {
    keys[t].table = static_cast<std::uint32_t>(t);
    const auto first = raw.begin() + static_cast<std::ptrdiff_t>(t * k);
    keys[t].values.assign(first, first + static_cast<std::ptrdiff_t>(k));
  }
  return keys;
}

double LshIndex::distance(const Eigen::VectorXd &u, const Eigen::VectorXd &v) const {
  const Eigen::Index n = std::max(u.size(), v.size());
  Eigen::VectorXd pu = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd pv = Eigen::VectorXd::Zero(n);
  pu.head(u.size()) = u;
  pv.head(v.size()) = v;
  if (cfg_.family.kind == HashKind::PStable)
    return lp_distance(pu, pv, cfg_.family.p);
  const double denom = pu.norm() * pv.norm();
  if (denom == 0.0)
    return 1.0;
  return 1.0 - pu.dot(pv) / denom;
}

const LshIndex::Bucket *LshIndex::find_bucket(const BucketKey &key) const {
  if (key.table >= tables_.size())
    return nullptr;
  const auto &table = tables_[key.table];
  const auto it = table.find(key.fingerprint());
  if (it == table.end())
    return nullptr;
  for (const auto &bucket : it->second)
    if (bucket.key == key.values)
      return &bucket;
  return nullptr;
}

void LshIndex::insert(const std::string &id, const FunctionSource &f) {
  if (contains(id))
    throw DuplicateIdError("id '" + id + "' already indexed");
  insert_embedding(id, embed(f), f.describe());
}

void LshIndex::insert_embedding(const std::string &id, Eigen::VectorXd embedding,
                                std::string descriptor) {
  if (contains(id))
    throw DuplicateIdError("id '" + id + "' already indexed");
  if (!embedding.allFinite())
    throw NonFiniteError("embedding of '" + id + "' is not finite");
  const auto keys = bucket_keys(embedding);
  const auto idx = static_cast<std::uint32_t>(items_.size());
  items_.push_back({id, std::move(descriptor), std::move(embedding)});
  by_id_.emplace(id, idx);
  for (auto &key : keys) {
    auto &chain = tables_[key.table][key.fingerprint()];
    auto it = std::find_if(chain.begin(), chain.end(),
                           [&](const Bucket &b) { return b.key == key.values; });
    if (it == chain.end()) {
      chain.push_back({key.values, {}});
      it = std::prev(chain.end());
    }
    it->members.push_back(idx);
  }
}

std::vector<std::string> LshIndex::bucket_members(const BucketKey &key) const {
  std::vector<std::string> out;
  if (const Bucket *b = find_bucket(key))
    for (const auto idx : b->members)
      out.push_back(items_[idx].id);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> LshIndex::candidates(const Eigen::VectorXd &q) const {
  std::vector<std::uint32_t> hits;
  for (const auto &key : bucket_keys(q))
    if (const Bucket *b = find_bucket(key))
      hits.insert(hits.end(), b->members.begin(), b->members.end());
  std::sort(hits.begin(), hits.end());
  hits.erase(std::unique(hits.begin(), hits.end()), hits.end());
  std::vector<std::string> out;
  out.reserve(hits.size());
  for (const auto idx : hits)
    out.push_back(items_[idx].id);
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

void rank(QueryResult &result, std::size_t k) {
  std::sort(result.hits.begin(), result.hits.end(),
            [](const QueryHit &a, const QueryHit &b) {
              return a.distance != b.distance ? a.distance < b.distance : a.id < b.id;
            });
  result.short_list = result.hits.size() < k;
  if (result.hits.size() > k)
    result.hits.resize(k);
}

FunctionSource rebuild(const std::string &id, const std::string &descriptor) {
  const auto kind = descriptor.substr(0, descriptor.find(','));
  if (kind != "sine" && kind != "gaussian")
    throw KindError("item '" + id + "' (" + kind + ") cannot be rebuilt for oracle ranking");
  std::istringstream in("x," + descriptor + "\n");
  return parse_dataset(in).front().source;
}

} // namespace

QueryResult LshIndex::query(const FunctionSource &q, std::size_t k, Rerank rerank) const {
  if (items_.empty())
    throw EmptyIndexError("query against an empty index");
  if (rerank == Rerank::Embedded)
    return query_embedding(embed(q), k);
  if (k == 0)
    throw ConfigError("k must be positive");

  const auto ids = candidates(embed(q));
  QueryResult result;
  result.candidate_count = ids.size();
  for (const auto &id : ids) {
    const auto g = rebuild(id, descriptor_of(id));
    const double d = cfg_.family.kind == HashKind::PStable
                         ? distance_oracle(q, g, cfg_.family.p)
                         : 1.0 - cosine_similarity_oracle(q, g);
    result.hits.push_back({id, d});
  }
  rank(result, k);
  return result;
}

QueryResult LshIndex::query_embedding(const Eigen::VectorXd &q, std::size_t k) const {
  if (items_.empty())
    throw EmptyIndexError("query against an empty index");
  if (k == 0)
    throw ConfigError("k must be positive");
  const auto ids = candidates(q);
  QueryResult result;
  result.candidate_count = ids.size();
  result.hits.reserve(ids.size());
  for (const auto &id : ids)
    result.hits.push_back({id, distance(q, embedding_of(id))});
  rank(result, k);
  return result;
}

const Eigen::VectorXd &LshIndex::embedding_of(const std::string &id) const {
  const auto it = by_id_.find(id);
  if (it == by_id_.end())
    throw ConfigError("unknown id '" + id + "'");
  return items_[it->second].embedding;
}

const std::string &LshIndex::descriptor_of(const std::string &id) const {
  const auto it = by_id_.find(id);
  if (it == by_id_.end())
    throw ConfigError("unknown id '" + id + "'");
  return items_[it->second].descriptor;
}

std::vector<std::string> LshIndex::ids() const {
  std::vector<std::string> out;
  out.reserve(items_.size());
  for (const auto &item : items_)
    out.push_back(item.id);
  return out;
}

std::size_t LshIndex::bucket_membership_count() const {
  std::size_t total = 0;
  for (const auto &table : tables_)
    for (const auto &[fp, chain] : table)
      for (const auto &bucket : chain)
        total += bucket.members.size();
  return total;
}

std::size_t LshIndex::bucket_count() const {
  std::size_t total = 0;
  for (const auto &table : tables_)
    for (const auto &[fp, chain] : table)
      total += chain.size();
  return total;
}

// Persistence

namespace {

constexpr char kMagic[4] = {'F', 'L', 'S', 'H'};

class Writer {
public:
  void bytes(const void *data, std::size_t n) {
    const auto *p = static_cast<const char *>(data);
    buf_.append(p, n);
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i)
      buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i)
      buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(const std::string &s) {
    u64(s.size());
    bytes(s.data(), s.size());
  }
  const std::string &buffer() const noexcept { return buf_; }

private:
  std::string buf_;
};

class Reader {
public:
  Reader(const std::string &buf, std::size_t end) : buf_(buf), end_(end) {}

  void need(std::size_t n) const {
    if (n > end_ - pos_)
      throw ChecksumError("index file is truncated");
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= std::uint32_t(static_cast<unsigned char>(buf_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
      v |= std::uint64_t(static_cast<unsigned char>(buf_[pos_ + i])) << (8 * i);
    pos_ += 8;
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    const std::uint64_t n = u64();
    need(n);
    std::string s = buf_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::size_t position() const noexcept { return pos_; }
  void seek(std::size_t pos) { pos_ = pos; }

private:
  const std::string &buf_;
  std::size_t end_;
  std::size_t pos_ = 0;
};

std::uint32_t crc32(const char *data, std::size_t n) {
  boost::crc_32_type crc;
  crc.process_bytes(data, n);
  return crc.checksum();
}

} // namespace

void LshIndex::save(const std::filesystem::path &path) const {
  Writer w;
  w.bytes(kMagic, 4);
  w.u32(kFormatVersion);

  w.u64(cfg_.tables);
  w.u64(cfg_.hashes_per_band);
  w.u64(cfg_.family.kind == HashKind::PStable ? 1 : 0);
  w.f64(cfg_.family.p);
  w.f64(cfg_.family.r);
  w.u64(cfg_.master_seed);
  if (const auto *ortho = std::get_if<OrthoEmbedConfig>(&cfg_.embedding)) {
    w.u64(0);
    w.u64(ortho->fixed_terms.value_or(0));
    w.u64(ortho->max_terms);
    w.f64(ortho->tail_tolerance);
    w.u64(ortho->jacobian_mode == JacobianMode::LebesgueJacobian ? 1 : 0);
    w.u64(ortho->sample_nodes.value_or(0));
  } else {
    const auto &mc = std::get<McEmbeddingSpec>(cfg_.embedding);
    w.u64(1);
    w.u64(mc.config.sample_count);
    w.f64(mc.config.p);
    w.u64(mc.config.sampler == Sampler::Sobol ? 1 : 0);
    w.u64(mc.config.seed);
    w.u64(mc.config.scramble ? 1 : 0);
    w.f64(mc.domain.a());
    w.f64(mc.domain.b());
    w.u64(mc.domain.measure() == Measure::ChebyshevWeight ? 1 : 0);
  }

  const std::size_t count = cfg_.tables * cfg_.hashes_per_band;
  w.u64(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (pstable_) {
      const auto &h = pstable_->functions()[i];
      w.u64(h.stream().seed());
      w.u64(h.stream().stream());
      w.f64(h.p());
      w.f64(h.r());
      w.f64(h.b());
    } else {
      const auto &h = simhash_->functions()[i];
      w.u64(h.stream().seed());
      w.u64(h.stream().stream());
      w.f64(2.0);
      w.f64(0.0);
      w.f64(0.0);
    }
  }

  w.u64(items_.size());
  for (const auto &item : items_) {
    w.str(item.id);
    w.str(item.descriptor);
    w.u64(static_cast<std::uint64_t>(item.embedding.size()));
    for (Eigen::Index i = 0; i < item.embedding.size(); ++i)
      w.f64(item.embedding[i]);
  }
  w.u32(crc32(w.buffer().data(), w.buffer().size()));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(w.buffer().data(), static_cast<std::streamsize>(w.buffer().size()));
  if (!out)
    throw IoError("write to '" + path.string() + "' failed");
}

LshIndex LshIndex::load(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError("cannot open '" + path.string() + "'");
  const std::string buf((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
  if (in.bad())
    throw IoError("read from '" + path.string() + "' failed");

  if (buf.size() < 12)
    throw ChecksumError("index file is truncated");
  if (std::memcmp(buf.data(), kMagic, 4) != 0)
    throw FormatVersionError("not an FLSH index file");
  Reader header(buf, buf.size());
  header.seek(4);
  const std::uint32_t version = header.u32();
  if (version != kFormatVersion)
    throw FormatVersionError("index format version " + std::to_string(version) +
                             " is not supported (this build reads version " +
                             std::to_string(kFormatVersion) + ")");

  const std::size_t body = buf.size() - 4;
  Reader crc_reader(buf, buf.size());
  crc_reader.seek(body);
  if (crc_reader.u32() != crc32(buf.data(), body))
    throw ChecksumError("index checksum mismatch");

  Reader r(buf, body);
  r.seek(8);
  IndexConfig cfg;
  cfg.tables = r.u64();
  cfg.hashes_per_band = r.u64();
  cfg.family.kind = r.u64() == 1 ? HashKind::PStable : HashKind::SimHash;
  cfg.family.p = r.f64();
  cfg.family.r = r.f64();
  cfg.master_seed = r.u64();
  if (r.u64() == 0) {
    OrthoEmbedConfig ortho;
    if (const auto fixed = r.u64())
      ortho.fixed_terms = fixed;
    ortho.max_terms = r.u64();
    ortho.tail_tolerance = r.f64();
    ortho.jacobian_mode =
        r.u64() == 1 ? JacobianMode::LebesgueJacobian : JacobianMode::ChebyshevWeighted;
    if (const auto nodes = r.u64())
      ortho.sample_nodes = nodes;
    cfg.embedding = ortho;
  } else {
    McEmbeddingSpec mc;
    mc.config.sample_count = r.u64();
    mc.config.p = r.f64();
    mc.config.sampler = r.u64() == 1 ? Sampler::Sobol : Sampler::IidUniform;
    mc.config.seed = r.u64();
    mc.config.scramble = r.u64() == 1;
    const double a = r.f64();
    const double b = r.f64();
    const Measure measure = r.u64() == 1 ? Measure::ChebyshevWeight : Measure::Lebesgue;
    mc.domain = IntervalDomain(a, b, measure);
    cfg.embedding = mc;
  }

  const std::uint64_t count = r.u64();
  if (count != cfg.tables * cfg.hashes_per_band)
    throw ChecksumError("hash function count does not match the table layout");
  std::vector<PStableHashFunction> functions;
  if (count > body / 40)
    throw ChecksumError("index file is truncated");
  functions.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::uint64_t seed = r.u64();
    const std::uint64_t stream = r.u64();
    const double p = r.f64();
    const double width = r.f64();
    const double offset = r.f64();
    if (cfg.family.kind == HashKind::PStable)
      functions.emplace_back(p, width, offset, seed, stream);
  }

  LshIndex index =
      cfg.family.kind == HashKind::PStable
          ? LshIndex(cfg, std::move(functions))
          : LshIndex(cfg);

  const std::uint64_t items = r.u64();
  for (std::uint64_t i = 0; i < items; ++i) {
    std::string id = r.str();
    std::string descriptor = r.str();
    const std::uint64_t n = r.u64();
    if (n > body / 8)
      throw ChecksumError("index file is truncated");
    r.need(n * 8);
    Eigen::VectorXd v(static_cast<Eigen::Index>(n));
    for (std::uint64_t j = 0; j < n; ++j)
      v[static_cast<Eigen::Index>(j)] = r.f64();
    index.insert_embedding(id, std::move(v), std::move(descriptor));
  }
  if (r.position() != body)
    throw ChecksumError("trailing bytes after the item table");
  return index;
}

} // namespace flsh
