#include "seafarer/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "seafarer/error.hpp"
#include "seafarer/random.hpp"

namespace seafarer {

namespace {

using nlohmann::json;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed for " + path.string());
}

template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    fn(line, line_no);
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
}

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

}  // namespace

Item item_from_json(const json& obj, std::size_t line) {
  if (!obj.is_object()) throw ParseError("item record must be a JSON object", line);
  Item item;
  auto id = obj.find("id");
  if (id == obj.end() || !id->is_string()) throw ParseError("missing string field \"id\"", line);
  item.id = id->get<std::string>();

  auto feats = obj.find("features");
  if (feats == obj.end() || !feats->is_array())
    throw ParseError("missing array field \"features\" for id " + item.id, line);
  item.features.reserve(feats->size());
  for (const auto& v : *feats) {
    if (!v.is_number()) throw ParseError("non-numeric feature for id " + item.id, line);
    item.features.push_back(v.get<double>());
  }

  if (auto tags = obj.find("tags"); tags != obj.end()) {
    if (!tags->is_array()) throw ParseError("\"tags\" must be an array for id " + item.id, line);
    for (const auto& t : *tags) {
      if (!t.is_string()) throw ParseError("non-string tag for id " + item.id, line);
      item.tags.push_back(t.get<std::string>());
    }
  }
  if (auto url = obj.find("url"); url != obj.end() && !url->is_null()) {
    if (!url->is_string()) throw ParseError("\"url\" must be a string for id " + item.id, line);
    item.url = url->get<std::string>();
  }
  return item;
}

json item_to_json(const Item& item) {
  json obj = {{"id", item.id}, {"features", item.features}, {"tags", item.tags}};
  if (item.url) obj["url"] = *item.url;
  return obj;
}

bool Item::has_tag(std::string_view tag) const {
  return std::find(tags.begin(), tags.end(), tag) != tags.end();
}

Corpus Corpus::from_items(std::vector<Item> items, std::optional<std::size_t> declared_dim) {
  if (items.size() < 2) {
    throw ValidationError("a corpus needs at least 2 items, got " + std::to_string(items.size()));
  }
  Corpus c;
  c.dim_ = declared_dim.value_or(items.front().features.size());
  if (c.dim_ == 0) throw ValidationError("feature dimension must be positive");

  c.by_id_.reserve(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    Item& item = items[i];
    if (item.id.empty()) throw ValidationError("item at position " + std::to_string(i) + " has an empty id");
    if (item.features.size() != c.dim_) {
      throw ValidationError("dimension mismatch for id " + item.id + ": expected " +
                            std::to_string(c.dim_) + ", got " +
                            std::to_string(item.features.size()));
    }
    for (double v : item.features) {
      if (!std::isfinite(v)) throw ValidationError("non-finite feature for id " + item.id);
    }
    if (!c.by_id_.emplace(item.id, i).second) {
      throw ValidationError("duplicate id " + item.id);
    }
    std::sort(item.tags.begin(), item.tags.end());
    item.tags.erase(std::unique(item.tags.begin(), item.tags.end()), item.tags.end());
    for (const auto& tag : item.tags) c.tag_index_[tag].push_back(i);
  }
  c.items_ = std::move(items);
  c.vocab_.reserve(c.tag_index_.size());
  for (const auto& [tag, _] : c.tag_index_) c.vocab_.push_back(tag);
  return c;
}

const Item* Corpus::find(std::string_view id) const {
  auto it = by_id_.find(std::string(id));
  return it == by_id_.end() ? nullptr : &items_[it->second];
}

std::optional<std::size_t> Corpus::index_of(std::string_view id) const {
  auto it = by_id_.find(std::string(id));
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

std::span<const std::size_t> Corpus::postings(std::string_view tag) const {
  auto it = tag_index_.find(tag);
  if (it == tag_index_.end()) return {};
  return it->second;
}

std::vector<std::string> Corpus::posting_ids(std::string_view tag) const {
  std::vector<std::string> ids;
  for (std::size_t i : postings(tag)) ids.push_back(items_[i].id);
  return ids;
}

Corpus parse_corpus(std::string_view text) {
  std::vector<Item> items;
  std::optional<std::size_t> declared_dim;
  std::unordered_map<std::string, std::size_t> seen;
  bool first_record = true;

  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    if (is_blank(line)) return;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what(), line_no);
    }
    if (first_record && obj.is_object() && obj.contains("meta")) {
      first_record = false;
      const auto& meta = obj["meta"];
      if (!meta.is_object() || !meta.contains("d") || !meta["d"].is_number_integer() ||
          meta["d"].get<long long>() <= 0) {
        throw ParseError("meta header must be {\"meta\":{\"d\":<positive int>}}", line_no);
      }
      declared_dim = meta["d"].get<std::size_t>();
      return;
    }
    first_record = false;
    Item item = item_from_json(obj, line_no);
    const std::size_t expected = declared_dim.value_or(items.empty() ? item.features.size()
                                                                     : items.front().features.size());
    if (item.features.size() != expected) {
      throw ValidationError("dimension mismatch for id " + item.id + ": expected " +
                            std::to_string(expected) + ", got " +
                            std::to_string(item.features.size()) + " (line " +
                            std::to_string(line_no) + ")");
    }
    if (!seen.emplace(item.id, line_no).second) {
      throw ValidationError("duplicate id " + item.id + " (line " + std::to_string(line_no) + ")");
    }
    items.push_back(std::move(item));
  });
  return Corpus::from_items(std::move(items), declared_dim);
}

Corpus load_corpus(const std::filesystem::path& path) { return parse_corpus(read_file(path)); }

std::string serialize_corpus(const Corpus& corpus) {
  std::string out = json{{"meta", {{"d", corpus.dim()}}}}.dump();
  out.push_back('\n');
  for (const auto& item : corpus.items()) {
    out += item_to_json(item).dump();
    out.push_back('\n');
  }
  return out;
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  write_file(path, serialize_corpus(corpus));
}

// ---------------------------------------------------------------------------

std::string_view to_string(EmbeddingDefault policy) noexcept {
  switch (policy) {
    case EmbeddingDefault::zero_vector: return "zero_vector";
    case EmbeddingDefault::seeded_hash_gaussian: return "seeded_hash_gaussian";
  }
  return "zero_vector";
}

EmbeddingDefault embedding_default_from_string(std::string_view name) {
  if (name == "zero_vector") return EmbeddingDefault::zero_vector;
  if (name == "seeded_hash_gaussian") return EmbeddingDefault::seeded_hash_gaussian;
  throw ValidationError("unknown embedding default policy: " + std::string(name));
}

TagEmbeddings::TagEmbeddings(std::size_t k, EmbeddingDefault policy) : k_(k), policy_(policy) {
  if (k == 0) throw ValidationError("embedding dimension must be positive");
}

bool TagEmbeddings::contains(std::string_view tag) const {
  return table_.find(std::string(tag)) != table_.end();
}

void TagEmbeddings::insert(std::string tag, std::vector<double> vector) {
  if (vector.size() != k_) {
    throw ValidationError("embedding for " + tag + " has dimension " +
                          std::to_string(vector.size()) + ", expected " + std::to_string(k_));
  }
  for (double v : vector) {
    if (!std::isfinite(v)) throw ValidationError("non-finite embedding entry for " + tag);
  }
  table_[std::move(tag)] = std::move(vector);
}

std::vector<double> TagEmbeddings::lookup(std::string_view tag) const {
  if (auto it = table_.find(std::string(tag)); it != table_.end()) return it->second;
  std::vector<double> v(k_, 0.0);
  if (policy_ == EmbeddingDefault::seeded_hash_gaussian) {
    Rng rng(fnv1a64(tag));
    double norm2 = 0.0;
    for (auto& x : v) {
      x = rng.normal();
      norm2 += x * x;
    }
    const double norm = std::sqrt(norm2);
    if (norm > 0.0) {
      for (auto& x : v) x /= norm;
    }
  }
  return v;
}

std::vector<std::pair<std::string, std::vector<double>>> TagEmbeddings::entries() const {
  std::vector<std::pair<std::string, std::vector<double>>> out(table_.begin(), table_.end());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

TagEmbeddings parse_embeddings(std::string_view text, EmbeddingDefault policy) {
  std::vector<std::pair<std::string, std::vector<double>>> rows;
  std::optional<std::size_t> k;
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    if (is_blank(line)) return;
    std::vector<std::string_view> tokens;
    std::size_t pos = 0;
    while (pos < line.size()) {
      while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
      if (pos >= line.size()) break;
      std::size_t end = pos;
      while (end < line.size() && line[end] != ' ' && line[end] != '\t') ++end;
      tokens.push_back(line.substr(pos, end - pos));
      pos = end;
    }
    if (tokens.size() < 2) throw ParseError("expected \"tag v1 ... vk\"", line_no);
    std::vector<double> values;
    values.reserve(tokens.size() - 1);
    for (std::size_t i = 1; i < tokens.size(); ++i) {
      double v = 0.0;
      const auto tok = tokens[i];
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
        throw ParseError("non-numeric token \"" + std::string(tok) + "\"", line_no);
      }
      values.push_back(v);
    }
    if (!k) k = values.size();
    if (values.size() != *k) {
      throw ParseError("inconsistent embedding dimension: expected " + std::to_string(*k) +
                           ", got " + std::to_string(values.size()),
                       line_no);
    }
    rows.emplace_back(std::string(tokens[0]), std::move(values));
  });
  if (!k) throw ParseError("embeddings file is empty");
  TagEmbeddings emb(*k, policy);
  for (auto& [tag, vec] : rows) emb.insert(std::move(tag), std::move(vec));
  return emb;
}

TagEmbeddings load_embeddings(const std::filesystem::path& path, EmbeddingDefault policy) {
  return parse_embeddings(read_file(path), policy);
}

void save_embeddings(const TagEmbeddings& embeddings, const std::filesystem::path& path) {
  std::string out;
  char buf[64];
  for (const auto& [tag, vec] : embeddings.entries()) {
    out += tag;
    for (double v : vec) {
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
      out.push_back(' ');
      out.append(buf, ptr);
    }
    out.push_back('\n');
  }
  write_file(path, out);
}

// ---------------------------------------------------------------------------

std::pair<Corpus, TagEmbeddings> synth_corpus(const SynthParams& p) {
  if (p.n_items < 2) throw ValidationError("synth_corpus: n_items must be >= 2");
  if (p.n_tags < 1) throw ValidationError("synth_corpus: n_tags must be >= 1");
  if (p.d < 2) throw ValidationError("synth_corpus: d must be >= 2");
  if (p.k < 1) throw ValidationError("synth_corpus: k must be >= 1");
  if (!(p.cluster_spread >= 0.0) || !std::isfinite(p.cluster_spread))
    throw ValidationError("synth_corpus: cluster_spread must be finite and >= 0");

  Rng rng(derive_seed(p.seed, 0x5eafULL));
  const std::size_t width = std::max<std::size_t>(3, std::to_string(p.n_tags - 1).size());
  const std::size_t id_width = std::max<std::size_t>(5, std::to_string(p.n_items - 1).size());
  auto pad = [](std::size_t v, std::size_t w) {
    std::string s = std::to_string(v);
    return std::string(w > s.size() ? w - s.size() : 0, '0') + s;
  };

  std::vector<std::string> tag_names(p.n_tags);
  for (std::size_t t = 0; t < p.n_tags; ++t) tag_names[t] = "tag" + pad(t, width);

  std::vector<std::vector<double>> centers(p.n_tags, std::vector<double>(p.d));
  for (auto& c : centers)
    for (auto& x : c) x = rng.normal();

  std::vector<std::vector<double>> projection(p.k, std::vector<double>(p.d));
  const double proj_scale = 1.0 / std::sqrt(static_cast<double>(p.d));
  for (auto& row : projection)
    for (auto& x : row) x = rng.normal() * proj_scale;

  TagEmbeddings embeddings(p.k, EmbeddingDefault::zero_vector);
  for (std::size_t t = 0; t < p.n_tags; ++t) {
    std::vector<double> z(p.k);
    double norm2 = 0.0;
    for (std::size_t r = 0; r < p.k; ++r) {
      double acc = 0.0;
      for (std::size_t j = 0; j < p.d; ++j) acc += projection[r][j] * centers[t][j];
      z[r] = acc + 0.1 * rng.normal();
      norm2 += z[r] * z[r];
    }
    const double norm = std::sqrt(norm2);
    if (norm > 0.0)
      for (auto& x : z) x /= norm;
    embeddings.insert(tag_names[t], std::move(z));
  }

  // Nearest neighbours in centre space drive tag co-occurrence.
  constexpr std::size_t kNeighbours = 5;
  const std::size_t n_nb = std::min(kNeighbours, p.n_tags - 1);
  std::vector<std::vector<std::size_t>> neighbours(p.n_tags);
  for (std::size_t t = 0; t < p.n_tags; ++t) {
    std::vector<std::pair<double, std::size_t>> dist;
    for (std::size_t u = 0; u < p.n_tags; ++u) {
      if (u == t) continue;
      double acc = 0.0;
      for (std::size_t j = 0; j < p.d; ++j) {
        const double diff = centers[t][j] - centers[u][j];
        acc += diff * diff;
      }
      dist.emplace_back(acc, u);
    }
    std::sort(dist.begin(), dist.end());
    for (std::size_t i = 0; i < n_nb; ++i) neighbours[t].push_back(dist[i].second);
  }

  std::vector<Item> items;
  items.reserve(p.n_items);
  for (std::size_t i = 0; i < p.n_items; ++i) {
    const std::size_t primary = i < p.n_tags ? i : static_cast<std::size_t>(rng.uniform_index(p.n_tags));
    const std::size_t want = 1 + std::min<std::size_t>(rng.uniform_index(3), n_nb);
    std::vector<std::size_t> chosen{primary};
    while (chosen.size() < want) {
      const std::size_t cand = neighbours[primary][rng.uniform_index(n_nb)];
      if (std::find(chosen.begin(), chosen.end(), cand) == chosen.end()) chosen.push_back(cand);
    }
    Item item;
    item.id = "item" + pad(i, id_width);
    item.features.assign(p.d, 0.0);
    for (std::size_t t : chosen) {
      for (std::size_t j = 0; j < p.d; ++j) item.features[j] += centers[t][j];
      item.tags.push_back(tag_names[t]);
    }
    const double inv = 1.0 / static_cast<double>(chosen.size());
    for (auto& x : item.features) x = x * inv + p.cluster_spread * rng.normal();
    items.push_back(std::move(item));
  }
  return {Corpus::from_items(std::move(items), p.d), std::move(embeddings)};
}

}  // namespace seafarer
