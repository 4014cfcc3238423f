#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace seafarer {

/// One pool element: precomputed features plus the tags a search engine
/// would index it under.
struct Item {
  std::string id;
  std::vector<double> features;
  std::vector<std::string> tags;  // sorted, unique
  std::optional<std::string> url;

  bool has_tag(std::string_view tag) const;
  friend bool operator==(const Item&, const Item&) = default;
};

/// Immutable, validated item store with an inverted tag index.
///
/// Iteration order is the insertion (file) order. The tag vocabulary is the
/// lexicographically sorted key set of the tag index.
class Corpus {
 public:
  /// Validates and indexes `items`. When `declared_dim` is set every item must
  /// match it, otherwise the dimension is taken from the first item.
  /// Tag lists are sorted and de-duplicated.
  /// Throws ValidationError on an empty id, duplicate ids, a dimension
  /// mismatch, non-finite features, or fewer than two items.
  static Corpus from_items(std::vector<Item> items,
                           std::optional<std::size_t> declared_dim = {});

  std::size_t size() const noexcept { return items_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  std::span<const Item> items() const noexcept { return items_; }
  const Item& at(std::size_t index) const { return items_.at(index); }

  /// nullptr when the id is unknown.
  const Item* find(std::string_view id) const;
  std::optional<std::size_t> index_of(std::string_view id) const;

  /// Item indices (corpus order) carrying `tag`; empty for unknown tags.
  std::span<const std::size_t> postings(std::string_view tag) const;
  /// Item ids carrying `tag`, in corpus order.
  std::vector<std::string> posting_ids(std::string_view tag) const;
  const std::vector<std::string>& tag_vocab() const noexcept { return vocab_; }

  friend bool operator==(const Corpus& a, const Corpus& b) {
    return a.dim_ == b.dim_ && a.items_ == b.items_;
  }

 private:
  Corpus() = default;

  std::vector<Item> items_;
  std::size_t dim_ = 0;
  std::unordered_map<std::string, std::size_t> by_id_;
  std::map<std::string, std::vector<std::size_t>, std::less<>> tag_index_;
  std::vector<std::string> vocab_;
};

/// One corpus record: `{"id", "features", "tags", "url"?}`. Parse errors
/// report `line`.
Item item_from_json(const nlohmann::json& obj, std::size_t line = 0);
nlohmann::json item_to_json(const Item& item);

/// Reads a JSON Lines corpus. An optional first line `{"meta":{"d":N}}`
/// pins the feature dimension. Errors carry the offending line number.
Corpus load_corpus(const std::filesystem::path& path);
Corpus parse_corpus(std::string_view text);

/// Writes the corpus in the same JSON Lines format (with a meta header).
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);
std::string serialize_corpus(const Corpus& corpus);

enum class EmbeddingDefault { zero_vector, seeded_hash_gaussian };

std::string_view to_string(EmbeddingDefault policy) noexcept;
EmbeddingDefault embedding_default_from_string(std::string_view name);

/// Tag embedding table with a policy for out-of-vocabulary tags.
class TagEmbeddings {
 public:
  TagEmbeddings(std::size_t k, EmbeddingDefault policy);

  std::size_t dim() const noexcept { return k_; }
  EmbeddingDefault default_policy() const noexcept { return policy_; }
  std::size_t size() const noexcept { return table_.size(); }
  bool contains(std::string_view tag) const;

  /// Throws ValidationError on a wrong dimension or non-finite entries.
  void insert(std::string tag, std::vector<double> vector);

  /// Stored vector, or the policy default: zeros, or a unit-norm Gaussian
  /// vector seeded by the FNV-1a hash of the tag.
  std::vector<double> lookup(std::string_view tag) const;

  /// Stored entries sorted by tag.
  std::vector<std::pair<std::string, std::vector<double>>> entries() const;

 private:
  std::size_t k_;
  EmbeddingDefault policy_;
  std::unordered_map<std::string, std::vector<double>> table_;
};

/// Plain text, one `tag v1 ... vk` per line.
TagEmbeddings load_embeddings(const std::filesystem::path& path,
                              EmbeddingDefault policy = EmbeddingDefault::zero_vector);
TagEmbeddings parse_embeddings(std::string_view text,
                               EmbeddingDefault policy = EmbeddingDefault::zero_vector);
void save_embeddings(const TagEmbeddings& embeddings, const std::filesystem::path& path);

struct SynthParams {
  std::size_t n_items = 1000;
  std::size_t n_tags = 20;
  std::size_t d = 16;
  std::size_t k = 8;
  std::uint64_t seed = 0;
  double cluster_spread = 0.1;
};

/// Deterministic synthetic tagged corpus.
///
/// Each tag gets a standard Gaussian centre in feature space. Tag embeddings
/// are a fixed random projection of the centres (plus a little noise),
/// unit-normalised, so tags that sit close in feature space also sit close in
/// embedding space. Items take a primary tag and up to two more tags drawn
/// from the primary tag's nearest neighbours; features are the mean of the
/// item's tag centres plus `cluster_spread` Gaussian noise.
std::pair<Corpus, TagEmbeddings> synth_corpus(const SynthParams& params);

}  // namespace seafarer
