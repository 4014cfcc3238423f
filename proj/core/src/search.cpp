#include "seafarer/search.hpp"

#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "seafarer/random.hpp"

namespace seafarer {

std::vector<Item> corpus_search(const Corpus& corpus, std::string_view tag, std::size_t limit,
                                std::uint64_t token) {
  auto postings = corpus.postings(tag);
  if (postings.empty() || limit == 0) return {};
  std::vector<std::size_t> order(postings.begin(), postings.end());
  const std::size_t take = std::min(limit, order.size());
  // Partial Fisher-Yates: the first `take` slots are a uniform sample.
  Rng rng(derive_seed(token, fnv1a64(tag)));
  for (std::size_t i = 0; i < take; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.uniform_index(order.size() - i));
    std::swap(order[i], order[j]);
  }
  std::vector<Item> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) out.push_back(corpus.at(order[i]));
  return out;
}

CorpusSearch::CorpusSearch(std::shared_ptr<const Corpus> corpus) : corpus_(std::move(corpus)) {
  if (!corpus_) throw ValidationError("CorpusSearch needs a corpus");
}

std::vector<Item> CorpusSearch::search(std::string_view tag, std::size_t limit,
                                       std::uint64_t token) {
  queries_.fetch_add(1, std::memory_order_relaxed);
  return corpus_search(*corpus_, tag, limit, token);
}

std::vector<std::string> CorpusSearch::vocabulary() { return corpus_->tag_vocab(); }

bool SearchBudgetMeter::try_acquire() noexcept {
  std::uint64_t current = used_.load();
  do {
    if (cap_ && current >= *cap_) return false;
  } while (!used_.compare_exchange_weak(current, current + 1));
  return true;
}

bool RemoteError::retryable() const noexcept {
  switch (kind_) {
    case Kind::timeout:
    case Kind::connection: return true;
    case Kind::http_status: return status_ >= 500 || status_ == 429;
    case Kind::malformed_response:
    case Kind::budget_exceeded: return false;
  }
  return false;
}

std::string_view to_string(RemoteError::Kind kind) noexcept {
  switch (kind) {
    case RemoteError::Kind::timeout: return "timeout";
    case RemoteError::Kind::connection: return "connection";
    case RemoteError::Kind::http_status: return "http_status";
    case RemoteError::Kind::malformed_response: return "malformed_response";
    case RemoteError::Kind::budget_exceeded: return "budget_exceeded";
  }
  return "unknown";
}

std::vector<Item> parse_search_response(std::string_view body) {
  using nlohmann::json;
  auto malformed = [](const std::string& why) {
    return RemoteError(RemoteError::Kind::malformed_response, "malformed search response: " + why);
  };
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::parse_error& e) {
    throw malformed(e.what());
  }
  if (!doc.is_object() || !doc.contains("items") || !doc["items"].is_array())
    throw malformed("expected {\"items\":[...]}");

  std::vector<Item> items;
  items.reserve(doc["items"].size());
  for (const auto& obj : doc["items"]) {
    if (!obj.is_object() || !obj.contains("id") || !obj["id"].is_string())
      throw malformed("item without string id");
    Item item;
    item.id = obj["id"].get<std::string>();
    if (item.id.empty()) throw malformed("item with empty id");
    if (auto f = obj.find("features"); f != obj.end()) {
      if (!f->is_array()) throw malformed("features of " + item.id + " is not an array");
      for (const auto& v : *f) {
        if (!v.is_number()) throw malformed("non-numeric feature in " + item.id);
        const double x = v.get<double>();
        if (!std::isfinite(x)) throw malformed("non-finite feature in " + item.id);
        item.features.push_back(x);
      }
    }
    if (auto t = obj.find("tags"); t != obj.end()) {
      if (!t->is_array()) throw malformed("tags of " + item.id + " is not an array");
      for (const auto& v : *t) {
        if (!v.is_string()) throw malformed("non-string tag in " + item.id);
        item.tags.push_back(v.get<std::string>());
      }
      std::sort(item.tags.begin(), item.tags.end());
      item.tags.erase(std::unique(item.tags.begin(), item.tags.end()), item.tags.end());
    }
    if (auto u = obj.find("url"); u != obj.end() && !u->is_null()) {
      if (!u->is_string()) throw malformed("url of " + item.id + " is not a string");
      item.url = u->get<std::string>();
    }
    items.push_back(std::move(item));
  }
  return items;
}

std::string search_response_body(const std::vector<Item>& items) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& item : items) {
    nlohmann::json obj = {{"id", item.id}, {"features", item.features}, {"tags", item.tags}};
    if (item.url) obj["url"] = *item.url;
    arr.push_back(std::move(obj));
  }
  return nlohmann::json{{"items", std::move(arr)}}.dump();
}

}  // namespace seafarer
