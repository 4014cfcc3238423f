#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "seafarer/corpus.hpp"
#include "seafarer/error.hpp"

namespace seafarer {

/// A tag-search backend: the only way the retrieval strategies see the pool.
///
/// Implementations must tolerate concurrent `search` calls.
class SearchSource {
 public:
  virtual ~SearchSource() = default;

  /// At most `limit` items tagged `tag`. Unknown tags yield an empty list.
  virtual std::vector<Item> search(std::string_view tag, std::size_t limit,
                                   std::uint64_t token) = 0;

  /// Searchable tags, sorted lexicographically.
  virtual std::vector<std::string> vocabulary() = 0;
};

/// Seeded sample without replacement of `min(limit, |postings|)` items from
/// the posting list of `tag`. Same (tag, limit, token) gives the same list.
std::vector<Item> corpus_search(const Corpus& corpus, std::string_view tag,
                                std::size_t limit, std::uint64_t token);

/// The in-memory "virtual search engine" over a corpus.
class CorpusSearch final : public SearchSource {
 public:
  explicit CorpusSearch(std::shared_ptr<const Corpus> corpus);

  std::vector<Item> search(std::string_view tag, std::size_t limit,
                           std::uint64_t token) override;
  std::vector<std::string> vocabulary() override;

  const Corpus& corpus() const noexcept { return *corpus_; }
  std::uint64_t queries() const noexcept { return queries_.load(); }

 private:
  std::shared_ptr<const Corpus> corpus_;
  std::atomic<std::uint64_t> queries_{0};
};

/// Counts remote search requests against an optional cap.
class SearchBudgetMeter {
 public:
  explicit SearchBudgetMeter(std::optional<std::uint64_t> cap = std::nullopt) : cap_(cap) {}

  /// Reserves one request. Returns false, without counting, once the cap
  /// would be exceeded.
  bool try_acquire() noexcept;
  std::uint64_t used() const noexcept { return used_.load(); }
  std::optional<std::uint64_t> cap() const noexcept { return cap_; }

 private:
  std::optional<std::uint64_t> cap_;
  std::atomic<std::uint64_t> used_{0};
};

/// Failure talking to a remote search endpoint.
class RemoteError : public Error {
 public:
  enum class Kind { timeout, connection, http_status, malformed_response, budget_exceeded };

  RemoteError(Kind kind, const std::string& what, int status = 0)
      : Error(what), kind_(kind), status_(status) {}

  Kind kind() const noexcept { return kind_; }
  /// HTTP status for `http_status`, else 0.
  int status() const noexcept { return status_; }
  /// Whether an identical request could plausibly succeed later.
  bool retryable() const noexcept;

 private:
  Kind kind_;
  int status_;
};

std::string_view to_string(RemoteError::Kind kind) noexcept;

struct RemoteSearchOptions {
  std::string endpoint;  // e.g. "http://127.0.0.1:8080"
  std::chrono::milliseconds timeout{5000};
};

/// Client for the JSON-over-HTTP search protocol. Never retries on its own;
/// every attempted `search` consumes one unit of the budget meter.
/// `vocabulary()` is fetched once, cached, and not metered.
class RemoteSearch final : public SearchSource {
 public:
  RemoteSearch(RemoteSearchOptions options, std::shared_ptr<SearchBudgetMeter> meter = nullptr);
  ~RemoteSearch() override;
  RemoteSearch(const RemoteSearch&) = delete;
  RemoteSearch& operator=(const RemoteSearch&) = delete;

  std::vector<Item> search(std::string_view tag, std::size_t limit,
                           std::uint64_t token) override;
  std::vector<std::string> vocabulary() override;

  const SearchBudgetMeter& meter() const noexcept { return *meter_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::shared_ptr<SearchBudgetMeter> meter_;
};

/// Parses a search response body (`{"items":[...]}`); throws RemoteError
/// with kind malformed_response on any schema violation.
std::vector<Item> parse_search_response(std::string_view body);
std::string search_response_body(const std::vector<Item>& items);

struct MockServerOptions {
  std::string host = "127.0.0.1";
  int port = 0;  // 0 picks a free port
  std::chrono::milliseconds latency{0};
};

/// Serves the search protocol from a corpus on a background thread.
///
///   GET /api/search?tag=<t>&limit=<n>&token=<u64>  -> {"items":[...]}
///   GET /api/vocab                                 -> {"tags":[...]}
class MockSearchServer {
 public:
  /// Binds immediately; throws Error on bind failure.
  MockSearchServer(std::shared_ptr<const Corpus> corpus, MockServerOptions options = {});
  ~MockSearchServer();
  MockSearchServer(const MockSearchServer&) = delete;
  MockSearchServer& operator=(const MockSearchServer&) = delete;

  int port() const noexcept;
  std::string endpoint() const;
  std::uint64_t requests_served() const noexcept;
  /// Blocks until the server thread exits (after stop()).
  void wait();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace seafarer
