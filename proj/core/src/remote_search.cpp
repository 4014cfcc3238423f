#include <chrono>
#include <mutex>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "seafarer/search.hpp"

namespace seafarer {

struct RemoteSearch::Impl {
  RemoteSearchOptions options;
  std::mutex vocab_mutex;
  std::optional<std::vector<std::string>> vocab;

  // httplib::Client is not safe for concurrent use, so each call borrows an
  // idle keep-alive client or opens a new one. A client that saw a transport
  // error is dropped rather than returned.
  std::mutex pool_mutex;
  std::vector<std::unique_ptr<httplib::Client>> idle;

  std::unique_ptr<httplib::Client> borrow() {
    {
      std::lock_guard lock(pool_mutex);
      if (!idle.empty()) {
        auto cli = std::move(idle.back());
        idle.pop_back();
        return cli;
      }
    }
    auto cli = std::make_unique<httplib::Client>(options.endpoint);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(options.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(options.timeout - secs);
    cli->set_connection_timeout(secs.count(), usecs.count());
    cli->set_read_timeout(secs.count(), usecs.count());
    cli->set_write_timeout(secs.count(), usecs.count());
    cli->set_keep_alive(true);
    cli->set_tcp_nodelay(true);
    return cli;
  }

  void give_back(std::unique_ptr<httplib::Client> cli) {
    std::lock_guard lock(pool_mutex);
    idle.push_back(std::move(cli));
  }

  std::string get(const std::string& target) {
    auto cli = borrow();
    const auto start = std::chrono::steady_clock::now();
    auto res = cli->Get(target);
    if (!res) {
      const auto err = res.error();
      const auto elapsed = std::chrono::steady_clock::now() - start;
      const bool timed_out = err == httplib::Error::ConnectionTimeout ||
                             (err == httplib::Error::Read && elapsed >= options.timeout * 9 / 10);
      if (timed_out) {
        throw RemoteError(RemoteError::Kind::timeout,
                          "request to " + options.endpoint + target + " timed out");
      }
      throw RemoteError(RemoteError::Kind::connection,
                        "request to " + options.endpoint + target +
                            " failed: " + httplib::to_string(err));
    }
    std::string body = std::move(res->body);
    const int status = res->status;
    give_back(std::move(cli));
    if (status >= 400) {
      throw RemoteError(RemoteError::Kind::http_status,
                        "request to " + options.endpoint + target + " returned HTTP " +
                            std::to_string(status),
                        status);
    }
    return body;
  }
};

RemoteSearch::RemoteSearch(RemoteSearchOptions options, std::shared_ptr<SearchBudgetMeter> meter)
    : impl_(std::make_unique<Impl>()), meter_(std::move(meter)) {
  if (options.endpoint.empty()) throw ValidationError("remote search endpoint is empty");
  while (options.endpoint.size() > 1 && options.endpoint.back() == '/') options.endpoint.pop_back();
  impl_->options = std::move(options);
  if (!meter_) meter_ = std::make_shared<SearchBudgetMeter>();
}

RemoteSearch::~RemoteSearch() = default;

std::vector<Item> RemoteSearch::search(std::string_view tag, std::size_t limit,
                                       std::uint64_t token) {
  if (!meter_->try_acquire()) {
    throw RemoteError(RemoteError::Kind::budget_exceeded,
                      "search budget of " + std::to_string(meter_->cap().value_or(0)) +
                          " queries exhausted");
  }
  const std::string target = "/api/search?tag=" + httplib::detail::encode_query_param(std::string(tag)) +
                             "&limit=" + std::to_string(limit) + "&token=" + std::to_string(token);
  return parse_search_response(impl_->get(target));
}

std::vector<std::string> RemoteSearch::vocabulary() {
  std::lock_guard lock(impl_->vocab_mutex);
  if (!impl_->vocab) {
    const std::string body = impl_->get("/api/vocab");
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
      throw RemoteError(RemoteError::Kind::malformed_response, std::string("malformed vocab: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("tags") || !doc["tags"].is_array())
      throw RemoteError(RemoteError::Kind::malformed_response, "malformed vocab: expected {\"tags\":[...]}");
    std::vector<std::string> tags;
    for (const auto& t : doc["tags"]) {
      if (!t.is_string())
        throw RemoteError(RemoteError::Kind::malformed_response, "malformed vocab: non-string tag");
      tags.push_back(t.get<std::string>());
    }
    std::sort(tags.begin(), tags.end());
    tags.erase(std::unique(tags.begin(), tags.end()), tags.end());
    impl_->vocab = std::move(tags);
  }
  return *impl_->vocab;
}

}  // namespace seafarer
