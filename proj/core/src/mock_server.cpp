#include <atomic>
#include <charconv>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "seafarer/search.hpp"

namespace seafarer {

namespace {

template <typename T>
std::optional<T> parse_integer(const std::string& s) {
  T value{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

void bad_request(httplib::Response& res, const std::string& why) {
  res.status = 400;
  res.set_content(nlohmann::json{{"error", why}}.dump(), "application/json");
}

}  // namespace

struct MockSearchServer::Impl {
  std::shared_ptr<const Corpus> corpus;
  MockServerOptions options;
  httplib::Server server;
  std::thread thread;
  int port = -1;
  std::atomic<std::uint64_t> served{0};
  std::once_flag stopped;
};

MockSearchServer::MockSearchServer(std::shared_ptr<const Corpus> corpus, MockServerOptions options)
    : impl_(std::make_unique<Impl>()) {
  if (!corpus) throw ValidationError("mock server needs a corpus");
  impl_->corpus = std::move(corpus);
  impl_->options = std::move(options);
  Impl* self = impl_.get();

  auto delay = [self] {
    if (self->options.latency.count() > 0) std::this_thread::sleep_for(self->options.latency);
  };

  // Clients hold keep-alive connections across a whole run.
  self->server.set_keep_alive_max_count(100000);
  self->server.set_keep_alive_timeout(1);
  self->server.set_tcp_nodelay(true);
  self->server.Get("/api/search", [self, delay](const httplib::Request& req, httplib::Response& res) {
    self->served.fetch_add(1);
    delay();
    if (!req.has_param("tag")) return bad_request(res, "missing tag");
    if (!req.has_param("limit")) return bad_request(res, "missing limit");
    const std::string tag = req.get_param_value("tag");
    auto limit = parse_integer<long long>(req.get_param_value("limit"));
    if (!limit || *limit < 1) return bad_request(res, "limit must be a positive integer");
    std::uint64_t token = 0;
    if (req.has_param("token")) {
      auto t = parse_integer<std::uint64_t>(req.get_param_value("token"));
      if (!t) return bad_request(res, "token must be an unsigned integer");
      token = *t;
    }
    auto items = corpus_search(*self->corpus, tag, static_cast<std::size_t>(*limit), token);
    res.set_content(search_response_body(items), "application/json");
  });

  self->server.Get("/api/vocab", [self, delay](const httplib::Request&, httplib::Response& res) {
    self->served.fetch_add(1);
    delay();
    res.set_content(nlohmann::json{{"tags", self->corpus->tag_vocab()}}.dump(), "application/json");
  });

  if (self->options.port == 0) {
    self->port = self->server.bind_to_any_port(self->options.host);
  } else if (self->server.bind_to_port(self->options.host, self->options.port)) {
    self->port = self->options.port;
  }
  if (self->port <= 0) {
    throw Error("mock search server could not bind " + self->options.host + ":" +
                std::to_string(self->options.port));
  }
  self->thread = std::thread([self] { self->server.listen_after_bind(); });
  self->server.wait_until_ready();
}

MockSearchServer::~MockSearchServer() {
  stop();
  wait();
}

int MockSearchServer::port() const noexcept { return impl_->port; }

std::string MockSearchServer::endpoint() const {
  return "http://" + impl_->options.host + ":" + std::to_string(impl_->port);
}

std::uint64_t MockSearchServer::requests_served() const noexcept { return impl_->served.load(); }

void MockSearchServer::stop() {
  std::call_once(impl_->stopped, [this] { impl_->server.stop(); });
}

void MockSearchServer::wait() {
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace seafarer
