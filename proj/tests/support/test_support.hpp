#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "seafarer/corpus.hpp"
#include "seafarer/random.hpp"

namespace seafarer::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("seafarer_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
}

inline Item make_item(std::string id, std::vector<double> features, std::vector<std::string> tags = {}) {
  Item it;
  it.id = std::move(id);
  it.features = std::move(features);
  it.tags = std::move(tags);
  return it;
}

/// n items in dimension d with Gaussian features; item i carries tag
/// "t<i % n_tags>" and, for the first `n_marked`, the tag "a".
inline Corpus random_corpus(std::size_t n, std::size_t d, std::size_t n_tags, std::size_t n_marked,
                            std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Item> items;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> f(d);
    for (auto& v : f) v = rng.normal();
    std::vector<std::string> tags{"t" + std::to_string(i % n_tags)};
    if (i < n_marked) tags.push_back("a");
    char id[32];
    std::snprintf(id, sizeof id, "i%05zu", i);
    items.push_back(make_item(id, std::move(f), std::move(tags)));
  }
  return Corpus::from_items(std::move(items));
}

}  // namespace seafarer::testing
