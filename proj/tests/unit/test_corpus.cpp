#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "seafarer/corpus.hpp"
#include "seafarer/error.hpp"
#include "test_support.hpp"

using namespace seafarer;
using seafarer::testing::make_item;

namespace {

const char* kThreeItems =
    "{\"meta\":{\"d\":2}}\n"
    "{\"id\":\"x1\",\"features\":[1,0],\"tags\":[\"b\",\"a\",\"a\"],\"url\":\"http://img/1\"}\n"
    "\n"
    "{\"id\":\"x2\",\"features\":[0,1],\"tags\":[\"a\"]}\n"
    "{\"id\":\"x3\",\"features\":[0.5,0.5]}\n";

int line_of(const std::string& text) {
  try {
    parse_corpus(text);
  } catch (const ParseError& e) {
    return static_cast<int>(e.line());
  }
  return -1;
}

}  // namespace

TEST(Corpus, ParsesJsonLinesWithMeta) {
  const Corpus c = parse_corpus(kThreeItems);
  EXPECT_EQ(c.size(), 3u);
  EXPECT_EQ(c.dim(), 2u);
  EXPECT_EQ(c.at(0).tags, (std::vector<std::string>{"a", "b"}));
  ASSERT_TRUE(c.at(0).url.has_value());
  EXPECT_EQ(*c.at(0).url, "http://img/1");
  EXPECT_FALSE(c.at(1).url.has_value());
  EXPECT_TRUE(c.at(2).tags.empty());
  EXPECT_EQ(c.tag_vocab(), (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(c.posting_ids("a"), (std::vector<std::string>{"x1", "x2"}));
  EXPECT_TRUE(c.postings("nope").empty());
  ASSERT_NE(c.find("x2"), nullptr);
  EXPECT_EQ(c.find("x2")->features[1], 1.0);
  EXPECT_EQ(c.find("zz"), nullptr);
  EXPECT_EQ(c.index_of("x3"), 2u);
}

TEST(Corpus, RoundTripsThroughSerialization) {
  const Corpus c = parse_corpus(kThreeItems);
  EXPECT_EQ(parse_corpus(serialize_corpus(c)), c);
  seafarer::testing::TempDir dir;
  save_corpus(c, dir / "c.jsonl");
  EXPECT_EQ(load_corpus(dir / "c.jsonl"), c);
}

TEST(Corpus, ErrorsCarryLineNumbers) {
  EXPECT_EQ(line_of("{\"id\":\"a\",\"features\":[1]}\n{not json}\n"), 2);
  EXPECT_EQ(line_of("{\"id\":\"a\",\"features\":[1]}\n{\"features\":[1]}\n"), 2);
  EXPECT_EQ(line_of("{\"meta\":{\"d\":0}}\n"), 1);
  EXPECT_EQ(line_of("{\"id\":\"a\",\"features\":[\"x\"]}\n"), 1);
  EXPECT_EQ(line_of("{\"id\":\"a\",\"features\":[1],\"tags\":[3]}\n"), 1);
}

TEST(Corpus, RejectsInvalidContent) {
  EXPECT_THROW(parse_corpus("{\"id\":\"a\",\"features\":[1]}\n{\"id\":\"a\",\"features\":[2]}\n"),
               ValidationError);
  EXPECT_THROW(parse_corpus("{\"meta\":{\"d\":2}}\n{\"id\":\"a\",\"features\":[1]}\n{\"id\":\"b\",\"features\":[1,2]}\n"),
               ValidationError);
  EXPECT_THROW(parse_corpus("{\"id\":\"a\",\"features\":[1]}\n"), ValidationError);
  EXPECT_THROW(parse_corpus(""), ValidationError);
  EXPECT_THROW(Corpus::from_items({make_item("", {1.0}), make_item("b", {1.0})}), ValidationError);
  EXPECT_THROW(Corpus::from_items({make_item("a", {NAN}), make_item("b", {1.0})}), ValidationError);
}

TEST(Embeddings, ParseAndLookup) {
  const auto emb = parse_embeddings("a 1 0\nb 0 1\n");
  EXPECT_EQ(emb.dim(), 2u);
  EXPECT_EQ(emb.size(), 2u);
  EXPECT_EQ(emb.lookup("b"), (std::vector<double>{0, 1}));
  EXPECT_EQ(emb.lookup("zz"), (std::vector<double>{0, 0}));
}

TEST(Embeddings, HashGaussianDefaultIsUnitAndStable) {
  TagEmbeddings emb(8, EmbeddingDefault::seeded_hash_gaussian);
  const auto a = emb.lookup("unseen");
  const auto b = emb.lookup("unseen");
  const auto c = emb.lookup("other");
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  double n2 = 0;
  for (double v : a) n2 += v * v;
  EXPECT_NEAR(n2, 1.0, 1e-12);
}

TEST(Embeddings, RejectsMalformedInput) {
  EXPECT_THROW(parse_embeddings("a 1 2\nb 1\n"), ParseError);
  EXPECT_THROW(parse_embeddings("a x\n"), ParseError);
  EXPECT_THROW(parse_embeddings("lonely\n"), ParseError);
  EXPECT_THROW(parse_embeddings(""), ParseError);
  TagEmbeddings emb(2, EmbeddingDefault::zero_vector);
  EXPECT_THROW(emb.insert("a", {1.0}), ValidationError);
  EXPECT_THROW(emb.insert("a", {1.0, INFINITY}), ValidationError);
}

TEST(Embeddings, SaveLoadRoundTrip) {
  TagEmbeddings emb(3, EmbeddingDefault::zero_vector);
  emb.insert("x", {0.1, -2.5, 1e-300});
  emb.insert("y", {1.0 / 3.0, 0, 7});
  seafarer::testing::TempDir dir;
  save_embeddings(emb, dir / "e.txt");
  const auto back = load_embeddings(dir / "e.txt");
  EXPECT_EQ(back.entries(), emb.entries());
}

TEST(Synth, DeterministicAndWellFormed) {
  SynthParams p;
  p.n_items = 500;
  p.n_tags = 12;
  p.d = 6;
  p.k = 4;
  p.seed = 9;
  const auto [c1, e1] = synth_corpus(p);
  const auto [c2, e2] = synth_corpus(p);
  EXPECT_EQ(c1, c2);
  EXPECT_EQ(e1.entries(), e2.entries());
  EXPECT_EQ(c1.size(), 500u);
  EXPECT_EQ(c1.dim(), 6u);
  EXPECT_EQ(c1.tag_vocab().size(), 12u);
  EXPECT_EQ(e1.size(), 12u);
  for (const auto& [tag, z] : e1.entries()) {
    double n2 = 0;
    for (double v : z) n2 += v * v;
    EXPECT_NEAR(n2, 1.0, 1e-12) << tag;
  }
  for (const auto& item : c1.items()) {
    EXPECT_GE(item.tags.size(), 1u);
    EXPECT_LE(item.tags.size(), 3u);
  }
  p.seed = 10;
  EXPECT_NE(synth_corpus(p).first, c1);
}

TEST(Synth, TagsShareFeatureStructure) {
  // Items of one tag should sit closer to each other than to items of other
  // tags when the spread is small.
  SynthParams p;
  p.n_items = 400;
  p.n_tags = 8;
  p.cluster_spread = 0.05;
  const auto [c, e] = synth_corpus(p);
  const auto& ids = c.postings("tag000");
  ASSERT_GT(ids.size(), 5u);
  auto dist = [&](std::size_t a, std::size_t b) {
    double s = 0;
    for (std::size_t j = 0; j < c.dim(); ++j) s += std::pow(c.at(a).features[j] - c.at(b).features[j], 2);
    return std::sqrt(s);
  };
  double within = 0, across = 0;
  int nw = 0, na = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const bool in = c.at(i).has_tag("tag000");
    if (i == ids[0]) continue;
    (in ? within : across) += dist(ids[0], i);
    (in ? nw : na) += 1;
  }
  EXPECT_LT(within / nw, across / na);
}

TEST(Synth, RejectsBadParameters) {
  SynthParams p;
  p.n_items = 1;
  EXPECT_THROW(synth_corpus(p), ValidationError);
  p = {};
  p.cluster_spread = -1;
  EXPECT_THROW(synth_corpus(p), ValidationError);
}
