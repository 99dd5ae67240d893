#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "apisum/errors.hpp"
#include "apisum/vect.hpp"
#include "test_support.hpp"

namespace apisum::vect {
namespace {

using V = std::vector<double>;

EmbeddingModel model_from(const std::string& text) {
  std::istringstream in(text);
  return load_embeddings(in);
}

TEST(LoadEmbeddings, Basic) {
  const auto m = model_from("2 3\na 1 0 0\nb 0 1 0\n");
  EXPECT_EQ(m.dimension(), 3u);
  EXPECT_EQ(m.vocab_size(), 2u);
  ASSERT_EQ(m.lookup("b").size(), 3u);
  EXPECT_EQ(m.lookup("b")[1], 1.0);
  EXPECT_TRUE(m.lookup("zzz").empty());
}

TEST(LoadEmbeddings, Errors) {
  try {
    model_from("2 3\na 1 0 0\nb 0 1\n");
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(model_from("0 3\n"), EmptyModel);
  EXPECT_THROW(model_from("2 3\na 1 0 0\n"), FormatError);
  EXPECT_THROW(model_from("x y\n"), FormatError);
  EXPECT_THROW(model_from("1 2\na 1 nan\n"), FormatError);
  EXPECT_THROW(load_embeddings(std::filesystem::path("/nonexistent/emb.txt")), IoError);
}

TEST(LoadEmbeddings, DuplicateKeepsFirst) {
  const auto m = model_from("2 1\na 1\na 2\n");
  EXPECT_EQ(m.vocab_size(), 1u);
  EXPECT_EQ(m.lookup("a")[0], 1.0);
}

TEST(LoadEmbeddings, ToyFixture) {
  const auto m = load_embeddings(apisum::testing::data_path("toy_embeddings.txt"));
  EXPECT_EQ(m.vocab_size(), 50u);
  EXPECT_EQ(m.dimension(), 16u);
}

TEST(EmbedSentence, MeanPooling) {
  const auto m = model_from("2 3\na 1 0 0\nb 0 1 0\n");
  EXPECT_EQ(embed_sentence({"a"}, m).components, (V{1, 0, 0}));
  EXPECT_EQ(embed_sentence({"a", "b"}, m).components, (V{0.5, 0.5, 0}));
  const auto oov = embed_sentence({"x", "y"}, m);
  EXPECT_EQ(oov.components, (V{0, 0, 0}));
  EXPECT_EQ(oov.known_token_count, 0u);
}

TEST(EmbedSentence, PermutationInvariant) {
  const auto m = load_embeddings(apisum::testing::data_path("toy_embeddings.txt"));
  const std::vector<std::string> vocab{"call", "view", "layout", "state", "thread", "adapter", "oov"};
  std::mt19937 rng(4);
  for (int i = 0; i < 100; ++i) {
    std::vector<std::string> tokens;
    for (int k = 0, n = 1 + static_cast<int>(rng() % 10); k < n; ++k) tokens.push_back(vocab[rng() % vocab.size()]);
    auto shuffled = tokens;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const auto a = embed_sentence(tokens, m).components;
    const auto b = embed_sentence(shuffled, m).components;
    for (std::size_t d = 0; d < a.size(); ++d) EXPECT_NEAR(a[d], b[d], 1e-12);
  }
}

std::vector<V> tfidf(const std::vector<std::vector<std::string>>& s) {
  std::vector<V> out;
  for (auto& v : tfidf_vectors(std::span<const std::vector<std::string>>(s))) out.push_back(v.components);
  return out;
}

TEST(Tfidf, Examples) {
  EXPECT_EQ(tfidf({{"a"}, {"a"}}), (std::vector<V>{{0}, {0}}));
  const double l2 = std::log(2.0);
  EXPECT_EQ(tfidf({{"a"}, {"b"}}), (std::vector<V>{{l2, 0}, {0, l2}}));
  EXPECT_TRUE(tfidf({}).empty());
}

TEST(Tfidf, HandComputedWithRepeats) {
  // N=3; df(a)=2, df(b)=1, df(c)=2
  const auto v = tfidf({{"a", "b", "a"}, {"c"}, {"a", "c"}});
  const double ia = std::log(3.0 / 2.0), ib = std::log(3.0), ic = std::log(3.0 / 2.0);
  ASSERT_EQ(v.size(), 3u);
  EXPECT_NEAR(v[0][0], 2 * ia, 1e-15);
  EXPECT_NEAR(v[0][1], ib, 1e-15);
  EXPECT_EQ(v[0][2], 0.0);
  EXPECT_NEAR(v[1][2], ic, 1e-15);
  EXPECT_NEAR(v[2][0], ia, 1e-15);
  for (const auto& s : v) {
    for (double x : s) EXPECT_GE(x, 0.0);
  }
}

TEST(Cosine, Analytic) {
  EXPECT_NEAR(cosine(V{1, 0}, V{1, 0}), 1.0, 1e-12);
  EXPECT_NEAR(cosine(V{1, 0}, V{0, 1}), 0.0, 1e-12);
  EXPECT_NEAR(cosine(V{1, 0}, V{1, 1}), 0.7071067811865475, 1e-12);
  EXPECT_EQ(cosine(V{0, 0}, V{1, 1}), 0.0);
  EXPECT_THROW(cosine(V{1}, V{1, 0}), DimensionMismatch);
}

TEST(Cosine, SymmetryScaleAndSelf) {
  std::mt19937 rng(2);
  std::normal_distribution<double> g;
  for (int i = 0; i < 200; ++i) {
    V a(6), b(6);
    for (auto& x : a) x = g(rng);
    for (auto& x : b) x = g(rng);
    EXPECT_NEAR(cosine(a, b), cosine(b, a), 1e-12);
    EXPECT_NEAR(cosine(a, a), 1.0, 1e-12);
    V scaled = a;
    for (auto& x : scaled) x *= 37.5;
    EXPECT_NEAR(cosine(scaled, b), cosine(a, b), 1e-12);
    EXPECT_LE(std::abs(cosine(a, b)), 1.0);
  }
}

}  // namespace
}  // namespace apisum::vect
