// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>

#include "failgen/error.hpp"
#include "failgen/metrics.hpp"

using namespace failgen;

namespace {

std::size_t lcs_dp(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1, 0));
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      d[i][j] = a[i - 1] == b[j - 1] ? d[i - 1][j - 1] + 1 : std::max(d[i - 1][j], d[i][j - 1]);
    }
  }
  return d[a.size()][b.size()];
}

// Longest subsequence of `a` (by subset enumeration) that is also a
// subsequence of `b`.
std::size_t lcs_brute(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::size_t best = 0;
  for (std::uint32_t mask = 0; mask < (1U << a.size()); ++mask) {
    std::size_t j = 0, len = 0;
    bool ok = true;
    for (std::size_t i = 0; i < a.size() && ok; ++i) {
      if (!(mask & (1U << i))) continue;
      while (j < b.size() && b[j] != a[i]) ++j;
      if (j == b.size()) ok = false;
      else {
        ++j;
        ++len;
      }
    }
    if (ok) best = std::max(best, len);
  }
  return best;
}

double cosine_naive(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::map<std::string, double> va, vb;
  for (const auto& t : a) va[t] += 1;
  for (const auto& t : b) vb[t] += 1;
  double dot = 0, na = 0, nb = 0;
  for (const auto& [k, v] : va) {
    na += v * v;
    if (vb.count(k)) dot += v * vb[k];
  }
  for (const auto& [k, v] : vb) nb += v * v;
  if (na == 0 || nb == 0) return 0;
  return std::min(1.0, dot / std::sqrt(na * nb));
}

std::vector<std::string> random_tokens(std::mt19937_64& rng, std::size_t max_len, int vocab) {
  std::uniform_int_distribution<std::size_t> len(0, max_len);
  std::uniform_int_distribution<int> word(0, vocab - 1);
  std::vector<std::string> out(len(rng));
  for (auto& t : out) t = "w" + std::to_string(word(rng));
  return out;
}

class FixedEmbedder : public Embedder {
 public:
  std::vector<double> embed(const std::string& text) override {
    return text == "a" ? std::vector<double>{1, 0} : std::vector<double>{1, 1};
  }
};

}  // namespace

TEST(Tokenize, LowercaseAlnumRuns) {
  EXPECT_EQ(tokenize("No, the Gripper's  x-axis!"),
            (std::vector<std::string>{"no", "the", "gripper", "s", "x", "axis"}));
  EXPECT_TRUE(tokenize(" ,.; ").empty());
}

TEST(Rouge, IdentityAndDisjoint) {
  const auto same = rouge_l("the cube slipped", "the cube slipped");
  EXPECT_DOUBLE_EQ(same.precision, 1.0);
  EXPECT_DOUBLE_EQ(same.recall, 1.0);
  EXPECT_DOUBLE_EQ(same.f1, 1.0);
  const auto none = rouge_l("alpha beta", "gamma delta");
  EXPECT_DOUBLE_EQ(none.f1, 0.0);
  EXPECT_DOUBLE_EQ(rouge_l("", "x").f1, 0.0);
  EXPECT_DOUBLE_EQ(rouge_l("", "").f1, 0.0);
}

TEST(Rouge, WorkedExample) {
  const std::string cand = "the robot gripper failed to close";
  const std::string ref = "the gripper failed to close";
  EXPECT_EQ(lcs_brute(tokenize(cand), tokenize(ref)), 5U);
  EXPECT_EQ(lcs_dp(tokenize(cand), tokenize(ref)), 5U);
  const auto s = rouge_l(cand, ref);
  EXPECT_NEAR(s.precision, 5.0 / 6.0, 1e-15);
  EXPECT_DOUBLE_EQ(s.recall, 1.0);
  EXPECT_NEAR(s.f1, 10.0 / 11.0, 1e-12);
}

TEST(Rouge, BitParallelMatchesDpOracle) {
  std::mt19937_64 rng(12345);
  for (int i = 0; i < 1000; ++i) {
    const std::size_t max_len = i % 4 == 0 ? 300 : 20;
    const auto a = random_tokens(rng, max_len, i % 2 ? 4 : 12);
    const auto b = random_tokens(rng, max_len, i % 2 ? 4 : 12);
    const std::size_t l = lcs_dp(a, b);
    ASSERT_EQ(lcs_length(a, b), l) << "pair " << i;
    const auto s = rouge_l_tokens(a, b);
    const double p = a.empty() ? 0.0 : static_cast<double>(l) / a.size();
    const double r = b.empty() ? 0.0 : static_cast<double>(l) / b.size();
    const double f = p + r > 0 ? 2 * p * r / (p + r) : 0.0;
    EXPECT_NEAR(s.precision, p, 1e-12);
    EXPECT_NEAR(s.recall, r, 1e-12);
    EXPECT_NEAR(s.f1, f, 1e-12);
  }
}

TEST(Rouge, SmallCasesMatchBruteForce) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 300; ++i) {
    const auto a = random_tokens(rng, 12, 3);
    const auto b = random_tokens(rng, 12, 3);
    EXPECT_EQ(lcs_length(a, b), lcs_brute(a, b));
  }
}

TEST(Rouge, SwapExchangesPrecisionAndRecall) {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 200; ++i) {
    const auto a = random_tokens(rng, 80, 6);
    const auto b = random_tokens(rng, 80, 6);
    const auto ab = rouge_l_tokens(a, b);
    const auto ba = rouge_l_tokens(b, a);
    EXPECT_DOUBLE_EQ(ab.precision, ba.recall);
    EXPECT_DOUBLE_EQ(ab.recall, ba.precision);
    EXPECT_NEAR(ab.f1, ba.f1, 1e-15);
    EXPECT_GE(ab.f1, 0.0);
    EXPECT_LE(ab.f1, 1.0);
  }
}

TEST(Cosine, ThreeQuartersExample) {
  const char* a = "no the gripper slipped";
  const char* b = "no the gripper rotated";
  EXPECT_NEAR(cosine_naive(tokenize(a), tokenize(b)), 0.75, 1e-12);
  EXPECT_NEAR(cosine_similarity(a, b), 0.75, 1e-12);
  EXPECT_DOUBLE_EQ(cosine_similarity("No, the object slipped.", "no the OBJECT slipped"), 1.0);
  EXPECT_DOUBLE_EQ(cosine_similarity("", "x"), 0.0);
}

TEST(Cosine, MatchesNaiveOracleAndScaleInvariant) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 500; ++i) {
    const auto a = random_tokens(rng, 30, 8);
    const auto b = random_tokens(rng, 30, 8);
    std::string sa, sb, sa3;
    for (const auto& t : a) sa += t + " ";
    for (const auto& t : b) sb += t + " ";
    for (int k = 0; k < 3; ++k) sa3 += sa;
    EXPECT_NEAR(cosine_similarity(sa, sb), cosine_naive(a, b), 1e-12);
    EXPECT_NEAR(cosine_similarity(sa3, sb), cosine_similarity(sa, sb), 1e-12);
  }
}

TEST(Cosine, EmbeddingVectors) {
  EXPECT_NEAR(vector_cosine({1, 0}, {1, 1}), 1.0 / std::sqrt(2.0), 1e-12);
  EXPECT_DOUBLE_EQ(vector_cosine({1, 0}, {-1, 0}), 0.0);
  EXPECT_DOUBLE_EQ(vector_cosine({0, 0}, {1, 0}), 0.0);
  EXPECT_THROW(vector_cosine({1}, {1, 0}), Error);
  FixedEmbedder e;
  EXPECT_NEAR(cosine_similarity(std::string("a"), std::string("b"), e), 1.0 / std::sqrt(2.0), 1e-12);
}

TEST(Binary, FirstTokenDecides) {
  EXPECT_EQ(parse_binary("Yes."), BinaryAnswer::Yes);
  EXPECT_EQ(parse_binary("  yes, it worked"), BinaryAnswer::Yes);
  EXPECT_EQ(parse_binary("No, the gripper slipped"), BinaryAnswer::No);
  EXPECT_EQ(parse_binary("NO"), BinaryAnswer::No);
  EXPECT_EQ(parse_binary("No, The robot gripper rotated with an incorrect roll angle"), BinaryAnswer::No);
  EXPECT_EQ(parse_binary("YES."), BinaryAnswer::Yes);
  EXPECT_EQ(parse_binary("Maybe yes"), BinaryAnswer::Unparseable);
  EXPECT_EQ(parse_binary("nope"), BinaryAnswer::Unparseable);
  EXPECT_EQ(parse_binary(""), BinaryAnswer::Unparseable);
  EXPECT_STREQ(to_string(BinaryAnswer::No), "no");
}
