// SPDX-License-Identifier: Apache-2.0
#include "failgen/metrics.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <unordered_map>

#include "failgen/error.hpp"

namespace failgen {

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (c < 0x80 && std::isalnum(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  const std::size_t m = a.size();
  if (m == 0 || b.empty()) return 0;
  const std::size_t words = (m + 63) / 64;
  std::unordered_map<std::string_view, std::vector<std::uint64_t>> match;
  for (std::size_t i = 0; i < m; ++i) {
    auto& bits = match.try_emplace(a[i], words, 0).first->second;
    bits[i / 64] |= std::uint64_t{1} << (i % 64);
  }
  std::vector<std::uint64_t> v(words, ~std::uint64_t{0});
  for (const auto& token : b) {
    auto it = match.find(token);
    if (it == match.end()) continue;
    const auto& mask = it->second;
    std::uint64_t carry = 0;
    for (std::size_t w = 0; w < words; ++w) {
      const std::uint64_t u = v[w] & mask[w];
      const std::uint64_t t = v[w] + carry;
      const std::uint64_t c1 = t < carry ? 1 : 0;
      const std::uint64_t sum = t + u;
      const std::uint64_t c2 = sum < u ? 1 : 0;
      carry = c1 | c2;
      v[w] = sum | (v[w] & ~mask[w]);
    }
  }
  std::size_t zeros = 0;
  for (std::size_t w = 0; w < words; ++w) {
    std::uint64_t bits = ~v[w];
    const std::size_t used = std::min<std::size_t>(64, m - w * 64);
    if (used < 64) bits &= (std::uint64_t{1} << used) - 1;
    zeros += static_cast<std::size_t>(std::popcount(bits));
  }
  return zeros;
}

RougeScore rouge_l_tokens(const std::vector<std::string>& candidate, const std::vector<std::string>& reference) {
  if (candidate.empty() || reference.empty()) return {};
  const double lcs = static_cast<double>(lcs_length(candidate, reference));
  RougeScore s;
  s.precision = lcs / static_cast<double>(candidate.size());
  s.recall = lcs / static_cast<double>(reference.size());
  s.f1 = lcs == 0.0 ? 0.0 : 2.0 * s.precision * s.recall / (s.precision + s.recall);
  return s;
}

RougeScore rouge_l(std::string_view candidate, std::string_view reference) {
  return rouge_l_tokens(tokenize(candidate), tokenize(reference));
}

double cosine_similarity(std::string_view candidate, std::string_view reference) {
  std::unordered_map<std::string, std::int64_t> ca;
  std::unordered_map<std::string, std::int64_t> cb;
  for (auto& t : tokenize(candidate)) ++ca[std::move(t)];
  for (auto& t : tokenize(reference)) ++cb[std::move(t)];
  if (ca.empty() || cb.empty()) return 0.0;
  std::int64_t dot = 0;
  std::int64_t na = 0;
  std::int64_t nb = 0;
  for (const auto& [tok, n] : ca) {
    na += n * n;
    if (auto it = cb.find(tok); it != cb.end()) dot += n * it->second;
  }
  for (const auto& [tok, n] : cb) nb += n * n;
  if (dot == 0) return 0.0;
  const double s = static_cast<double>(dot) / std::sqrt(static_cast<double>(na) * static_cast<double>(nb));
  return std::min(1.0, s);
}

double vector_cosine(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::InvalidArgument, "embedding dimensions differ: " + std::to_string(a.size()) + " vs " +
                                                std::to_string(b.size()));
  }
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(dot / std::sqrt(na * nb), 0.0, 1.0);
}

double cosine_similarity(const std::string& candidate, const std::string& reference, Embedder& embedder) {
  if (tokenize(candidate).empty() || tokenize(reference).empty()) return 0.0;
  return vector_cosine(embedder.embed(candidate), embedder.embed(reference));
}

BinaryAnswer parse_binary(std::string_view response) {
  const auto tokens = tokenize(response);
  if (tokens.empty()) return BinaryAnswer::Unparseable;
  if (tokens.front() == "yes") return BinaryAnswer::Yes;
  if (tokens.front() == "no") return BinaryAnswer::No;
  return BinaryAnswer::Unparseable;
}

const char* to_string(BinaryAnswer answer) {
  switch (answer) {
    case BinaryAnswer::Yes:
      return "yes";
    case BinaryAnswer::No:
      return "no";
    case BinaryAnswer::Unparseable:
      break;
  }
  return "unparseable";
}

}  // namespace failgen
