// SPDX-License-Identifier: Apache-2.0
//
// Text metrics comparing a model response against a ground-truth answer.
#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace failgen {

// Lowercase; split on runs of non-alphanumeric characters; drop empties.
std::vector<std::string> tokenize(std::string_view text);

// Bit-parallel longest common subsequence length over token sequences.
std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b);

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};
RougeScore rouge_l(std::string_view candidate, std::string_view reference);
RougeScore rouge_l_tokens(const std::vector<std::string>& candidate, const std::vector<std::string>& reference);

// Cosine of token-count vectors; 0 when either side has no tokens.
double cosine_similarity(std::string_view candidate, std::string_view reference);

class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::vector<double> embed(const std::string& text) = 0;
};

// Cosine of two embedding vectors clamped to [0, 1]; 0 for zero vectors.
// Throws Error(InvalidArgument) on a dimension mismatch.
double vector_cosine(const std::vector<double>& a, const std::vector<double>& b);
double cosine_similarity(const std::string& candidate, const std::string& reference, Embedder& embedder);

enum class BinaryAnswer { Yes, No, Unparseable };
BinaryAnswer parse_binary(std::string_view response);
const char* to_string(BinaryAnswer answer);

}  // namespace failgen
