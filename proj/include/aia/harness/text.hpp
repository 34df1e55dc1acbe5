#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aia/core.hpp"

namespace aia {

/// Lowercased runs of ASCII letters and digits; every other ASCII byte
/// separates tokens. Non-ASCII bytes are kept inside tokens.
std::vector<std::string> tokenize(std::string_view sentence);

/// 64-bit FNV-1a of `key`, masked to the low `hash_bits` bits.
std::uint32_t hash_feature(std::string_view key, unsigned hash_bits);

/// One bag per sentence: every unigram "tok" and bigram "tok1_tok2" hashed
/// with weight 1. Repeated features stay repeated; summing happens at
/// featurisation. Throws std::invalid_argument on an empty document.
std::vector<FeatureBag> text_to_parts(std::span<const std::string> sentences, unsigned hash_bits);

}  // namespace aia
