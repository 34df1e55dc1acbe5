#include "aia/harness/text.hpp"

#include <stdexcept>

namespace aia {

std::vector<std::string> tokenize(std::string_view sentence) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : sentence) {
    const auto byte = static_cast<unsigned char>(ch);
    const bool letter = (byte >= 'a' && byte <= 'z') || (byte >= '0' && byte <= '9');
    if (byte >= 'A' && byte <= 'Z') {
      current.push_back(static_cast<char>(byte - 'A' + 'a'));
    } else if (letter || byte >= 0x80) {
      current.push_back(ch);
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::uint32_t hash_feature(std::string_view key, unsigned hash_bits) {
  std::uint64_t h = 14695981039346656037ULL;
  for (char ch : key) {
    h ^= static_cast<unsigned char>(ch);
    h *= 1099511628211ULL;
  }
  const std::uint64_t mask = (std::uint64_t{1} << hash_bits) - 1;
  return static_cast<std::uint32_t>(h & mask);
}

std::vector<FeatureBag> text_to_parts(std::span<const std::string> sentences, unsigned hash_bits) {
  if (sentences.empty()) throw std::invalid_argument("document has no sentences");
  if (hash_bits == 0 || hash_bits > 30) throw std::invalid_argument("hash_bits must be in [1, 30]");
  std::vector<FeatureBag> parts;
  parts.reserve(sentences.size());
  for (const auto& sentence : sentences) {
    const auto tokens = tokenize(sentence);
    FeatureBag bag;
    bag.reserve(tokens.empty() ? 0 : 2 * tokens.size() - 1);
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      bag.push_back({hash_feature(tokens[i], hash_bits), 1.0});
      if (i + 1 < tokens.size()) {
        bag.push_back({hash_feature(tokens[i] + "_" + tokens[i + 1], hash_bits), 1.0});
      }
    }
    parts.push_back(std::move(bag));
  }
  return parts;
}

}  // namespace aia
