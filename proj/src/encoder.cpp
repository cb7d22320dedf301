#include "cseval/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "cseval/rng.hpp"

namespace cseval {

std::string_view input_mode_name(InputMode m) {
  return m == InputMode::cs_only ? "cs_only" : "cs_plus_hs";
}

void EncoderConfig::validate() const {
  if (max_tokens < 1) throw ValidationError("encoder.max_tokens must be >= 1");
  if (feature_dim < 2) throw ValidationError("encoder.feature_dim must be >= 2");
  if (ngram_orders.empty()) {
    throw ValidationError("encoder.ngram_orders must not be empty");
  }
  for (int k : ngram_orders) {
    if (k < 1 || k > 3) {
      throw ValidationError("encoder.ngram_orders entries must lie in {1,2,3}");
    }
  }
}

double FeatureVector::norm() const {
  double s = 0.0;
  for (const auto& [i, v] : entries) s += v * v;
  return std::sqrt(s);
}

std::vector<double> FeatureVector::dense() const {
  std::vector<double> out(static_cast<std::size_t>(dim), 0.0);
  for (const auto& [i, v] : entries) out[static_cast<std::size_t>(i)] = v;
  return out;
}

namespace {

bool is_unicode_space(char32_t c) {
  switch (c) {
    case 0x0085: case 0x00A0: case 0x1680: case 0x2028: case 0x2029:
    case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return c >= 0x2000 && c <= 0x200A;
  }
}

bool is_unicode_punct(char32_t c) {
  // General punctuation, CJK punctuation and a few Latin-1 marks; enough for
  // the corpora this pipeline consumes.
  if (c >= 0x2010 && c <= 0x205E) return true;
  if (c >= 0x3001 && c <= 0x303F) return true;
  switch (c) {
    case 0x00A1: case 0x00A7: case 0x00AB: case 0x00B6: case 0x00B7:
    case 0x00BB: case 0x00BF:
      return true;
    default:
      return false;
  }
}

bool is_delimiter(char32_t c) {
  if (c < 0x80) {
    bool alnum = (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
                 (c >= 'A' && c <= 'Z');
    return !alnum;
  }
  return is_unicode_space(c) || is_unicode_punct(c);
}

// Decodes one UTF-8 codepoint at pos; invalid bytes decode as U+FFFD and
// advance one byte, which makes them delimiters.
char32_t decode_utf8(std::string_view s, std::size_t& pos) {
  unsigned char b0 = static_cast<unsigned char>(s[pos]);
  if (b0 < 0x80) {
    ++pos;
    return b0;
  }
  int extra = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    extra = 1;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    extra = 2;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    extra = 3;
    cp = b0 & 0x07;
  } else {
    ++pos;
    return 0xFFFD;
  }
  if (pos + static_cast<std::size_t>(extra) >= s.size()) {
    ++pos;
    return 0xFFFD;
  }
  for (int i = 1; i <= extra; ++i) {
    unsigned char b = static_cast<unsigned char>(s[pos + static_cast<std::size_t>(i)]);
    if ((b & 0xC0) != 0x80) {
      ++pos;
      return 0xFFFD;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  pos += static_cast<std::size_t>(extra) + 1;
  return cp;
}

void append_utf8(std::string& out, char32_t c) {
  if (c < 0x80) {
    out.push_back(static_cast<char>(c));
  } else if (c < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (c >> 6)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  } else if (c < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (c >> 12)));
    out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (c >> 18)));
    out.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  }
}

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

std::uint64_t fnv1a_update(std::uint64_t h, const char* data, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    h ^= static_cast<unsigned char>(data[i]);
    h *= kFnvPrime;
  }
  return h;
}

// In-stream marker between hs and cs tokens; cannot collide with real tokens
// because 0x1E is a delimiter and never survives tokenization.
const std::string kSeparator = "\x1e";

}  // namespace

std::vector<std::string> tokenize(std::string_view text, int max_tokens) {
  std::vector<std::string> tokens;
  std::string current;
  std::size_t pos = 0;
  while (pos < text.size() &&
         tokens.size() < static_cast<std::size_t>(max_tokens)) {
    char32_t c = decode_utf8(text, pos);
    if (is_delimiter(c)) {
      if (!current.empty()) {
        tokens.push_back(std::move(current));
        current.clear();
      }
      continue;
    }
    if (c >= 'A' && c <= 'Z') c = c - 'A' + 'a';
    append_utf8(current, c);
  }
  if (!current.empty() && tokens.size() < static_cast<std::size_t>(max_tokens)) {
    tokens.push_back(std::move(current));
  }
  return tokens;
}

std::uint64_t ngram_hash(std::span<const std::string> tokens) {
  std::uint64_t h = kFnvOffset;
  unsigned char order = static_cast<unsigned char>(tokens.size());
  h ^= order;
  h *= kFnvPrime;
  for (const auto& tok : tokens) {
    h = fnv1a_update(h, tok.data(), tok.size());
    h ^= 0x1F;
    h *= kFnvPrime;
  }
  return h;
}

int ngram_sign(std::uint64_t hash) {
  return (splitmix64(hash ^ 0x5851f42d4c957f2dULL) & 1) ? 1 : -1;
}

FeatureVector encode(const HsCsPair& pair, const EncoderConfig& config) {
  config.validate();

  std::vector<std::string> stream;
  if (config.input_mode == InputMode::cs_plus_hs) {
    stream = tokenize(pair.hs_text, config.max_tokens);
    if (!stream.empty()) stream.push_back(kSeparator);
    for (auto& tok : tokenize(pair.cs_text, config.max_tokens)) {
      stream.push_back(std::move(tok));
    }
    if (stream.size() > static_cast<std::size_t>(config.max_tokens)) {
      stream.resize(static_cast<std::size_t>(config.max_tokens));
    }
  } else {
    stream = tokenize(pair.cs_text, config.max_tokens);
  }

  std::map<int, double> accum;
  for (int k : config.ngram_orders) {
    if (stream.size() < static_cast<std::size_t>(k)) continue;
    for (std::size_t i = 0; i + static_cast<std::size_t>(k) <= stream.size(); ++i) {
      std::span<const std::string> window(&stream[i], static_cast<std::size_t>(k));
      bool has_separator = false;
      for (const auto& tok : window) {
        if (tok == kSeparator) {
          has_separator = true;
          break;
        }
      }
      if (has_separator) continue;
      std::uint64_t h = ngram_hash(window);
      int index = static_cast<int>(h % static_cast<std::uint64_t>(config.feature_dim));
      accum[index] += static_cast<double>(ngram_sign(h));
    }
  }

  FeatureVector fv;
  fv.dim = config.feature_dim;
  double sq = 0.0;
  for (const auto& [i, v] : accum) {
    if (v == 0.0) continue;  // positive and negative collisions cancelled
    sq += v * v;
  }
  double inv_norm = sq > 0.0 ? 1.0 / std::sqrt(sq) : 0.0;
  for (const auto& [i, v] : accum) {
    if (v == 0.0) continue;
    fv.entries.emplace_back(i, v * inv_norm);
  }
  return fv;
}

}  // namespace cseval
