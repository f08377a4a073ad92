#ifndef LYRICA_TEXTPREP_HPP
#define LYRICA_TEXTPREP_HPP

#include <string>
#include <vector>

namespace lyrica {

// Tokens are non-empty, lowercase, and free of ',' '!' '.' '?' and whitespace.
using TokenSequence = std::vector<std::string>;

// Concatenates title and lyrics with a single space, lowercases (Unicode
// simple mappings), deletes the characters , ! . ?, turns line breaks into
// spaces, collapses whitespace runs and trims the ends. Only those four
// punctuation marks are touched; accents, apostrophes and hyphens survive.
std::string normalize(const std::string& title, const std::string& lyrics);

// Splits normalized text on single spaces. Empty input gives an empty
// sequence; no empty tokens are ever produced.
TokenSequence tokenize(const std::string& text);

// Single-codepoint lowercase mapping; codepoints without a mapping pass
// through unchanged.
char32_t lowercase_codepoint(char32_t cp);

}  // namespace lyrica

#endif
