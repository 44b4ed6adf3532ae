#pragma once

#include <cctype>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "elan/error.hpp"

namespace elan::microc {

enum class Tok {
  Ident, Int, End,
  // keywords
  KwInt, KwVoid, KwIf, KwElse, KwWhile, KwFor, KwSwitch, KwCase, KwDefault,
  KwBreak, KwReturn, KwNull, KwInput,
  // punctuation
  LParen, RParen, LBrace, RBrace, Semi, Comma, Colon, Assign,
  Plus, Minus, Star, Slash, Percent,
  Lt, Le, Gt, Ge, EqEq, NotEq, AndAnd, OrOr, Bang,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::int64_t value = 0;
  int line = 1;
  int col = 1;
  int end_line = 1;
  int end_col = 1;
};

inline std::vector<Token> tokenize(std::string_view src, const std::string& file) {
  static constexpr struct {
    std::string_view word;
    Tok kind;
  } kKeywords[] = {
      {"int", Tok::KwInt},       {"void", Tok::KwVoid},     {"if", Tok::KwIf},
      {"else", Tok::KwElse},     {"while", Tok::KwWhile},   {"for", Tok::KwFor},
      {"switch", Tok::KwSwitch}, {"case", Tok::KwCase},     {"default", Tok::KwDefault},
      {"break", Tok::KwBreak},   {"return", Tok::KwReturn}, {"NULL", Tok::KwNull},
      {"input", Tok::KwInput},
  };

  std::vector<Token> out;
  std::size_t i = 0;
  int line = 1;
  int col = 1;

  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };

  while (i < src.size()) {
    const char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }

    Token tok;
    tok.line = line;
    tok.col = col;
    const std::size_t begin = i;

    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) {
        ++j;
      }
      tok.text = std::string(src.substr(i, j - i));
      tok.kind = Tok::Ident;
      for (const auto& kw : kKeywords) {
        if (kw.word == tok.text) tok.kind = kw.kind;
      }
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      std::int64_t v = 0;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) {
        if (v > (INT64_MAX - 9) / 10) {
          throw ParseError(file, line, col, "integer literal out of range");
        }
        v = v * 10 + (src[j] - '0');
        ++j;
      }
      tok.kind = Tok::Int;
      tok.value = v;
      tok.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else {
      auto two = [&](char a, char b) {
        return c == a && i + 1 < src.size() && src[i + 1] == b;
      };
      std::size_t len = 1;
      if (two('<', '=')) { tok.kind = Tok::Le; len = 2; }
      else if (two('>', '=')) { tok.kind = Tok::Ge; len = 2; }
      else if (two('=', '=')) { tok.kind = Tok::EqEq; len = 2; }
      else if (two('!', '=')) { tok.kind = Tok::NotEq; len = 2; }
      else if (two('&', '&')) { tok.kind = Tok::AndAnd; len = 2; }
      else if (two('|', '|')) { tok.kind = Tok::OrOr; len = 2; }
      else {
        switch (c) {
          case '(': tok.kind = Tok::LParen; break;
          case ')': tok.kind = Tok::RParen; break;
          case '{': tok.kind = Tok::LBrace; break;
          case '}': tok.kind = Tok::RBrace; break;
          case ';': tok.kind = Tok::Semi; break;
          case ',': tok.kind = Tok::Comma; break;
          case ':': tok.kind = Tok::Colon; break;
          case '=': tok.kind = Tok::Assign; break;
          case '+': tok.kind = Tok::Plus; break;
          case '-': tok.kind = Tok::Minus; break;
          case '*': tok.kind = Tok::Star; break;
          case '/': tok.kind = Tok::Slash; break;
          case '%': tok.kind = Tok::Percent; break;
          case '<': tok.kind = Tok::Lt; break;
          case '>': tok.kind = Tok::Gt; break;
          case '!': tok.kind = Tok::Bang; break;
          default:
            throw ParseError(file, line, col,
                             std::string("unexpected character '") + c + "'");
        }
      }
      tok.text = std::string(src.substr(begin, len));
      advance(len);
    }
    // End position is the last character of the token.
    tok.end_line = tok.line;
    tok.end_col = col - 1;
    out.push_back(std::move(tok));
  }

  Token end;
  end.kind = Tok::End;
  end.line = end.end_line = line;
  end.col = end.end_col = col;
  out.push_back(end);
  return out;
}

}  // namespace elan::microc
