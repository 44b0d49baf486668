#include "rdeq/toml_lite.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "rdeq/errors.hpp"

namespace rdeq {

namespace {

using nlohmann::ordered_json;

struct Cursor {
  const std::string& text;
  std::size_t pos = 0;
  long line = 1;

  bool done() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }
  char take() {
    const char c = text[pos++];
    if (c == '\n') ++line;
    return c;
  }
  void skip_ws_inline() {
    while (!done() && (peek() == ' ' || peek() == '\t')) ++pos;
  }
  // Whitespace, newlines and comments.
  void skip_ws_and_comments() {
    while (!done()) {
      const char c = peek();
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        take();
      } else if (c == '#') {
        while (!done() && peek() != '\n') ++pos;
      } else {
        break;
      }
    }
  }
};

[[noreturn]] void fail(const Cursor& c, const std::string& what) {
  throw ParseError("toml: " + what, c.line);
}

bool is_bare_key_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

std::string parse_bare_key(Cursor& c) {
  std::string key;
  while (!c.done() && is_bare_key_char(c.peek())) key.push_back(c.take());
  if (key.empty()) fail(c, "expected a key");
  return key;
}

std::string parse_string(Cursor& c) {
  c.take();  // opening quote
  std::string out;
  while (true) {
    if (c.done()) fail(c, "unterminated string");
    const char ch = c.take();
    if (ch == '"') break;
    if (ch == '\n') fail(c, "newline in string");
    if (ch == '\\') {
      if (c.done()) fail(c, "unterminated escape");
      const char esc = c.take();
      switch (esc) {
        case '"': out.push_back('"'); break;
        case '\\': out.push_back('\\'); break;
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        default: fail(c, std::string("unsupported escape \\") + esc);
      }
    } else {
      out.push_back(ch);
    }
  }
  return out;
}

ordered_json parse_value(Cursor& c);

ordered_json parse_array(Cursor& c) {
  c.take();  // '['
  ordered_json arr = ordered_json::array();
  while (true) {
    c.skip_ws_and_comments();
    if (c.done()) fail(c, "unterminated array");
    if (c.peek() == ']') {
      c.take();
      return arr;
    }
    arr.push_back(parse_value(c));
    c.skip_ws_and_comments();
    if (c.done()) fail(c, "unterminated array");
    if (c.peek() == ',') {
      c.take();
    } else if (c.peek() != ']') {
      fail(c, "expected ',' or ']' in array");
    }
  }
}

ordered_json parse_number(Cursor& c) {
  std::string token;
  bool is_float = false;
  while (!c.done()) {
    const char ch = c.peek();
    if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '+' || ch == '-') {
      token.push_back(c.take());
    } else if (ch == '.' || ch == 'e' || ch == 'E') {
      is_float = true;
      token.push_back(c.take());
    } else if (ch == '_') {
      c.take();  // digit separator
    } else {
      break;
    }
  }
  if (token.empty()) fail(c, "expected a number");
  const char* begin = token.c_str();
  char* end = nullptr;
  if (is_float) {
    const double v = std::strtod(begin, &end);
    if (end != begin + token.size()) fail(c, "malformed float '" + token + "'");
    return v;
  }
  const long long v = std::strtoll(begin, &end, 10);
  if (end != begin + token.size()) fail(c, "malformed integer '" + token + "'");
  return v;
}

ordered_json parse_value(Cursor& c) {
  if (c.done()) fail(c, "expected a value");
  const char ch = c.peek();
  if (ch == '"') return parse_string(c);
  if (ch == '[') return parse_array(c);
  if (std::isalpha(static_cast<unsigned char>(ch))) {
    const std::string word = parse_bare_key(c);
    if (word == "true") return true;
    if (word == "false") return false;
    fail(c, "unexpected token '" + word + "'");
  }
  return parse_number(c);
}

}  // namespace

nlohmann::ordered_json parse_toml_lite(const std::string& text) {
  Cursor c{text};
  ordered_json root = ordered_json::object();
  ordered_json* table = &root;

  while (true) {
    c.skip_ws_and_comments();
    if (c.done()) break;

    if (c.peek() == '[') {
      c.take();
      table = &root;
      while (true) {
        c.skip_ws_inline();
        const std::string segment = parse_bare_key(c);
        table = &(*table)[segment];
        if (!table->is_object() && !table->is_null()) {
          fail(c, "table name collides with an existing key: " + segment);
        }
        if (table->is_null()) *table = ordered_json::object();
        c.skip_ws_inline();
        if (c.done()) fail(c, "unterminated table header");
        if (c.peek() == '.') {
          c.take();
          continue;
        }
        if (c.peek() == ']') {
          c.take();
          break;
        }
        fail(c, "expected '.' or ']' in table header");
      }
      continue;
    }

    const long key_line = c.line;
    const std::string key = parse_bare_key(c);
    c.skip_ws_inline();
    if (c.done() || c.peek() != '=') {
      throw ParseError("toml: expected '=' after key '" + key + "'", key_line);
    }
    c.take();
    c.skip_ws_inline();
    if (table->contains(key)) {
      throw ParseError("toml: duplicate key '" + key + "'", key_line);
    }
    (*table)[key] = parse_value(c);

    c.skip_ws_inline();
    if (!c.done() && c.peek() == '#') {
      while (!c.done() && c.peek() != '\n') c.take();
    }
    if (!c.done() && c.peek() != '\n' && c.peek() != '\r') {
      fail(c, "unexpected content after value for key '" + key + "'");
    }
  }
  return root;
}

nlohmann::ordered_json parse_toml_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_toml_lite(buf.str());
}

}  // namespace rdeq
