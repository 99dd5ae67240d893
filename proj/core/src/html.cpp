#include "apisum/html.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <utility>

namespace apisum::html {

namespace {

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

constexpr std::array<std::pair<std::string_view, std::uint32_t>, 16> kNamedEntities{{
    {"amp", '&'},      {"lt", '<'},        {"gt", '>'},        {"quot", '"'},
    {"apos", '\''},    {"nbsp", ' '},      {"hellip", 0x2026}, {"mdash", 0x2014},
    {"ndash", 0x2013}, {"lsquo", 0x2018},  {"rsquo", 0x2019},  {"ldquo", 0x201C},
    {"rdquo", 0x201D}, {"copy", 0x00A9},   {"reg", 0x00AE},    {"trade", 0x2122},
}};

// Decodes the reference starting at text[pos] == '&'. On success appends the
// character and returns the index just past ';'. Otherwise returns pos.
std::size_t decode_one(std::string_view text, std::size_t pos, std::string& out) {
  const std::size_t semi = text.find(';', pos + 1);
  if (semi == std::string_view::npos || semi - pos > 12) return pos;
  const std::string_view ref = text.substr(pos + 1, semi - pos - 1);
  if (ref.empty()) return pos;
  if (ref[0] == '#') {
    std::uint32_t cp = 0;
    bool hex = ref.size() > 1 && (ref[1] == 'x' || ref[1] == 'X');
    std::size_t i = hex ? 2 : 1;
    if (i >= ref.size()) return pos;
    for (; i < ref.size(); ++i) {
      const char c = ref[i];
      int digit = -1;
      if (c >= '0' && c <= '9') digit = c - '0';
      else if (hex && c >= 'a' && c <= 'f') digit = c - 'a' + 10;
      else if (hex && c >= 'A' && c <= 'F') digit = c - 'A' + 10;
      if (digit < 0) return pos;
      cp = cp * (hex ? 16 : 10) + static_cast<std::uint32_t>(digit);
      if (cp > 0x10FFFF) return pos;
    }
    if (cp == 0 || (cp >= 0xD800 && cp <= 0xDFFF)) return pos;
    append_utf8(out, cp);
    return semi + 1;
  }
  for (const auto& [name, cp] : kNamedEntities) {
    if (name == ref) {
      append_utf8(out, cp);
      return semi + 1;
    }
  }
  return pos;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

struct Tag {
  std::string name;  // lowercase
  bool closing = false;
};

// Scans one markup construct at text[pos] == '<'. Returns the index past it
// and fills `tag` when it was an element tag. Comments and declarations yield
// an empty tag name. Returns pos when '<' does not start markup.
std::size_t scan_markup(std::string_view text, std::size_t pos, Tag& tag) {
  tag = Tag{};
  if (pos + 1 >= text.size()) return pos;
  const char next = text[pos + 1];
  if (text.substr(pos, 4) == "<!--") {
    const std::size_t end = text.find("-->", pos + 4);
    return end == std::string_view::npos ? text.size() : end + 3;
  }
  if (next == '!' || next == '?') {
    const std::size_t end = text.find('>', pos);
    return end == std::string_view::npos ? text.size() : end + 1;
  }
  std::size_t i = pos + 1;
  if (next == '/') {
    tag.closing = true;
    ++i;
  }
  const std::size_t name_start = i;
  while (i < text.size() && std::isalnum(static_cast<unsigned char>(text[i]))) ++i;
  if (i == name_start || !std::isalpha(static_cast<unsigned char>(text[name_start]))) {
    tag = Tag{};
    return pos;
  }
  tag.name = lower(text.substr(name_start, i - name_start));
  char quote = 0;
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (quote) {
      if (c == quote) quote = 0;
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '>') {
      return i + 1;
    }
  }
  return text.size();
}

bool is_block_element(std::string_view name) {
  static constexpr std::array<std::string_view, 22> kBlock{
      "p",  "div", "br",  "li",    "ul",         "ol", "h1", "h2", "h3", "h4", "h5",
      "h6", "hr",  "table", "tr",  "blockquote", "dl", "dt", "dd", "td", "th", "section"};
  return std::find(kBlock.begin(), kBlock.end(), name) != kBlock.end();
}

// Calls on_text(decoded_text) and on_tag(tag) in document order.
template <typename OnText, typename OnTag>
void walk(std::string_view html, OnText&& on_text, OnTag&& on_tag) {
  std::string run;
  std::size_t i = 0;
  auto flush = [&] {
    if (!run.empty()) {
      on_text(run);
      run.clear();
    }
  };
  while (i < html.size()) {
    const char c = html[i];
    if (c == '<') {
      Tag tag;
      const std::size_t end = scan_markup(html, i, tag);
      if (end != i) {
        flush();
        if (!tag.name.empty()) on_tag(tag);
        i = end;
        continue;
      }
    } else if (c == '&') {
      const std::size_t end = decode_one(html, i, run);
      if (end != i) {
        i = end;
        continue;
      }
    }
    run += c;
    ++i;
  }
  flush();
}

}  // namespace

std::string decode_entities(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == '&') {
      const std::size_t end = decode_one(text, i, out);
      if (end != i) {
        i = end;
        continue;
      }
    }
    out += text[i++];
  }
  return out;
}

std::vector<CodeSpan> code_spans(std::string_view html) {
  std::vector<CodeSpan> spans;
  int pre_depth = 0;
  bool in_code = false;
  CodeSpan current;
  auto close_code = [&] {
    if (!current.text.empty()) spans.push_back(std::move(current));
    current = CodeSpan{};
    in_code = false;
  };
  walk(
      html,
      [&](const std::string& text) {
        if (in_code) current.text += text;
      },
      [&](const Tag& tag) {
        if (tag.name == "pre") {
          if (tag.closing) {
            if (in_code) close_code();
            pre_depth = std::max(0, pre_depth - 1);
          } else {
            ++pre_depth;
          }
        } else if (tag.name == "code") {
          if (tag.closing) {
            if (in_code) close_code();
          } else if (!in_code) {
            in_code = true;
            current.in_pre = pre_depth > 0;
          }
        } else if (tag.name == "br" && in_code) {
          current.text += '\n';
        }
      });
  if (in_code) close_code();
  return spans;
}

std::string strip_html(std::string_view html) {
  std::string raw;
  int pre_depth = 0;
  walk(
      html,
      [&](const std::string& text) {
        if (pre_depth > 0) return;
        for (char c : text) raw += (c == '\n' || c == '\r' || c == '\t') ? ' ' : c;
      },
      [&](const Tag& tag) {
        if (tag.name == "pre") {
          pre_depth = tag.closing ? std::max(0, pre_depth - 1) : pre_depth + 1;
          raw += '\n';
        } else if (is_block_element(tag.name)) {
          raw += '\n';
        }
      });

  // Trim lines, collapse spaces, drop blank lines.
  std::string out;
  std::string line;
  auto emit_line = [&] {
    while (!line.empty() && line.back() == ' ') line.pop_back();
    if (!line.empty()) {
      if (!out.empty()) out += '\n';
      out += line;
    }
    line.clear();
  };
  for (char c : raw) {
    if (c == '\n') {
      emit_line();
    } else if (c == ' ') {
      if (!line.empty() && line.back() != ' ') line += ' ';
    } else {
      line += c;
    }
  }
  emit_line();
  return out;
}

}  // namespace apisum::html
