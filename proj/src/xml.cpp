#include "wsids/xml.hpp"

#include <algorithm>
#include <cstdint>
#include <set>
#include <vector>

#include "wsids/error.hpp"

namespace wsids {
namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

bool is_name_start(unsigned char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_' || c == ':' || c >= 0x80;
}

bool is_name_char(unsigned char c) {
  return is_name_start(c) || (c >= '0' && c <= '9') || c == '-' || c == '.';
}

bool is_xml_char(std::uint32_t cp) {
  return cp == 0x9 || cp == 0xA || cp == 0xD || (cp >= 0x20 && cp <= 0xD7FF) ||
         (cp >= 0xE000 && cp <= 0xFFFD) || (cp >= 0x10000 && cp <= 0x10FFFF);
}

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

// Returns the offset of the first invalid byte, or npos.
std::size_t find_invalid_utf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t len = 0;
    std::uint32_t cp = 0;
    if (c < 0x80) {
      len = 1;
      cp = c;
    } else if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    } else {
      return i;
    }
    if (i + len > s.size()) return i;
    for (std::size_t k = 1; k < len; ++k) {
      const auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xC0) != 0x80) return i;
      cp = (cp << 6) | (cc & 0x3F);
    }
    const bool overlong = (len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000);
    if (overlong || !is_xml_char(cp)) return i;
    i += len;
  }
  return std::string_view::npos;
}

class Reader {
 public:
  Reader(std::string_view in, const ParseOptions& options) : in_(in), options_(options) {}

  LabeledTree run() {
    if (in_.substr(0, 3) == "\xEF\xBB\xBF") pos_ = 3;
    if (const auto bad = find_invalid_utf8(in_.substr(pos_)); bad != std::string_view::npos) {
      pos_ += bad;
      fail("invalid character");
    }
    skip_misc(true);
    if (at_end() || peek() != '<') fail("expected root element");
    return parse_elements();
  }

 private:
  struct Frame {
    NodeId node;
    std::string name;
    std::string text;
    bool has_children = false;
  };

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorKind::MalformedXml, what + " at offset " + std::to_string(pos_));
  }

  bool at_end() const { return pos_ >= in_.size(); }
  char peek() const { return in_[pos_]; }
  bool starts_with(std::string_view s) const { return in_.substr(pos_, s.size()) == s; }

  void skip_space() {
    while (!at_end() && is_space(peek())) ++pos_;
  }

  void expect(std::string_view s) {
    if (!starts_with(s)) fail("expected '" + std::string(s) + "'");
    pos_ += s.size();
  }

  void skip_past(std::string_view terminator, const char* what) {
    const auto end = in_.find(terminator, pos_);
    if (end == std::string_view::npos) fail(std::string("unterminated ") + what);
    pos_ = end + terminator.size();
  }

  // Whitespace, comments and processing instructions outside the root.
  void skip_misc(bool prolog) {
    for (;;) {
      skip_space();
      if (starts_with("<?")) {
        skip_past("?>", "processing instruction");
      } else if (starts_with("<!--")) {
        skip_past("-->", "comment");
      } else if (starts_with("<!DOCTYPE") || starts_with("<!doctype")) {
        fail("DOCTYPE declarations are not accepted");
      } else if (!prolog && !at_end()) {
        fail("content after the root element");
      } else {
        return;
      }
    }
  }

  std::string read_name() {
    const std::size_t start = pos_;
    if (at_end() || !is_name_start(static_cast<unsigned char>(peek()))) fail("expected a name");
    while (!at_end() && is_name_char(static_cast<unsigned char>(peek()))) ++pos_;
    return std::string(in_.substr(start, pos_ - start));
  }

  // Decodes character data up to (not including) any byte in `stops`.
  void read_chars(std::string& out, std::string_view stops) {
    while (!at_end() && stops.find(peek()) == std::string_view::npos) {
      const char c = peek();
      if (c == '&') {
        decode_reference(out);
        continue;
      }
      const auto uc = static_cast<unsigned char>(c);
      if (uc < 0x20 && !is_space(c)) fail("invalid character");
      out += c;
      ++pos_;
    }
  }

  void decode_reference(std::string& out) {
    const auto semi = in_.find(';', pos_);
    if (semi == std::string_view::npos || semi - pos_ > 12) fail("unterminated entity reference");
    const auto name = in_.substr(pos_ + 1, semi - pos_ - 1);
    if (name == "lt") {
      out += '<';
    } else if (name == "gt") {
      out += '>';
    } else if (name == "amp") {
      out += '&';
    } else if (name == "apos") {
      out += '\'';
    } else if (name == "quot") {
      out += '"';
    } else if (name.size() > 1 && name[0] == '#') {
      const bool hex = name[1] == 'x';
      const auto digits = name.substr(hex ? 2 : 1);
      if (digits.empty()) fail("empty character reference");
      std::uint32_t cp = 0;
      for (char d : digits) {
        std::uint32_t v;
        if (d >= '0' && d <= '9') {
          v = static_cast<std::uint32_t>(d - '0');
        } else if (hex && d >= 'a' && d <= 'f') {
          v = static_cast<std::uint32_t>(d - 'a' + 10);
        } else if (hex && d >= 'A' && d <= 'F') {
          v = static_cast<std::uint32_t>(d - 'A' + 10);
        } else {
          fail("bad character reference");
        }
        cp = cp * (hex ? 16 : 10) + v;
        if (cp > 0x10FFFF) fail("character reference out of range");
      }
      if (!is_xml_char(cp)) fail("character reference to an invalid character");
      append_utf8(out, cp);
    } else {
      fail("undefined entity '" + std::string(name) + "'");
    }
    pos_ = semi + 1;
  }

  void check_limits(std::size_t depth, std::size_t nodes) const {
    if (options_.max_depth && depth > options_.max_depth) {
      throw Error(ErrorKind::LimitExceeded,
                  "element depth exceeds " + std::to_string(options_.max_depth));
    }
    if (options_.max_nodes && nodes > options_.max_nodes) {
      throw Error(ErrorKind::LimitExceeded,
                  "element count exceeds " + std::to_string(options_.max_nodes));
    }
  }

  // Reads "<name attr=...>" or "<name .../>" with pos_ at '<'. Returns the
  // element name and fills attributes; sets self_closing.
  std::string read_start_tag(std::vector<std::pair<std::string, std::string>>& attributes,
                             bool& self_closing) {
    ++pos_;
    std::string name = read_name();
    std::set<std::string, std::less<>> seen;
    for (;;) {
      const std::size_t before = pos_;
      skip_space();
      if (at_end()) fail("unterminated start tag");
      if (starts_with("/>")) {
        pos_ += 2;
        self_closing = true;
        return name;
      }
      if (peek() == '>') {
        ++pos_;
        self_closing = false;
        return name;
      }
      if (pos_ == before) fail("expected whitespace before attribute");
      std::string attr = read_name();
      skip_space();
      expect("=");
      skip_space();
      if (at_end() || (peek() != '"' && peek() != '\'')) fail("expected quoted attribute value");
      const char quote = peek();
      ++pos_;
      std::string value;
      const char stops[] = {quote, '<', '\0'};
      read_chars(value, std::string_view(stops, 2));
      if (at_end() || peek() != quote) fail("unterminated or invalid attribute value");
      ++pos_;
      if (!seen.insert(attr).second) fail("duplicate attribute '" + attr + "'");
      attributes.emplace_back(std::move(attr), std::move(value));
    }
  }

  NodeId open_element(std::optional<TreeBuilder>& builder, std::vector<Frame>& stack,
                      bool& self_closing) {
    std::vector<std::pair<std::string, std::string>> attributes;
    std::string name = read_start_tag(attributes, self_closing);
    check_limits(stack.size() + 1, (builder ? builder->size() : 0) + 1);
    NodeId id;
    if (!builder) {
      builder.emplace(name);
      id = 0;
    } else {
      stack.back().has_children = true;
      id = builder->add_child(stack.back().node, name);
    }
    Frame frame{id, std::move(name), {}, false};
    if (options_.attributes_as_leaves) {
      for (auto& [attr, value] : attributes) {
        if (attr == "xmlns" || attr.rfind("xmlns:", 0) == 0) continue;
        check_limits(stack.size() + 2, builder->size() + 1);
        const NodeId leaf = builder->add_child(id, "@" + attr);
        builder->set_text(leaf, std::move(value));
        frame.has_children = true;
      }
    }
    if (self_closing) {
      finish(*builder, frame);
    } else {
      stack.push_back(std::move(frame));
    }
    return id;
  }

  void finish(TreeBuilder& builder, Frame& frame) {
    if (frame.has_children) {
      const bool blank = std::all_of(frame.text.begin(), frame.text.end(), is_space);
      if (!blank) fail("mixed content in element '" + frame.name + "'");
    } else if (!frame.text.empty()) {
      builder.set_text(frame.node, std::move(frame.text));
    }
  }

  LabeledTree parse_elements() {
    std::optional<TreeBuilder> builder;
    std::vector<Frame> stack;
    bool self_closing = false;
    open_element(builder, stack, self_closing);
    while (!stack.empty()) {
      if (at_end()) fail("unexpected end of document inside '" + stack.back().name + "'");
      if (peek() != '<') {
        read_chars(stack.back().text, "<");
        continue;
      }
      if (starts_with("</")) {
        pos_ += 2;
        const std::string name = read_name();
        skip_space();
        expect(">");
        if (name != stack.back().name) {
          fail("end tag '" + name + "' does not match '" + stack.back().name + "'");
        }
        finish(*builder, stack.back());
        stack.pop_back();
      } else if (starts_with("<!--")) {
        skip_past("-->", "comment");
      } else if (starts_with("<![CDATA[")) {
        pos_ += 9;
        const auto end = in_.find("]]>", pos_);
        if (end == std::string_view::npos) fail("unterminated CDATA section");
        const auto data = in_.substr(pos_, end - pos_);
        for (char c : data) {
          if (static_cast<unsigned char>(c) < 0x20 && !is_space(c)) fail("invalid character");
        }
        stack.back().text.append(data);
        pos_ = end + 3;
      } else if (starts_with("<?")) {
        skip_past("?>", "processing instruction");
      } else if (starts_with("<!")) {
        fail("markup declarations are not accepted");
      } else {
        open_element(builder, stack, self_closing);
      }
    }
    skip_misc(false);
    return std::move(*builder).build();
  }

  std::string_view in_;
  ParseOptions options_;
  std::size_t pos_ = 0;
};

void append_indent(std::string& out, const WriteOptions& options, int level) {
  if (options.indent_width > 0) out.append(static_cast<std::size_t>(level * options.indent_width), ' ');
}

}  // namespace

LabeledTree parse_document(std::string_view xml, const ParseOptions& options) {
  return Reader(xml, options).run();
}

std::string escape_xml(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      case '\r': out += "&#13;"; break;
      default: out += c;
    }
  }
  return out;
}

void append_xml(std::string& out, const LabeledTree& tree, NodeId node, const WriteOptions& options) {
  const bool pretty = options.indent_width > 0;
  // (node, closing) pairs; iterative so deep trees cannot exhaust the stack.
  std::vector<std::pair<NodeId, bool>> stack{{node, false}};
  std::vector<int> level(tree.size(), 0);
  level[node] = options.base_level;
  while (!stack.empty()) {
    const auto [n, closing] = stack.back();
    stack.pop_back();
    const auto& label = tree.label(n);
    if (closing) {
      append_indent(out, options, level[n]);
      out += "</" + label + ">";
      if (pretty) out += '\n';
      continue;
    }
    append_indent(out, options, level[n]);
    out += '<' + label + '>';
    if (tree.is_leaf(n)) {
      if (tree.text(n)) out += escape_xml(*tree.text(n));
      out += "</" + label + ">";
      if (pretty) out += '\n';
      continue;
    }
    if (pretty) out += '\n';
    stack.emplace_back(n, true);
    const auto kids = tree.children(n);
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) {
      level[*it] = level[n] + 1;
      stack.emplace_back(*it, false);
    }
  }
}

std::string serialize_document(const LabeledTree& tree, const WriteOptions& options) {
  std::string out;
  if (!tree.empty()) append_xml(out, tree, LabeledTree::root(), options);
  return out;
}

}  // namespace wsids
