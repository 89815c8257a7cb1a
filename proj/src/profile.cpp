#include "wsids/profile.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <set>

#include <boost/regex.hpp>

#include "wsids/error.hpp"

namespace wsids {

struct ContentProfile::Compiled {
  boost::regex re;
};

namespace {

enum class Cls : char { Digit = 'D', Letter = 'L', Space = 'S', Other = 'O' };

Cls classify(unsigned char c) {
  if (c >= '0' && c <= '9') return Cls::Digit;
  if ((c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_' || c >= 0x80) return Cls::Letter;
  if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') return Cls::Space;
  return Cls::Other;
}

std::string class_regex(Cls c, bool non_ascii) {
  switch (c) {
    case Cls::Digit: return "\\d";
    case Cls::Letter: return non_ascii ? "(?:[A-Za-z_]|[^\\x00-\\x7F])" : "[A-Za-z_]";
    case Cls::Space: return "\\s";
    case Cls::Other: return "[^A-Za-z0-9_\\s]";
  }
  return {};
}

struct Run {
  Cls cls;
  std::size_t length;
};

std::vector<Run> tokenize(std::string_view value) {
  std::vector<Run> runs;
  for (unsigned char c : value) {
    const Cls cls = classify(c);
    if (!runs.empty() && runs.back().cls == cls) {
      ++runs.back().length;
    } else {
      runs.push_back({cls, 1});
    }
  }
  return runs;
}

struct Range {
  std::size_t lo;
  std::size_t hi;
};

std::string quantifier(std::size_t lo, std::size_t hi) {
  return "{" + std::to_string(lo) + "," + std::to_string(hi) + "}";
}

boost::regex compile(const std::string& pattern) {
  return boost::regex(pattern, boost::regex::perl);
}

[[noreturn]] void schema(const std::string& what) { throw Error(ErrorKind::SchemaViolation, what); }

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto tab = line.find('\t', pos);
    out.push_back(line.substr(pos, tab == std::string_view::npos ? std::string_view::npos : tab - pos));
    if (tab == std::string_view::npos) break;
    pos = tab + 1;
  }
  return out;
}

std::size_t parse_count(std::string_view text, const std::string& where) {
  std::size_t value = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || end != text.data() + text.size()) {
    schema(where + ": bad length '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

std::string_view to_string(PatternKind kind) noexcept {
  return kind == PatternKind::Literal ? "literal" : "shape";
}

std::string_view to_string(MatchResult result) noexcept {
  switch (result) {
    case MatchResult::Match: return "Match";
    case MatchResult::Mismatch: return "Mismatch";
    case MatchResult::UnknownPath: return "UnknownPath";
  }
  return "?";
}

std::string escape_regex(std::string_view text) {
  static constexpr std::string_view kSpecial = "\\^$.|?*+()[]{}";
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : text) {
    if (c < 0x20 || c == 0x7F) {
      out += "\\x";
      out += kHex[c >> 4];
      out += kHex[c & 0xF];
    } else {
      if (kSpecial.find(static_cast<char>(c)) != std::string_view::npos) out += '\\';
      out += static_cast<char>(c);
    }
  }
  return out;
}

REPattern literal_alternation(const std::vector<std::string>& values) {
  const std::set<std::string> distinct(values.begin(), values.end());
  std::string body;
  bool first = true;
  for (const auto& v : distinct) {
    if (!first) body += '|';
    body += escape_regex(v);
    first = false;
  }
  if (distinct.size() == 1) return {"^" + body + "$", PatternKind::Literal};
  return {"^(" + body + ")$", PatternKind::Literal};
}

REPattern generalize(const std::vector<std::string>& values, const ProfileParams& params) {
  bool non_ascii = false;
  std::map<std::string, std::vector<Range>> groups;  // class sequence -> run ranges
  for (const auto& value : values) {
    non_ascii = non_ascii || std::any_of(value.begin(), value.end(), [](char c) {
                  return static_cast<unsigned char>(c) >= 0x80;
                });
    const auto runs = tokenize(value);
    std::string key;
    for (const auto& r : runs) key += static_cast<char>(r.cls);
    auto [it, fresh] = groups.try_emplace(key);
    if (fresh) {
      for (const auto& r : runs) it->second.push_back({r.length, r.length});
    } else {
      for (std::size_t i = 0; i < runs.size(); ++i) {
        it->second[i].lo = std::min(it->second[i].lo, runs[i].length);
        it->second[i].hi = std::max(it->second[i].hi, runs[i].length);
      }
    }
  }

  const auto widen = [&](Range r) {
    return Range{r.lo > params.slack + 1 ? r.lo - params.slack : 1, r.hi + params.slack};
  };

  if (groups.size() > params.max_alternatives) {
    std::set<Cls> used;
    std::size_t lo = SIZE_MAX;
    std::size_t hi = 0;
    for (const auto& [key, ranges] : groups) {
      std::size_t sum_lo = 0;
      std::size_t sum_hi = 0;
      for (std::size_t i = 0; i < ranges.size(); ++i) {
        used.insert(static_cast<Cls>(key[i]));
        const Range w = widen(ranges[i]);
        sum_lo += w.lo;
        sum_hi += w.hi;
      }
      lo = std::min(lo, sum_lo);
      hi = std::max(hi, sum_hi);
    }
    std::string alt;
    for (Cls c : used) {
      if (!alt.empty()) alt += '|';
      alt += class_regex(c, non_ascii);
    }
    return {"^(?:" + alt + ")" + quantifier(lo, hi) + "$", PatternKind::Shape};
  }

  std::vector<std::string> shapes;
  for (const auto& [key, ranges] : groups) {
    std::string shape;
    for (std::size_t i = 0; i < ranges.size(); ++i) {
      const Range w = widen(ranges[i]);
      shape += class_regex(static_cast<Cls>(key[i]), non_ascii) + quantifier(w.lo, w.hi);
    }
    shapes.push_back(std::move(shape));
  }
  if (shapes.size() == 1) return {"^" + shapes.front() + "$", PatternKind::Shape};
  std::string joined;
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    if (i) joined += '|';
    joined += shapes[i];
  }
  return {"^(?:" + joined + ")$", PatternKind::Shape};
}

ContentProfile::ContentProfile() = default;
ContentProfile::ContentProfile(const ContentProfile&) = default;
ContentProfile::ContentProfile(ContentProfile&&) noexcept = default;
ContentProfile& ContentProfile::operator=(const ContentProfile&) = default;
ContentProfile& ContentProfile::operator=(ContentProfile&&) noexcept = default;
ContentProfile::~ContentProfile() = default;

void ContentProfile::add(std::string path, ProfileEntry entry) {
  std::shared_ptr<const Compiled> compiled;
  try {
    compiled = std::make_shared<const Compiled>(Compiled{compile(entry.pattern.pattern)});
  } catch (const boost::regex_error& e) {
    throw Error(ErrorKind::InvalidArgument, "pattern for " + path + " does not compile: " + e.what());
  }
  compiled_[path] = std::move(compiled);
  entries_[std::move(path)] = std::move(entry);
}

MatchResult ContentProfile::match(std::string_view path, std::string_view text) const {
  const auto it = compiled_.find(path);
  if (it == compiled_.end()) return MatchResult::UnknownPath;
  try {
    return boost::regex_match(text.begin(), text.end(), it->second->re) ? MatchResult::Match
                                                                       : MatchResult::Mismatch;
  } catch (const std::runtime_error&) {
    return MatchResult::Mismatch;  // matcher gave up on a pathological input
  }
}

std::string ContentProfile::to_text() const {
  std::string out = "# path\tkind\tmin_length\tmax_length\tpattern\n";
  for (const auto& [path, e] : entries_) {
    out += path;
    out += '\t';
    out += to_string(e.pattern.kind);
    out += '\t';
    out += std::to_string(e.min_length);
    out += '\t';
    out += std::to_string(e.max_length);
    out += '\t';
    out += e.pattern.pattern;
    out += '\n';
  }
  return out;
}

ContentProfile ContentProfile::parse(std::string_view text) {
  ContentProfile profile;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    const auto line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const std::string where = "profile line " + std::to_string(line_no);
    const auto fields = split_tabs(line);
    if (fields.size() != 5) schema(where + ": expected 5 tab-separated fields");
    if (fields[0].empty()) schema(where + ": empty path");
    ProfileEntry entry;
    if (fields[1] == "literal") {
      entry.pattern.kind = PatternKind::Literal;
    } else if (fields[1] == "shape") {
      entry.pattern.kind = PatternKind::Shape;
    } else {
      schema(where + ": unknown kind '" + std::string(fields[1]) + "'");
    }
    entry.min_length = parse_count(fields[2], where);
    entry.max_length = parse_count(fields[3], where);
    if (entry.min_length > entry.max_length) schema(where + ": min length exceeds max length");
    entry.pattern.pattern = std::string(fields[4]);
    std::string path(fields[0]);
    if (profile.entries_.count(path)) schema(where + ": duplicate path " + path);
    try {
      profile.add(std::move(path), std::move(entry));
    } catch (const Error& e) {
      schema(where + ": " + e.what());
    }
  }
  return profile;
}

ContentProfile build_profile(const Forest& forest, const ProfileParams& params) {
  if (forest.empty()) throw Error(ErrorKind::EmptyForest, "cannot profile an empty forest");
  std::map<std::string, std::vector<std::string>> values;
  for (const auto& doc : forest) {
    const auto& tree = doc.tree;
    for (NodeId n = 0; n < tree.size(); ++n) {
      if (!tree.is_leaf(n)) continue;
      values[tree.path_to(n).joined()].push_back(tree.text(n).value_or(""));
    }
  }

  ContentProfile profile;
  for (auto& [path, vals] : values) {
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    if (vals.size() == 1 && vals.front().empty()) continue;  // never carried text
    ProfileEntry entry;
    entry.pattern = vals.size() <= params.literal_limit ? literal_alternation(vals) : generalize(vals, params);
    entry.min_length = SIZE_MAX;
    for (const auto& v : vals) {
      entry.min_length = std::min(entry.min_length, v.size());
      entry.max_length = std::max(entry.max_length, v.size());
    }
    profile.add(path, std::move(entry));
  }
  return profile;
}

}  // namespace wsids
