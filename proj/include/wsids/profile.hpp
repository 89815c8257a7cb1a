#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "wsids/forest.hpp"
#include "wsids/tree.hpp"

namespace wsids {

enum class PatternKind { Literal, Shape };

std::string_view to_string(PatternKind kind) noexcept;

// Anchored regular expression accepting every value it was learned from.
struct REPattern {
  std::string pattern;
  PatternKind kind = PatternKind::Literal;

  friend bool operator==(const REPattern&, const REPattern&) = default;
};

struct ProfileParams {
  // Up to this many distinct values are kept as a literal alternation.
  std::size_t literal_limit = 16;
  // Added to both ends of every learned run length (the lower end never
  // drops below 1).
  std::size_t slack = 0;
  // More distinct run-class sequences than this collapse into one union
  // class with a total length range.
  std::size_t max_alternatives = 8;
};

// Shape generalization: each value is split into maximal runs of digits,
// letters (including '_' and any non-ASCII byte), whitespace and other
// characters. Values with the same run-class sequence share one sub-pattern
// with per-run length ranges.
REPattern generalize(const std::vector<std::string>& values, const ProfileParams& params = {});

// ^(a|b)$ over the sorted distinct values, regex-escaped.
REPattern literal_alternation(const std::vector<std::string>& values);

std::string escape_regex(std::string_view text);

enum class MatchResult { Match, Mismatch, UnknownPath };

std::string_view to_string(MatchResult result) noexcept;

struct ProfileEntry {
  REPattern pattern;
  std::size_t min_length = 0;  // observed, in bytes
  std::size_t max_length = 0;

  friend bool operator==(const ProfileEntry&, const ProfileEntry&) = default;
};

class ContentProfile {
 public:
  ContentProfile();
  ContentProfile(const ContentProfile&);
  ContentProfile(ContentProfile&&) noexcept;
  ContentProfile& operator=(const ContentProfile&);
  ContentProfile& operator=(ContentProfile&&) noexcept;
  ~ContentProfile();

  // Throws InvalidArgument if the pattern does not compile.
  void add(std::string path, ProfileEntry entry);

  const std::map<std::string, ProfileEntry, std::less<>>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  // Full-string match of `text` against the entry for `path` (labels joined
  // by '/').
  MatchResult match(std::string_view path, std::string_view text) const;

  // "# ..." header, then one "path<TAB>kind<TAB>min<TAB>max<TAB>pattern" line
  // per entry, sorted by path.
  std::string to_text() const;
  // Throws SchemaViolation.
  static ContentProfile parse(std::string_view text);

  friend bool operator==(const ContentProfile& a, const ContentProfile& b) { return a.entries_ == b.entries_; }

 private:
  struct Compiled;
  std::map<std::string, ProfileEntry, std::less<>> entries_;
  std::map<std::string, std::shared_ptr<const Compiled>, std::less<>> compiled_;
};

// Collects every leaf value per root-to-leaf path (a leaf without text
// contributes ""). Paths that never carried text get no entry. Throws
// EmptyForest.
ContentProfile build_profile(const Forest& forest, const ProfileParams& params = {});

}  // namespace wsids
