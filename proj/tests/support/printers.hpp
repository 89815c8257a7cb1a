#pragma once

// doctest output for library types.

#include <doctest.h>

#include "support.hpp"

namespace doctest {
template <>
struct StringMaker<wsids::LabeledTree> {
  static String convert(const wsids::LabeledTree& t) { return wsids::test::dsl(t).c_str(); }
};
template <>
struct StringMaker<wsids::CanonicalCode> {
  static String convert(const wsids::CanonicalCode& c) { return c.str().c_str(); }
};
}  // namespace doctest
