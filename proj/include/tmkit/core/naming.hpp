#pragma once

#include <string_view>

namespace tmkit {

/// Orders names with embedded numbers numerically: E2 < E10 < F1.
bool natural_less(std::string_view a, std::string_view b);

struct NaturalLess {
  bool operator()(std::string_view a, std::string_view b) const { return natural_less(a, b); }
};

}  // namespace tmkit
