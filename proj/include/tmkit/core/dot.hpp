#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "tmkit/core/model.hpp"

namespace tmkit {

/// Line-by-line DOT builder. Emits statements in call order; callers sort.
class DotWriter {
 public:
  explicit DotWriter(std::string_view graph_name);

  void node(std::string_view id, std::string_view label, std::string_view shape = "ellipse");
  /// Trigger-like edges are dashed; flows are solid.
  void edge(std::string_view from, std::string_view to, bool dashed, std::string_view label = {});
  void cluster(std::string_view label, const std::vector<std::string>& members);

  std::string finish();

 private:
  std::string out_;
  int clusters_ = 0;
};

std::string dot_quote(std::string_view s);

/// Nodes ordered by id; flows solid, triggers dashed with their guard.
std::string export_dot(const StaticModel& model);

}  // namespace tmkit
