#include "tmkit/core/dot.hpp"

#include <algorithm>
#include <tuple>

namespace tmkit {

std::string dot_quote(std::string_view s) {
  std::string out = "\"";
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (c == '"') {
      out += "\\\"";
    } else if (c == '\\' && i + 1 < s.size() && s[i + 1] == 'n') {
      out += "\\n";  // keep DOT line breaks
      ++i;
    } else if (c == '\\') {
      out += "\\\\";
    } else if (c == '\n') {
      out += "\\n";
    } else {
      out.push_back(c);
    }
  }
  return out + "\"";
}

DotWriter::DotWriter(std::string_view graph_name) {
  out_ = "digraph " + dot_quote(graph_name) + " {\n";
  out_ += "  node [fontname=\"Helvetica\"];\n";
}

void DotWriter::node(std::string_view id, std::string_view label, std::string_view shape) {
  out_ += "  " + dot_quote(id) + " [label=" + dot_quote(label) + ", shape=" + std::string(shape) +
          "];\n";
}

void DotWriter::edge(std::string_view from, std::string_view to, bool dashed,
                     std::string_view label) {
  out_ += "  " + dot_quote(from) + " -> " + dot_quote(to);
  std::string attrs;
  if (dashed) attrs += "style=dashed";
  if (!label.empty()) attrs += std::string(attrs.empty() ? "" : ", ") + "label=" + dot_quote(label);
  if (!attrs.empty()) out_ += " [" + attrs + "]";
  out_ += ";\n";
}

void DotWriter::cluster(std::string_view label, const std::vector<std::string>& members) {
  out_ += "  subgraph " + dot_quote("cluster_" + std::to_string(clusters_++)) + " {\n";
  out_ += "    label=" + dot_quote(label) + ";\n";
  for (const auto& m : members) out_ += "    " + dot_quote(m) + ";\n";
  out_ += "  }\n";
}

std::string DotWriter::finish() { return out_ + "}\n"; }

std::string export_dot(const StaticModel& model) {
  DotWriter w(model.name().empty() ? "model" : model.name());

  std::vector<const ActionNode*> nodes;
  for (const auto& n : model.nodes()) nodes.push_back(&n);
  std::sort(nodes.begin(), nodes.end(),
            [](const ActionNode* a, const ActionNode* b) { return a->id < b->id; });
  for (const auto* n : nodes) {
    w.node(n->id, n->id + "\\n" + to_string(n->kind) + " " + n->thing + "\\n[" + n->thimac + "]",
           n->kind == ActionKind::process ? "box" : "ellipse");
  }

  std::vector<FlowEdge> flows(model.flows().begin(), model.flows().end());
  std::sort(flows.begin(), flows.end(), [](const FlowEdge& a, const FlowEdge& b) {
    return std::tie(a.from, a.to) < std::tie(b.from, b.to);
  });
  for (const auto& f : flows) w.edge(f.from, f.to, false);

  std::vector<const TriggerEdge*> triggers;
  for (const auto& t : model.triggers()) triggers.push_back(&t);
  std::stable_sort(triggers.begin(), triggers.end(), [](const TriggerEdge* a, const TriggerEdge* b) {
    return std::tie(a->from, a->to) < std::tie(b->from, b->to);
  });
  for (const auto* t : triggers) {
    std::string label;
    if (t->guard) label = to_string(*t->guard);
    if (t->otherwise) label = "else";
    w.edge(t->from, t->to, true, label);
  }
  return w.finish();
}

}  // namespace tmkit
