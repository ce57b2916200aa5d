#include "tmkit/harness/oracle.hpp"

namespace tmkit {

const BoundValue* Binding::find(std::string_view name) const {
  for (const auto& [n, v] : entries) {
    if (n == name) return &v;
  }
  return nullptr;
}

std::string to_string(const Binding& b) {
  std::string out = "{";
  for (std::size_t i = 0; i < b.entries.size(); ++i) {
    const auto& [name, v] = b.entries[i];
    if (i) out += ", ";
    out += name + "=";
    if (v.scalar) {
      out += to_string(*v.scalar);
    } else {
      out += "(";
      bool first = true;
      for (const auto& [k, fv] : v.fields) {
        if (!first) out += ", ";
        first = false;
        out += k + "=" + to_string(fv);
      }
      out += ")";
    }
  }
  return out + "}";
}

namespace {

std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// All count vectors of length `k` whose total is exactly `size`, in
// lexicographic order of the vector.
void compositions(std::size_t k, std::size_t size, std::vector<std::int64_t>& cur,
                  std::vector<std::vector<std::int64_t>>& out) {
  if (cur.size() + 1 == k) {
    cur.push_back(static_cast<std::int64_t>(size));
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (std::size_t c = 0; c <= size; ++c) {
    cur.push_back(static_cast<std::int64_t>(c));
    compositions(k, size - c, cur, out);
    cur.pop_back();
  }
}

const Thimac* store_of(const StaticModel& model, const std::string& name, std::string& err) {
  const auto* t = model.thimac(name);
  if (!t || !t->is_store) {
    err = "unknown store '" + name + "'";
    return nullptr;
  }
  return t;
}

Expected<std::vector<BoundValue>, std::string> dimension(const Generator& g,
                                                         const StaticModel& model,
                                                         const UpstreamValues& upstream) {
  std::vector<BoundValue> out;
  switch (g.kind) {
    case Generator::Kind::values:
      for (const auto& v : g.values) out.push_back({v, {}, {}});
      return out;
    case Generator::Kind::range:
      if (!g.lo || !g.hi) return unexpected("unbounded generator '" + g.name + "'");
      for (auto v = *g.lo; v <= *g.hi; ++v) out.push_back({Value{v}, {}, {}});
      return out;
    case Generator::Kind::store: {
      std::string err;
      const auto* t = store_of(model, g.store, err);
      if (!t) return unexpected(err);
      for (const auto& item : t->store_contents) out.push_back({std::nullopt, item.attrs, {}});
      return out;
    }
    case Generator::Kind::upstream: {
      const auto key = g.upstream_scenario + "." + g.upstream_output;
      const auto it = upstream.find(key);
      if (it == upstream.end()) return unexpected("no upstream output '" + key + "'");
      for (const auto& v : it->second) out.push_back({v, {}, {}});
      return out;
    }
    case Generator::Kind::multiset: {
      if (!g.lo || !g.hi) return unexpected("unbounded generator '" + g.name + "'");
      if (g.elements.empty()) return out;
      for (auto size = std::max<std::int64_t>(0, *g.lo); size <= *g.hi; ++size) {
        std::vector<std::vector<std::int64_t>> vecs;
        std::vector<std::int64_t> cur;
        compositions(g.elements.size(), static_cast<std::size_t>(size), cur, vecs);
        for (const auto& counts : vecs) {
          BoundValue bv;
          for (std::size_t i = 0; i < counts.size(); ++i) {
            bv.fields[g.elements[i].first] = counts[i];
            bv.weights[g.elements[i].first] = g.elements[i].second;
          }
          out.push_back(std::move(bv));
        }
      }
      return out;
    }
  }
  return out;
}

}  // namespace

Expected<std::size_t, std::string> cardinality(const Generator& g, const StaticModel& model,
                                               const UpstreamValues& upstream) {
  switch (g.kind) {
    case Generator::Kind::values:
      return g.values.size();
    case Generator::Kind::range:
      if (!g.lo || !g.hi) return unexpected("unbounded generator '" + g.name + "'");
      return *g.hi < *g.lo ? std::size_t{0} : static_cast<std::size_t>(*g.hi - *g.lo + 1);
    case Generator::Kind::store: {
      std::string err;
      const auto* t = store_of(model, g.store, err);
      if (!t) return unexpected(err);
      return t->store_contents.size();
    }
    case Generator::Kind::upstream: {
      const auto it = upstream.find(g.upstream_scenario + "." + g.upstream_output);
      if (it == upstream.end()) return unexpected("no upstream output");
      return it->second.size();
    }
    case Generator::Kind::multiset: {
      if (!g.lo || !g.hi) return unexpected("unbounded generator '" + g.name + "'");
      const std::size_t k = g.elements.size();
      if (k == 0) return std::size_t{0};
      std::size_t total = 0;
      for (auto s = std::max<std::int64_t>(0, *g.lo); s <= *g.hi; ++s) {
        total += binomial(static_cast<std::size_t>(s) + k - 1, k - 1);
      }
      return total;
    }
  }
  return std::size_t{0};
}

Expected<std::vector<Binding>, std::string> enumerate_inputs(const std::vector<Generator>& generators,
                                                            const StaticModel& model,
                                                            const UpstreamValues& upstream) {
  std::vector<std::vector<BoundValue>> dims;
  for (const auto& g : generators) {
    auto d = dimension(g, model, upstream);
    if (!d) return unexpected(d.error());
    dims.push_back(std::move(*d));
  }
  std::vector<Binding> out;
  if (generators.empty()) return out;
  for (const auto& d : dims) {
    if (d.empty()) return out;
  }
  std::vector<std::size_t> pos(dims.size(), 0);
  while (true) {
    Binding b;
    for (std::size_t i = 0; i < dims.size(); ++i) b.entries.emplace_back(generators[i].name, dims[i][pos[i]]);
    out.push_back(std::move(b));
    std::size_t i = dims.size();
    while (i > 0) {
      --i;
      if (++pos[i] < dims[i].size()) break;
      pos[i] = 0;
      if (i == 0) return out;
    }
  }
}

ExprEnv oracle_env(const Binding& binding, const StaticModel& model) {
  ExprEnv env;
  env.path = [&binding](const std::string& head, const std::string& attr) -> Value {
    const auto* v = binding.find(head);
    if (!v) throw EvalError("unbound name '" + head + "'");
    if (attr.empty()) {
      if (!v->scalar) throw EvalError("'" + head + "' has fields; name one");
      return *v->scalar;
    }
    const auto it = v->fields.find(attr);
    if (it == v->fields.end()) throw EvalError("'" + head + "' has no field '" + attr + "'");
    return it->second;
  };
  env.sum = [&binding, &model](const std::string& head, const std::string& attr) -> Value {
    if (const auto* v = binding.find(head)) {
      if (v->weights.empty()) throw EvalError("sum() needs a multiset binding: '" + head + "'");
      std::int64_t total = 0;
      for (const auto& [k, w] : v->weights) total += w * std::get<std::int64_t>(v->fields.at(k));
      return total;
    }
    const auto* t = model.thimac(head);
    if (!t || !t->is_store) throw EvalError("sum() of unknown '" + head + "'");
    std::int64_t total = 0;
    for (const auto& item : t->store_contents) {
      const auto it = item.attrs.find(attr);
      if (it == item.attrs.end() || type_of(it->second) != ValueType::integer) {
        throw EvalError("store item without integer '" + attr + "'");
      }
      total += std::get<std::int64_t>(it->second);
    }
    return total;
  };
  env.size = [&model](const std::string& head) -> Value {
    const auto* t = model.thimac(head);
    if (!t || !t->is_store) throw EvalError("size() of unknown store '" + head + "'");
    return static_cast<std::int64_t>(t->store_contents.size());
  };
  return env;
}

ThingInstance instantiate(const ThingTemplate& t, const Binding& binding, const StaticModel& model) {
  const auto env = oracle_env(binding, model);
  ThingInstance out{t.type, {}};
  for (const auto& [attr, e] : t.attrs) out.attrs[attr] = evaluate(e, env);
  return out;
}

}  // namespace tmkit
