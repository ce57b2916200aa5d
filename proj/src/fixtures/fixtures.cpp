#include "tmkit/fixtures/fixtures.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "tmkit/dsl/dsl.hpp"

#ifndef TMKIT_FIXTURE_DIR
#define TMKIT_FIXTURE_DIR "fixtures"
#endif

namespace tmkit {

namespace fs = std::filesystem;

fs::path fixture_root() {
  if (const char* env = std::getenv("TMKIT_FIXTURES"); env && *env) return env;
  return TMKIT_FIXTURE_DIR;
}

std::vector<std::string> fixture_names(const fs::path& root) {
  std::vector<std::string> out;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(root, ec)) {
    if (entry.is_directory() && (fs::exists(entry.path() / "model.tm") || fs::exists(entry.path() / "base"))) {
      out.push_back(entry.path().filename().string());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

Expected<std::string, std::string> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return unexpected("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

std::string first_error(const ParseErrors& errors) { return to_string(errors.front()); }

// The fixture directory chain, most specific first.
Expected<std::vector<fs::path>, std::string> chain(const std::string& name, const fs::path& root) {
  std::vector<fs::path> dirs;
  std::string current = name;
  while (true) {
    const auto dir = root / current;
    if (!fs::is_directory(dir)) return unexpected("unknown fixture '" + current + "'");
    if (std::find(dirs.begin(), dirs.end(), dir) != dirs.end()) return unexpected("fixture base cycle at '" + current + "'");
    dirs.push_back(dir);
    if (!fs::exists(dir / "base")) return dirs;
    auto base = read_file(dir / "base");
    if (!base) return unexpected(base.error());
    current = *base;
    current.erase(std::remove_if(current.begin(), current.end(), [](unsigned char c) { return std::isspace(c); }),
                  current.end());
  }
}

std::optional<fs::path> find(const std::vector<fs::path>& dirs, const std::string& file) {
  for (const auto& d : dirs) {
    if (fs::exists(d / file)) return d / file;
  }
  return std::nullopt;
}

std::vector<fs::path> scenario_files(const std::vector<fs::path>& dirs) {
  for (const auto& d : dirs) {
    std::vector<fs::path> out;
    for (const auto& entry : fs::directory_iterator(d)) {
      if (entry.path().extension() == ".sc") out.push_back(entry.path());
    }
    if (!out.empty()) {
      std::sort(out.begin(), out.end());
      return out;
    }
  }
  return {};
}

}  // namespace

Expected<FixturePtr, std::string> load_fixture(const std::string& name, const fs::path& root) {
  auto dirs = chain(name, root);
  if (!dirs) return unexpected(dirs.error());

  auto fixture = std::make_shared<Fixture>();
  fixture->name = name;

  auto read = [&](const std::string& file) -> Expected<std::pair<fs::path, std::string>, std::string> {
    const auto path = find(*dirs, file);
    if (!path) return unexpected("fixture '" + name + "' has no " + file);
    auto text = read_file(*path);
    if (!text) return unexpected(text.error());
    return std::make_pair(*path, std::move(*text));
  };

  auto model_text = read("model.tm");
  if (!model_text) return unexpected(model_text.error());
  auto model = parse_model(model_text->second, model_text->first.string());
  if (!model) return unexpected(first_error(model.error()));
  fixture->model = std::move(*model);

  auto events_text = read("events.ev");
  if (!events_text) return unexpected(events_text.error());
  auto events = parse_events(events_text->second, fixture->model, events_text->first.string());
  if (!events) return unexpected(first_error(events.error()));
  fixture->events = std::move(*events);
  fixture->behavior = build_behavior(fixture->events);

  auto groups_text = read("groups.grp");
  if (!groups_text) return unexpected(groups_text.error());
  auto groups = parse_groups(groups_text->second, groups_text->first.string());
  if (!groups) return unexpected(first_error(groups.error()));
  auto carving = carve_manual(fixture->behavior, *groups);
  if (!carving) return unexpected("fixture '" + name + "': " + to_string(carving.error().front()));
  fixture->carving = std::move(*carving);

  for (const auto& path : scenario_files(*dirs)) {
    auto text = read_file(path);
    if (!text) return unexpected(text.error());
    auto scenarios = parse_scenarios(*text, path.string());
    if (!scenarios) return unexpected(first_error(scenarios.error()));
    for (auto& s : *scenarios) fixture->scenarios.push_back(std::move(s));
  }
  return FixturePtr(std::move(fixture));
}

}  // namespace tmkit
