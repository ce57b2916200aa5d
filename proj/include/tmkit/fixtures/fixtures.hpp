#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "tmkit/carve/carve.hpp"
#include "tmkit/core/expected.hpp"
#include "tmkit/events/events.hpp"
#include "tmkit/harness/scenario.hpp"

namespace tmkit {

/// One case study: model.tm, events.ev, groups.grp and *.sc files in a
/// directory. A `base` file names a fixture to take missing files from.
struct Fixture {
  std::string name;
  StaticModel model;
  EventsModel events;  // refers to `model`
  BehavioralModel behavior;
  Carving carving;
  std::vector<Scenario> scenarios;
};

using FixturePtr = std::shared_ptr<const Fixture>;

/// $TMKIT_FIXTURES when set, else the fixtures directory of the source tree.
std::filesystem::path fixture_root();

/// Shipped fixture names, sorted.
std::vector<std::string> fixture_names(const std::filesystem::path& root = fixture_root());

/// Errors: unknown fixture name, unreadable or invalid files.
Expected<FixturePtr, std::string> load_fixture(const std::string& name,
                                               const std::filesystem::path& root = fixture_root());

/// Reads a whole file. Errors name the path.
Expected<std::string, std::string> read_file(const std::filesystem::path& path);

}  // namespace tmkit
