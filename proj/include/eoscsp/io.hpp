#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "eoscsp/model.hpp"

namespace eoscsp {

using json = nlohmann::json;

// JSON schema (ids are strings, times are floating seconds, windows are
// [start, end] pairs):
//
//   instance := { "satellites":   [ {id, horizon, capacity,
//                                    transition: {default, overrides: [{from, to, time}]}} ],
//                 "users":        [ {id, priority, exclusives: [{satellite, window}]} ],
//                 "requests":     [ {id, window, duration, reward, position: [lat, lon, alt],
//                                    owner, opportunities: [id]} ],
//                 "observations": [ {id, window, duration, request, reward, satellite,
//                                    owner, priority} ],
//                 "preallocated": schedule }          (omitted when empty)
//
//   schedule := { "entries": [ {observation, start} ],
//                 "grants":  [ {observation, user} ] }

json to_json(const TimeWindow& w);
json to_json(const Instance& p);
json to_json(const Schedule& m);

TimeWindow window_from_json(const json& j);
Instance instance_from_json(const json& j);
Schedule schedule_from_json(const json& j);

/// Canonical text form: two-space indent, trailing newline.
std::string dump(const json& j);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

Instance load_instance(const std::filesystem::path& path);
Schedule load_schedule(const std::filesystem::path& path);

}  // namespace eoscsp
