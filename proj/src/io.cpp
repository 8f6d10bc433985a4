#include "eoscsp/io.hpp"

#include <fstream>
#include <sstream>

namespace eoscsp {

json to_json(const TimeWindow& w) { return json::array({w.start, w.end}); }

TimeWindow window_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) throw ModelError("window must be a [start, end] pair");
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

json to_json(const Schedule& m) {
  json entries = json::array();
  for (const auto& [oid, t] : m.entries) entries.push_back({{"observation", oid}, {"start", t}});
  json grants = json::array();
  for (const auto& [oid, uid] : m.grants) grants.push_back({{"observation", oid}, {"user", uid}});
  return {{"entries", entries}, {"grants", grants}};
}

Schedule schedule_from_json(const json& j) {
  Schedule m;
  for (const auto& e : j.at("entries")) {
    auto [it, inserted] = m.entries.emplace(e.at("observation").get<Id>(), e.at("start").get<double>());
    if (!inserted) throw ModelError("duplicate schedule entry '" + it->first + "'");
  }
  if (j.contains("grants")) {
    for (const auto& g : j.at("grants")) m.grants.emplace(g.at("observation").get<Id>(), g.at("user").get<Id>());
  }
  return m;
}

json to_json(const Instance& p) {
  json sats = json::array();
  for (const auto& s : p.satellites()) {
    json overrides = json::array();
    for (const auto& [pair, t] : s.transition.overrides) {
      overrides.push_back({{"from", pair.first}, {"to", pair.second}, {"time", t}});
    }
    sats.push_back({{"id", s.id},
                    {"horizon", to_json(s.horizon)},
                    {"capacity", s.capacity},
                    {"transition", {{"default", s.transition.default_time}, {"overrides", overrides}}}});
  }
  json users = json::array();
  for (const auto& u : p.users()) {
    json ex = json::array();
    for (const auto& e : u.exclusives) ex.push_back({{"satellite", e.satellite}, {"window", to_json(e.window)}});
    users.push_back({{"id", u.id}, {"priority", u.priority}, {"exclusives", ex}});
  }
  json reqs = json::array();
  for (const auto& r : p.requests()) {
    reqs.push_back({{"id", r.id},
                    {"window", to_json(r.window)},
                    {"duration", r.duration},
                    {"reward", r.reward},
                    {"position", {r.position.latitude, r.position.longitude, r.position.altitude}},
                    {"owner", r.owner},
                    {"opportunities", r.opportunities}});
  }
  json obs = json::array();
  for (const auto& o : p.observations()) {
    obs.push_back({{"id", o.id},
                   {"window", to_json(o.window)},
                   {"duration", o.duration},
                   {"request", o.request},
                   {"reward", o.reward},
                   {"satellite", o.satellite},
                   {"owner", o.owner},
                   {"priority", o.priority}});
  }
  json j = {{"satellites", sats}, {"users", users}, {"requests", reqs}, {"observations", obs}};
  if (!p.preallocated().empty()) j["preallocated"] = to_json(p.preallocated());
  return j;
}

Instance instance_from_json(const json& j) {
  try {
    std::vector<Satellite> sats;
    for (const auto& s : j.at("satellites")) {
      Satellite sat;
      sat.id = s.at("id").get<Id>();
      sat.horizon = window_from_json(s.at("horizon"));
      sat.capacity = s.at("capacity").get<int>();
      if (s.contains("transition")) {
        const auto& t = s.at("transition");
        sat.transition.default_time = t.value("default", 0.0);
        if (t.contains("overrides")) {
          for (const auto& o : t.at("overrides")) {
            sat.transition.overrides[{o.at("from").get<Id>(), o.at("to").get<Id>()}] = o.at("time").get<double>();
          }
        }
      }
      sats.push_back(std::move(sat));
    }
    std::vector<User> users;
    for (const auto& u : j.at("users")) {
      User user;
      user.id = u.at("id").get<Id>();
      user.priority = u.value("priority", 1);
      for (const auto& e : u.value("exclusives", json::array())) {
        user.exclusives.push_back({e.at("satellite").get<Id>(), window_from_json(e.at("window"))});
      }
      users.push_back(std::move(user));
    }
    std::vector<Request> reqs;
    for (const auto& r : j.at("requests")) {
      Request req;
      req.id = r.at("id").get<Id>();
      req.window = window_from_json(r.at("window"));
      req.duration = r.at("duration").get<double>();
      req.reward = r.at("reward").get<double>();
      if (r.contains("position")) {
        const auto& pos = r.at("position");
        req.position = {pos.at(0).get<double>(), pos.at(1).get<double>(), pos.at(2).get<double>()};
      }
      req.owner = r.at("owner").get<Id>();
      req.opportunities = r.at("opportunities").get<std::vector<Id>>();
      reqs.push_back(std::move(req));
    }
    std::vector<Observation> obs;
    for (const auto& o : j.at("observations")) {
      Observation ob;
      ob.id = o.at("id").get<Id>();
      ob.window = window_from_json(o.at("window"));
      ob.duration = o.at("duration").get<double>();
      ob.request = o.at("request").get<Id>();
      ob.reward = o.at("reward").get<double>();
      ob.satellite = o.at("satellite").get<Id>();
      ob.owner = o.at("owner").get<Id>();
      ob.priority = o.at("priority").get<int>();
      obs.push_back(std::move(ob));
    }
    Schedule pre;
    if (j.contains("preallocated")) pre = schedule_from_json(j.at("preallocated"));
    return Instance(std::move(sats), std::move(users), std::move(reqs), std::move(obs), std::move(pre));
  } catch (const json::exception& e) {
    throw ModelError(std::string("malformed instance JSON: ") + e.what());
  }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

Instance load_instance(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw ModelError(std::string("invalid JSON in '") + path.string() + "': " + e.what());
  }
  return instance_from_json(j);
}

Schedule load_schedule(const std::filesystem::path& path) {
  try {
    return schedule_from_json(json::parse(read_text(path)));
  } catch (const json::exception& e) {
    throw ModelError(std::string("malformed schedule JSON: ") + e.what());
  }
}

}  // namespace eoscsp
