#include <algorithm>
#include <charconv>
#include <numeric>
#include <sstream>

#include "eoscsp/exact.hpp"
#include "eoscsp/greedy.hpp"
#include "eoscsp/io.hpp"

namespace eoscsp {

namespace {

std::string lp_name(const std::string& raw) {
  std::string out = raw;
  for (char& c : out) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '_' || c == '.';
    if (!ok) c = '_';
  }
  return out;
}

std::string x_name(const Satellite& s, const Observation& o) { return lp_name("x_" + s.id + "_" + o.id); }
std::string t_name(const Satellite& s, const Observation& o) { return lp_name("t_" + s.id + "_" + o.id); }
std::string b_name(const Satellite& s, const Observation& o, const Observation& q) {
  return lp_name("b_" + s.id + "_" + o.id + "_" + q.id);
}

std::string number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

bool is_exclusive_owner(const Instance& p, const Observation& o) {
  return p.user(o.owner).has_exclusives();
}

TimeWindow largest(const std::vector<TimeWindow>& ws) {
  return *std::max_element(ws.begin(), ws.end(), [](const TimeWindow& a, const TimeWindow& b) {
    return a.length() < b.length();
  });
}

}  // namespace

std::size_t MilpModel::count(VarKind kind) const {
  return static_cast<std::size_t>(std::count_if(variables.begin(), variables.end(),
                                                [&](const MilpVariable& v) { return v.kind == kind; }));
}

std::size_t MilpModel::rows_with_prefix(const std::string& prefix) const {
  return static_cast<std::size_t>(std::count_if(
      rows.begin(), rows.end(), [&](const LinearRow& r) { return r.name.rfind(prefix, 0) == 0; }));
}

double default_priority_boost(const Instance& p) {
  double sum = 0.0;
  for (const auto& r : p.requests()) sum += std::abs(r.reward);
  return 1.0 + sum;
}

double delta_max(const Instance&, const Satellite& s, const Observation& o, const Observation& q) {
  return o.window.end - q.window.start + o.duration + s.transition(o.id, q.id);
}

MilpModel build_milp(const Instance& p, const MilpOptions& options) {
  MilpModel m;
  m.priority_boost = options.priority_boost > 0 ? options.priority_boost : default_priority_boost(p);
  double non_exclusive = 0.0;
  for (const auto& r : p.requests())
    if (!p.user(r.owner).has_exclusives()) non_exclusive += std::max(0.0, r.reward);
  if (!(m.priority_boost > non_exclusive)) {
    throw std::invalid_argument("priority boost must exceed the total non-exclusive reward (" +
                                number(non_exclusive) + ")");
  }

  const auto& sats = p.satellites();
  const auto& obs = p.observations();

  for (const auto& s : sats) {
    for (const auto& o : obs) {
      const bool own = o.satellite == s.id;
      m.variables.push_back({x_name(s, o), VarKind::Binary, 0.0, own ? 1.0 : 0.0});
      const double coef = o.reward + (is_exclusive_owner(p, o) ? m.priority_boost : 0.0);
      m.objective.push_back({x_name(s, o), coef});
    }
  }
  for (const auto& s : sats) {
    for (const auto& o : obs) {
      TimeWindow bounds{o.window.start, options.sound_sequencing ? o.latest_start() : o.window.end};
      if (options.strict_exclusives && o.satellite == s.id) {
        std::vector<TimeWindow> allowed =
            is_exclusive_owner(p, o) ? own_exclusive_domains(p, o) : free_portions(p, o);
        if (allowed.empty()) {
          for (auto& v : m.variables)
            if (v.name == x_name(s, o)) v.upper = 0.0;
        } else {
          const TimeWindow w = largest(allowed);
          bounds = {w.start, options.sound_sequencing ? w.end - o.duration : w.end};
        }
      }
      m.variables.push_back({t_name(s, o), VarKind::Continuous, bounds.start, bounds.end});
    }
  }
  for (const auto& s : sats)
    for (const auto& o : obs)
      for (const auto& q : obs)
        if (o.id != q.id) m.variables.push_back({b_name(s, o, q), VarKind::Binary, 0.0, 1.0});

  for (const auto& s : sats) {
    for (std::size_t i = 0; i < obs.size(); ++i) {
      for (std::size_t j = i + 1; j < obs.size(); ++j) {
        const Observation& o = obs[i];
        const Observation& q = obs[j];
        const std::string pair = s.id + "_" + o.id + "_" + q.id;
        const std::string bop = b_name(s, o, q), bpo = b_name(s, q, o);
        if (options.sound_sequencing) {
          m.rows.push_back({lp_name("seq_" + pair), {{bop, 1}, {bpo, 1}, {x_name(s, o), 1}, {x_name(s, q), 1}},
                            Sense::LessEqual, 3.0});
        } else {
          m.rows.push_back({lp_name("c1_" + pair), {{bop, 1}, {bpo, 1}, {x_name(s, o), 1}}, Sense::LessEqual, 2.0});
          m.rows.push_back({lp_name("c2_" + pair), {{bop, 1}, {bpo, 1}, {x_name(s, q), 1}}, Sense::LessEqual, 2.0});
          m.rows.push_back({lp_name("c3_" + pair), {{bop, 1}, {bpo, 1}}, Sense::LessEqual, 1.0});
        }
        const double big_oq = delta_max(p, s, o, q);
        if (big_oq > 0) {
          m.rows.push_back({lp_name("sep_" + s.id + "_" + o.id + "_" + q.id),
                            {{t_name(s, q), 1}, {t_name(s, o), -1}, {bop, big_oq}},
                            Sense::GreaterEqual, s.transition(o.id, q.id) + o.duration});
        }
        const double big_qo = delta_max(p, s, q, o);
        if (big_qo > 0) {
          m.rows.push_back({lp_name("sep_" + s.id + "_" + q.id + "_" + o.id),
                            {{t_name(s, o), 1}, {t_name(s, q), -1}, {bpo, big_qo}},
                            Sense::GreaterEqual, s.transition(q.id, o.id) + q.duration});
        }
      }
    }
  }
  for (const auto& s : sats) {
    LinearRow cap{lp_name("cap_" + s.id), {}, Sense::LessEqual, static_cast<double>(s.capacity)};
    for (const auto& o : obs) cap.terms.push_back({x_name(s, o), 1});
    m.rows.push_back(std::move(cap));
  }
  if (options.sound_sequencing) {
    for (const auto& r : p.requests()) {
      LinearRow row{lp_name("req_" + r.id), {}, Sense::LessEqual, 1.0};
      for (const auto& s : sats)
        for (const auto& oid : r.opportunities) row.terms.push_back({x_name(s, p.observation(oid)), 1});
      m.rows.push_back(std::move(row));
    }
  } else {
    for (const auto& s : sats) {
      for (const auto& r : p.requests()) {
        LinearRow row{lp_name("req_" + s.id + "_" + r.id), {}, Sense::LessEqual, 1.0};
        for (const auto& oid : r.opportunities) row.terms.push_back({x_name(s, p.observation(oid)), 1});
        m.rows.push_back(std::move(row));
      }
    }
  }
  for (const auto& [oid, t] : p.preallocated().entries) {
    const Observation& o = p.observation(oid);
    const Satellite& s = p.satellite(o.satellite);
    m.rows.push_back({lp_name("fix_x_" + s.id + "_" + o.id), {{x_name(s, o), 1}}, Sense::Equal, 1.0});
    m.rows.push_back({lp_name("fix_t_" + s.id + "_" + o.id), {{t_name(s, o), 1}}, Sense::Equal, t});
  }
  return m;
}

namespace {

void write_terms(std::ostringstream& out, const std::vector<LinearTerm>& terms) {
  if (terms.empty()) {
    out << " 0";
    return;
  }
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (i > 0 && i % 6 == 0) out << "\n  ";
    const double c = terms[i].coefficient;
    const double mag = std::abs(c);
    out << (c < 0 ? (i == 0 ? " -" : " - ") : (i == 0 ? " " : " + "));
    if (mag != 1.0) out << number(mag) << ' ';
    out << terms[i].variable;
  }
}

const char* sense_text(Sense s) {
  switch (s) {
    case Sense::LessEqual: return "<=";
    case Sense::GreaterEqual: return ">=";
    case Sense::Equal: return "=";
  }
  return "=";
}

}  // namespace

std::string to_lp(const MilpModel& m) {
  std::ostringstream out;
  out << "\\ EOSCSP MILP, priority boost " << number(m.priority_boost) << "\n";
  out << "Maximize\n obj:";
  write_terms(out, m.objective);
  out << "\nSubject To\n";
  for (const auto& row : m.rows) {
    out << ' ' << row.name << ':';
    write_terms(out, row.terms);
    out << ' ' << sense_text(row.sense) << ' ' << number(row.rhs) << '\n';
  }
  out << "Bounds\n";
  for (const auto& v : m.variables) {
    if (v.kind == VarKind::Continuous) {
      out << ' ' << number(v.lower) << " <= " << v.name << " <= " << number(v.upper) << '\n';
    } else if (v.upper == v.lower) {
      out << ' ' << v.name << " = " << number(v.lower) << '\n';
    }
  }
  out << "Binaries\n";
  for (const auto& v : m.variables)
    if (v.kind == VarKind::Binary) out << ' ' << v.name << '\n';
  out << "End\n";
  return out.str();
}

void export_lp(const MilpModel& m, const std::filesystem::path& path) { write_text(path, to_lp(m)); }

}  // namespace eoscsp
