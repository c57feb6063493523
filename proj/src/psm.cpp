#include "psm.hpp"

#include <cstdio>
#include <set>
#include <sstream>

#include "errors.hpp"

namespace psmkit {

const char *role_name(Role r) {
  switch (r) {
    case Role::Start: return "start";
    case Role::End: return "end";
    case Role::Client: return "client";
    case Role::Server: return "server";
  }
  return "unknown";
}

Role role_from_name(const std::string &name) {
  if (name == "start") return Role::Start;
  if (name == "end") return Role::End;
  if (name == "client") return Role::Client;
  if (name == "server") return Role::Server;
  throw Error(Stage::Io, "unknown state role '" + name + "'");
}

Psm pfts_to_psm(const Pfts &filtered, const std::map<int, Direction> &direction_of) {
  std::set<int> labels;
  for (const auto &[edge, count] : filtered.counts) {
    if (edge.first != kStartLabel && edge.first != kEndLabel)
      labels.insert(edge.first);
    if (edge.second != kStartLabel && edge.second != kEndLabel)
      labels.insert(edge.second);
  }

  Psm m;
  m.states.push_back({0, Role::Start, std::nullopt});
  m.states.push_back({1, Role::End, std::nullopt});
  std::map<int, int> state_of;
  state_of[kStartLabel] = 0;
  state_of[kEndLabel] = 1;
  int next_id = 2;
  for (int label : labels) {
    auto dir = direction_of.find(label);
    if (dir == direction_of.end())
      throw Error(Stage::PsmInfer, "no direction known for format " + std::to_string(label));
    Role role = dir->second == Direction::Initiator ? Role::Client : Role::Server;
    m.states.push_back({next_id, role, label});
    state_of[label] = next_id++;
  }

  for (const auto &[edge, count] : filtered.counts) {
    PsmTransition t;
    t.from = state_of.at(edge.first);
    t.to = state_of.at(edge.second);
    if (edge.second != kEndLabel)
      t.format = edge.second;
    t.prob = transition_prob(filtered, edge.first, edge.second);
    m.transitions.push_back(t);
  }
  return m;
}

nlohmann::json psm_to_json(const Psm &m) {
  nlohmann::json states = nlohmann::json::array();
  for (const PsmState &s : m.states) {
    nlohmann::json js{{"id", s.id}, {"role", role_name(s.role)}};
    if (s.format.has_value())
      js["format"] = *s.format;
    states.push_back(std::move(js));
  }
  nlohmann::json transitions = nlohmann::json::array();
  for (const PsmTransition &t : m.transitions) {
    nlohmann::json jt{{"from", t.from}, {"to", t.to}, {"p", t.prob}};
    if (t.format.has_value())
      jt["format"] = *t.format;
    transitions.push_back(std::move(jt));
  }
  return nlohmann::json{
      {"meta", {{"probability", "outgoing-normalized over the filtered transition set"}}},
      {"states", std::move(states)},
      {"transitions", std::move(transitions)}};
}

Psm psm_from_json(const nlohmann::json &j) {
  Psm m;
  try {
    for (const auto &js : j.at("states")) {
      PsmState s;
      s.id = js.at("id").get<int>();
      s.role = role_from_name(js.at("role").get<std::string>());
      if (js.contains("format"))
        s.format = js.at("format").get<int>();
      m.states.push_back(s);
    }
    for (const auto &jt : j.at("transitions")) {
      PsmTransition t;
      t.from = jt.at("from").get<int>();
      t.to = jt.at("to").get<int>();
      t.prob = jt.at("p").get<double>();
      if (jt.contains("format"))
        t.format = jt.at("format").get<int>();
      m.transitions.push_back(t);
    }
  } catch (const Error &) {
    throw;
  } catch (const std::exception &e) {
    throw Error(Stage::Io, std::string("bad state machine JSON: ") + e.what());
  }
  return m;
}

std::string psm_to_dot(const Psm &m, const std::string &graph_name) {
  std::ostringstream out;
  out << "digraph " << graph_name << " {\n  rankdir=LR;\n";
  for (const PsmState &s : m.states) {
    out << "  s" << s.id << " [";
    switch (s.role) {
      case Role::Start:
        out << "label=\"start\", shape=point";
        break;
      case Role::End:
        out << "label=\"end\", shape=doublecircle";
        break;
      default:
        out << "label=\"f" << *s.format << "/" << role_name(s.role) << "\", shape=circle";
        break;
    }
    out << "];\n";
  }
  char buf[32];
  for (const PsmTransition &t : m.transitions) {
    std::snprintf(buf, sizeof buf, "%.2f", t.prob);
    out << "  s" << t.from << " -> s" << t.to << " [label=\"";
    if (t.format.has_value())
      out << "f" << *t.format << " ";
    out << "p=" << buf << "\"];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace psmkit
