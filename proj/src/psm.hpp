#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pfts.hpp"
#include "trace.hpp"

namespace psmkit {

enum class Role { Start, End, Client, Server };

const char *role_name(Role r);
Role role_from_name(const std::string &name);

struct PsmState {
  int id = 0;
  Role role = Role::Client;
  // Format-cluster label this state stands for; empty for the virtual
  // start/end states.
  std::optional<int> format;
};

struct PsmTransition {
  int from = 0;
  int to = 0;
  // Format emitted by taking the edge (the destination's format); empty for
  // edges into the end state.
  std::optional<int> format;
  double prob = 0.0;
};

struct Psm {
  std::vector<PsmState> states;
  std::vector<PsmTransition> transitions;
};

// Builds the state machine from a filtered transition set. One state per
// surviving format label (ids 2.. in label order, after start=0 and end=1);
// edge probabilities are outgoing-normalised over the filtered counts.
// direction_of gives each format's dominant message direction and decides
// whether its state is a client or a server state.
Psm pfts_to_psm(const Pfts &filtered, const std::map<int, Direction> &direction_of);

nlohmann::json psm_to_json(const Psm &m);
Psm psm_from_json(const nlohmann::json &j);

std::string psm_to_dot(const Psm &m, const std::string &graph_name);

}  // namespace psmkit
