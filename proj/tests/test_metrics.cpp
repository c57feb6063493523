#include <doctest.h>

#include <map>
#include <optional>
#include <vector>

#include "errors.hpp"
#include "metrics.hpp"
#include "oracles.hpp"
#include "pfts.hpp"
#include "psm.hpp"
#include "rng.hpp"

using namespace psmkit;

namespace {

PsmState st(int id, Role role, std::optional<int> format = std::nullopt) {
  return PsmState{id, role, format};
}

PsmTransition tr(int from, int to, std::optional<int> format, double prob = 1.0) {
  return PsmTransition{from, to, format, prob};
}

// start -> c(f0) -> s(f1) -> end
Psm chain_machine() {
  Psm m;
  m.states = {st(0, Role::Start), st(1, Role::End), st(2, Role::Client, 0),
              st(3, Role::Server, 1)};
  m.transitions = {tr(0, 2, 0), tr(2, 3, 1), tr(3, 1, std::nullopt)};
  return m;
}

Psm single_state_machine(Role role, int format) {
  Psm m;
  m.states = {st(0, Role::Start), st(1, Role::End), st(2, role, format)};
  m.transitions = {tr(0, 2, format), tr(2, 1, std::nullopt)};
  return m;
}

SessionSequence seq(std::vector<int> tokens) {
  SessionSequence s;
  s.tokens = std::move(tokens);
  return s;
}

}  // namespace

TEST_CASE("rand_index ignores label names and scores pair agreement") {
  CHECK(rand_index({0, 0, 1, 1}, {5, 5, 9, 9}) == doctest::Approx(1.0));
  CHECK(rand_index({0, 0, 1, 1}, {0, 1, 0, 1}) == doctest::Approx(1.0 / 3.0));
  CHECK(rand_index({0, 0, 0, 1, 1}, {0, 0, 1, 1, 1}) == doctest::Approx(0.6));
  CHECK(rand_index({3, 3}, {1, 2}) == doctest::Approx(0.0));

  CHECK_THROWS_AS(rand_index({0, 1}, {0, 1, 2}), Error);
  CHECK_THROWS_AS(rand_index({0}, {0}), Error);
  CHECK_THROWS_AS(rand_index({}, {}), Error);
}

TEST_CASE("rand_index agrees with the pairwise loop on random labelings") {
  Rng rng(0x3e321c01u);
  for (int trial = 0; trial < 250; ++trial) {
    int n = static_cast<int>(rng.uniform_int(2, 40));
    std::vector<int> a, b;
    for (int i = 0; i < n; ++i) {
      a.push_back(static_cast<int>(rng.uniform_int(-1, 3)));
      b.push_back(static_cast<int>(rng.uniform_int(-1, 3)));
    }
    CHECK(rand_index(a, b) == doctest::Approx(oracle::rand_index(a, b)).epsilon(1e-12));
    CHECK(rand_index(a, a) == doctest::Approx(1.0));
  }
}

TEST_CASE("majority_label_map takes each cluster's dominant truth label") {
  auto m = majority_label_map({0, 0, 0, 1, 1, -1}, {7, 7, 8, 9, 9, 7});
  REQUIRE(m.size() == 2);  // noise gets no mapping
  CHECK(m.at(0) == 7);
  CHECK(m.at(1) == 9);

  auto tie = majority_label_map({0, 0}, {3, 2});
  CHECK(tie.at(0) == 2);  // smaller label wins a tie

  CHECK_THROWS_AS(majority_label_map({0}, {0, 1}), Error);
}

TEST_CASE("relabel_psm rewrites formats everywhere and insists on a full map") {
  Psm m = chain_machine();
  auto out = relabel_psm(m, {{0, 10}, {1, 11}});
  CHECK(out.states[2].format == 10);
  CHECK(out.states[3].format == 11);
  CHECK(out.transitions[0].format == 10);
  CHECK(out.transitions[1].format == 11);
  CHECK(!out.transitions[2].format.has_value());  // edges into end stay bare
  CHECK(!out.states[0].format.has_value());

  CHECK_THROWS_AS(relabel_psm(m, {{0, 10}}), Error);
}

TEST_CASE("a machine matched against itself is a perfect correspondence") {
  Psm m = chain_machine();
  auto pairs = match_states(m, m).pairs;
  REQUIRE(pairs.size() == 2);
  CHECK(pairs[0] == std::pair<int, int>{2, 2});
  CHECK(pairs[1] == std::pair<int, int>{3, 3});
  CHECK(state_machine_correspondence(m, m) == doctest::Approx(1.0));
  CHECK(transition_correspondence(m, m) == doctest::Approx(1.0));
}

TEST_CASE("states pair only when roles agree and formats overlap") {
  SUBCASE("role mismatch") {
    Psm a = single_state_machine(Role::Client, 0);
    Psm b = single_state_machine(Role::Server, 0);
    CHECK(match_states(a, b).pairs.empty());
    CHECK(state_machine_correspondence(a, b) == doctest::Approx(0.0));
    // Neither machine has a transition between real states.
    CHECK(transition_correspondence(a, b) == doctest::Approx(1.0));
  }

  SUBCASE("no shared formats") {
    Psm a = single_state_machine(Role::Client, 0);
    Psm b = single_state_machine(Role::Client, 5);
    CHECK(match_states(a, b).pairs.empty());
    CHECK(state_machine_correspondence(a, b) == doctest::Approx(0.0));
  }

  SUBCASE("states with no formatted edges agree trivially") {
    Psm a, b;
    a.states = {st(0, Role::Start), st(1, Role::End), st(2, Role::Client, 0)};
    a.transitions = {tr(0, 2, std::nullopt), tr(2, 1, std::nullopt)};
    b = a;
    CHECK(state_machine_correspondence(a, b) == doctest::Approx(1.0));
  }
}

TEST_CASE("among maximum matchings the highest format overlap wins") {
  Psm inferred;
  inferred.states = {st(0, Role::Start), st(1, Role::End), st(2, Role::Client, 0)};
  inferred.transitions = {tr(0, 2, 0), tr(2, 2, 0), tr(2, 1, std::nullopt)};
  // Incident multiset of state 2: {f0: 2}.

  Psm ref;
  ref.states = {st(0, Role::Start), st(1, Role::End), st(2, Role::Client, 0),
                st(3, Role::Client, 1)};
  // State 2 carries {f0: 2} (dice 1), state 3 carries {f0: 1, f1: 1} (dice 0.5).
  ref.transitions = {tr(0, 2, 0), tr(2, 2, 0), tr(2, 1, std::nullopt),
                     tr(0, 3, 1), tr(3, 1, std::nullopt), tr(3, 3, 0)};

  auto pairs = match_states(inferred, ref).pairs;
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0] == std::pair<int, int>{2, 2});
}

TEST_CASE("contested reference states go to the earlier inferred state") {
  Psm inferred;
  inferred.states = {st(0, Role::Start), st(1, Role::End), st(2, Role::Client, 0),
                     st(3, Role::Client, 0)};
  inferred.transitions = {tr(0, 2, 0), tr(2, 1, std::nullopt), tr(0, 3, 0),
                          tr(3, 1, std::nullopt)};

  Psm ref = single_state_machine(Role::Client, 0);

  auto pairs = match_states(inferred, ref).pairs;
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0] == std::pair<int, int>{2, 2});  // inferred 2, not 3
}

TEST_CASE("correspondence scores are Dice coefficients over the matching") {
  // Two real states inferred, three in the reference, two matchable.
  Psm inferred = chain_machine();
  Psm ref = chain_machine();
  ref.states.push_back(st(4, Role::Client, 2));
  ref.transitions.push_back(tr(3, 4, 2));
  ref.transitions.push_back(tr(4, 1, std::nullopt));

  CHECK(state_machine_correspondence(inferred, ref) == doctest::Approx(0.8));  // 2*2/(2+3)

  // Inferred holds one real transition (2->3, f1); the reference holds that
  // one plus 3->4 (f2).
  CHECK(transition_correspondence(inferred, ref) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("transition correspondence when one side has no real transitions") {
  Psm chain = chain_machine();
  Psm lone = single_state_machine(Role::Client, 0);
  CHECK(transition_correspondence(chain, lone) == doctest::Approx(0.0));
  CHECK(transition_correspondence(lone, chain) == doctest::Approx(0.0));
  CHECK(transition_correspondence(lone, lone) == doctest::Approx(1.0));  // both empty
}

TEST_CASE("empty machines compare as identical") {
  Psm empty;
  empty.states = {st(0, Role::Start), st(1, Role::End)};
  CHECK(state_machine_correspondence(empty, empty) == doctest::Approx(1.0));
  CHECK(transition_correspondence(empty, empty) == doctest::Approx(1.0));
}

TEST_CASE("oversized reference machines are rejected") {
  Psm inferred = single_state_machine(Role::Client, 0);
  Psm huge;
  huge.states = {st(0, Role::Start), st(1, Role::End)};
  for (int i = 0; i < 17; ++i)
    huge.states.push_back(st(2 + i, Role::Client, i));
  try {
    match_states(inferred, huge);
    FAIL("expected a metrics error");
  } catch (const Error &e) {
    CHECK(e.stage() == Stage::Metrics);
  }
}

TEST_CASE("self-correspondence is perfect for random machines") {
  Rng rng(0x3e321c02u);
  for (int trial = 0; trial < 200; ++trial) {
    int n_sessions = static_cast<int>(rng.uniform_int(1, 10));
    std::vector<SessionSequence> seqs;
    for (int s = 0; s < n_sessions; ++s) {
      std::vector<int> tokens;
      int len = static_cast<int>(rng.uniform_int(1, 5));
      for (int i = 0; i < len; ++i)
        tokens.push_back(static_cast<int>(rng.uniform_int(0, 3)));
      seqs.push_back(seq(std::move(tokens)));
    }
    std::map<int, Direction> dirs;
    for (int f = 0; f <= 3; ++f)
      dirs[f] = rng.chance(0.5) ? Direction::Initiator : Direction::Responder;
    Psm m = pfts_to_psm(build_pfts(seqs), dirs);

    CHECK(state_machine_correspondence(m, m) == doctest::Approx(1.0));
    CHECK(transition_correspondence(m, m) == doctest::Approx(1.0));

    // The state score never depends on the argument order.
    Psm other = pfts_to_psm(build_pfts({seqs.front()}), dirs);
    double ab = state_machine_correspondence(m, other);
    double ba = state_machine_correspondence(other, m);
    CHECK(ab == doctest::Approx(ba));
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
    double t = transition_correspondence(m, other);
    CHECK(t >= 0.0);
    CHECK(t <= 1.0);
  }
}
