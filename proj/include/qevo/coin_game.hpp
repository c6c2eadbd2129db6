#pragma once

#include <array>
#include <cstdint>

#include "qevo/rng.hpp"

namespace qevo {

// 3x3 two-agent Coin Game. Agent 0 is red, agent 1 is blue; a single coin of
// one of the two colors sits on the grid. Agents alternate turns; collecting
// a coin pays the collector +1 and costs the coin's owner -2 when someone
// else takes it.
inline constexpr int kGridSize = 3;
inline constexpr int kNumCells = kGridSize * kGridSize;
inline constexpr int kNumAgents = 2;
inline constexpr int kNumActions = 4;  // 0 north, 1 south, 2 west, 3 east
inline constexpr int kObservationSize = 4 * kNumCells;

using ActionMask = std::array<bool, kNumActions>;
using Observation = std::array<double, kObservationSize>;

// Cells are row-major indices 0..8; (row, col) = (cell / 3, cell % 3).
struct CoinGameState {
    std::array<int, kNumAgents> agent_pos{0, 1};
    int coin_pos = 2;
    int coin_color = 0;  // 0 red (agent 0), 1 blue (agent 1)
    int turn = 0;
    int step = 0;
};

// Fresh state: two distinct uniform agent cells, coin on a uniform free
// cell, uniform color, agent 0 to move.
CoinGameState reset_coin_game(Rng& rng);

// An action is legal iff the destination stays on the grid and is not the
// other agent's cell (the coin's cell is fine).
ActionMask legal_actions(const CoinGameState& state, int agent);

bool any_legal(const ActionMask& mask);

// Destination cell of an action, or -1 if it leaves the grid.
int action_destination(int cell, int action);

struct StepOutcome {
    CoinGameState state;
    std::array<int, kNumAgents> rewards{0, 0};
    bool coin_collected = false;
    bool own_coin = false;  // collected coin matched the collector's color
};

// Applies the acting agent's move. On collection the coin respawns on a
// uniform free cell with a uniform color, consuming `rng`. Throws on an
// illegal action; callers must mask first.
StepOutcome step_coin_game(const CoinGameState& state, int action, Rng& rng);

// Used when the acting agent has no legal move: the turn passes, nobody is
// rewarded.
CoinGameState pass_turn(const CoinGameState& state);

// Egocentric encoding for the acting agent: four one-hot 3x3 planes,
// row-major — own position, other agent's position, own-color coin,
// other-color coin. Exactly three entries are 1.
Observation encode_observation(const CoinGameState& state, int agent);

// Per-episode totals, indexed by agent.
struct EpisodeStats {
    std::array<int, kNumAgents> rewards{0, 0};
    std::array<int, kNumAgents> coins{0, 0};
    std::array<int, kNumAgents> own_coins{0, 0};
};

struct EpisodeMetrics {
    int score = 0;        // sum of both agents' rewards
    int total_coins = 0;  // coins collected by both agents
    int own_coins = 0;    // own-color coins collected by both agents
    double own_coin_rate = 0.0;  // own_coins / total_coins, 0 when no coins
};

EpisodeMetrics episode_metrics(const EpisodeStats& stats);

}  // namespace qevo
