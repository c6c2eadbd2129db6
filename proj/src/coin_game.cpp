#include "qevo/coin_game.hpp"

#include <stdexcept>

namespace qevo {

namespace {

// k-th cell (0-based) not occupied by an agent.
int nth_free_cell(int k, int a0, int a1) {
    for (int cell = 0; cell < kNumCells; ++cell) {
        if (cell == a0 || cell == a1) continue;
        if (k-- == 0) return cell;
    }
    throw std::logic_error("free-cell index out of range");
}

int spawn_coin(int a0, int a1, Rng& rng) {
    return nth_free_cell(rng.uniform_int(kNumCells - kNumAgents), a0, a1);
}

}  // namespace

CoinGameState reset_coin_game(Rng& rng) {
    CoinGameState s;
    s.agent_pos[0] = rng.uniform_int(kNumCells);
    int second = rng.uniform_int(kNumCells - 1);
    if (second >= s.agent_pos[0]) ++second;
    s.agent_pos[1] = second;
    s.coin_pos = spawn_coin(s.agent_pos[0], s.agent_pos[1], rng);
    s.coin_color = rng.uniform_int(2);
    s.turn = 0;
    s.step = 0;
    return s;
}

int action_destination(int cell, int action) {
    const int row = cell / kGridSize;
    const int col = cell % kGridSize;
    switch (action) {
        case 0: return row > 0 ? cell - kGridSize : -1;              // north
        case 1: return row < kGridSize - 1 ? cell + kGridSize : -1;  // south
        case 2: return col > 0 ? cell - 1 : -1;                      // west
        case 3: return col < kGridSize - 1 ? cell + 1 : -1;          // east
        default: throw std::out_of_range("action out of range");
    }
}

ActionMask legal_actions(const CoinGameState& state, int agent) {
    if (agent < 0 || agent >= kNumAgents) throw std::out_of_range("agent index out of range");
    const int other = state.agent_pos[static_cast<std::size_t>(1 - agent)];
    ActionMask mask{};
    for (int a = 0; a < kNumActions; ++a) {
        const int dest = action_destination(state.agent_pos[static_cast<std::size_t>(agent)], a);
        mask[static_cast<std::size_t>(a)] = dest >= 0 && dest != other;
    }
    return mask;
}

bool any_legal(const ActionMask& mask) {
    for (bool m : mask)
        if (m) return true;
    return false;
}

StepOutcome step_coin_game(const CoinGameState& state, int action, Rng& rng) {
    const int agent = state.turn;
    const ActionMask mask = legal_actions(state, agent);
    if (action < 0 || action >= kNumActions || !mask[static_cast<std::size_t>(action)])
        throw std::invalid_argument("illegal action");

    StepOutcome out;
    out.state = state;
    const int dest = action_destination(state.agent_pos[static_cast<std::size_t>(agent)], action);
    out.state.agent_pos[static_cast<std::size_t>(agent)] = dest;

    if (dest == state.coin_pos) {
        out.coin_collected = true;
        out.own_coin = state.coin_color == agent;
        out.rewards[static_cast<std::size_t>(agent)] += 1;
        if (!out.own_coin) out.rewards[static_cast<std::size_t>(1 - agent)] -= 2;
        out.state.coin_pos = spawn_coin(out.state.agent_pos[0], out.state.agent_pos[1], rng);
        out.state.coin_color = rng.uniform_int(2);
    }

    out.state.turn = 1 - state.turn;
    out.state.step = state.step + 1;
    return out;
}

CoinGameState pass_turn(const CoinGameState& state) {
    CoinGameState s = state;
    s.turn = 1 - state.turn;
    s.step = state.step + 1;
    return s;
}

Observation encode_observation(const CoinGameState& state, int agent) {
    if (agent < 0 || agent >= kNumAgents) throw std::out_of_range("agent index out of range");
    Observation obs{};
    const auto self = static_cast<std::size_t>(state.agent_pos[static_cast<std::size_t>(agent)]);
    const auto other = static_cast<std::size_t>(state.agent_pos[static_cast<std::size_t>(1 - agent)]);
    obs[self] = 1.0;
    obs[kNumCells + other] = 1.0;
    const int coin_plane = state.coin_color == agent ? 2 : 3;
    obs[static_cast<std::size_t>(coin_plane * kNumCells + state.coin_pos)] = 1.0;
    return obs;
}

EpisodeMetrics episode_metrics(const EpisodeStats& stats) {
    EpisodeMetrics m;
    m.score = stats.rewards[0] + stats.rewards[1];
    m.total_coins = stats.coins[0] + stats.coins[1];
    m.own_coins = stats.own_coins[0] + stats.own_coins[1];
    m.own_coin_rate =
        m.total_coins > 0 ? static_cast<double>(m.own_coins) / m.total_coins : 0.0;
    return m;
}

}  // namespace qevo
