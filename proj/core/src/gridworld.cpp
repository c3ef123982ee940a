#include "vplan/gridworld.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace vplan {

const char* task_name(TaskKind t) {
    switch (t) {
        case TaskKind::FrozenLake: return "frozenlake";
        case TaskKind::Maze: return "maze";
        case TaskKind::MiniBehavior: return "minibehavior";
    }
    return "?";
}

TaskKind task_from_name(std::string_view name) {
    if (name == "frozenlake") return TaskKind::FrozenLake;
    if (name == "maze") return TaskKind::Maze;
    if (name == "minibehavior") return TaskKind::MiniBehavior;
    throw DataError("unknown task name: " + std::string(name));
}

const char* action_name(Action a) {
    switch (a) {
        case Action::Up: return "up";
        case Action::Down: return "down";
        case Action::Left: return "left";
        case Action::Right: return "right";
        case Action::Pick: return "pick";
        case Action::Drop: return "drop";
    }
    return "?";
}

Pos move_delta(Action a) {
    switch (a) {
        case Action::Up: return {-1, 0};
        case Action::Down: return {1, 0};
        case Action::Left: return {0, -1};
        case Action::Right: return {0, 1};
        default: return {0, 0};
    }
}

std::optional<Action> action_from_delta(int drow, int dcol) {
    if (drow == -1 && dcol == 0) return Action::Up;
    if (drow == 1 && dcol == 0) return Action::Down;
    if (drow == 0 && dcol == -1) return Action::Left;
    if (drow == 0 && dcol == 1) return Action::Right;
    return std::nullopt;
}

const char* invalid_reason_name(InvalidReason r) {
    switch (r) {
        case InvalidReason::WallCollision: return "wall_collision";
        case InvalidReason::OutOfBounds: return "out_of_bounds";
        case InvalidReason::HoleEntry: return "hole_entry";
        case InvalidReason::TableEntry: return "table_entry";
        case InvalidReason::PrinterBlock: return "printer_block";
        case InvalidReason::NoAdjacentPrinter: return "no_adjacent_printer";
        case InvalidReason::NoAdjacentTable: return "no_adjacent_table";
        case InvalidReason::Terminal: return "terminal";
    }
    return "?";
}

bool Layout::wall_between(Pos a, Action move) const {
    if (walls.empty()) return false;
    std::uint8_t bit = 0;
    switch (move) {
        case Action::Up: bit = kWallUp; break;
        case Action::Down: bit = kWallDown; break;
        case Action::Left: bit = kWallLeft; break;
        case Action::Right: bit = kWallRight; break;
        default: return false;
    }
    return (wall_mask(a) & bit) != 0;
}

namespace {

char cell_char(CellKind k) {
    switch (k) {
        case CellKind::Empty: return 'E';
        case CellKind::Hole: return 'H';
        case CellKind::Goal: return 'G';
        case CellKind::Table: return 'T';
        case CellKind::Printer: return 'P';
    }
    return '?';
}

CellKind cell_from_char(char c) {
    switch (c) {
        case 'E': return CellKind::Empty;
        case 'H': return CellKind::Hole;
        case 'G': return CellKind::Goal;
        case 'T': return CellKind::Table;
        case 'P': return CellKind::Printer;
        default: throw DataError(std::string("bad cell code '") + c + "'");
    }
}

constexpr char kHexDigits[] = "0123456789abcdef";

bool adjacent(Pos a, Pos b) {
    return std::abs(a.row - b.row) + std::abs(a.col - b.col) == 1;
}

}  // namespace

std::string Layout::serialize() const {
    std::ostringstream out;
    out << "layout " << task_name(task) << ' ' << size << '\n';
    out << "cells ";
    for (CellKind k : cells) out << cell_char(k);
    out << '\n';
    if (task == TaskKind::Maze) {
        out << "walls ";
        for (std::uint8_t m : walls) out << kHexDigits[m & 0xf];
        out << '\n';
    }
    return out.str();
}

Layout Layout::deserialize(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string tag, taskname;
    Layout l;
    if (!(in >> tag >> taskname >> l.size) || tag != "layout")
        throw DataError("malformed layout header");
    l.task = task_from_name(taskname);
    if (l.size < 2 || l.size > 64) throw DataError("layout size out of range");
    const std::size_t n = static_cast<std::size_t>(l.size) * static_cast<std::size_t>(l.size);
    std::string cells;
    if (!(in >> tag >> cells) || tag != "cells" || cells.size() != n)
        throw DataError("malformed layout cells");
    l.cells.resize(n);
    for (std::size_t i = 0; i < n; ++i) l.cells[i] = cell_from_char(cells[i]);
    if (l.task == TaskKind::Maze) {
        std::string walls;
        if (!(in >> tag >> walls) || tag != "walls" || walls.size() != n)
            throw DataError("malformed layout walls");
        l.walls.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const char c = walls[i];
            if (c >= '0' && c <= '9') l.walls[i] = static_cast<std::uint8_t>(c - '0');
            else if (c >= 'a' && c <= 'f') l.walls[i] = static_cast<std::uint8_t>(c - 'a' + 10);
            else throw DataError("bad wall digit");
        }
    }
    for (int r = 0; r < l.size; ++r)
        for (int c = 0; c < l.size; ++c) {
            const Pos p{r, c};
            switch (l.cell(p)) {
                case CellKind::Goal: l.goal_pos = p; break;
                case CellKind::Printer: l.printer_pos = p; break;
                case CellKind::Table: l.table_cells.push_back(p); break;
                default: break;
            }
        }
    return l;
}

std::string Layout::digest() const { return digest_hex(serialize()); }

std::string EnvState::serialize() const {
    std::ostringstream out;
    out << "state " << agent.row << ' ' << agent.col << ' ' << (carrying ? 1 : 0) << ' '
        << (printer_present ? 1 : 0);
    return out.str();
}

EnvState EnvState::deserialize(std::string_view line, LayoutPtr layout) {
    std::istringstream in{std::string(line)};
    std::string tag;
    EnvState s;
    int carry = 0, printer = 0;
    if (!(in >> tag >> s.agent.row >> s.agent.col >> carry >> printer) || tag != "state")
        throw DataError("malformed state line");
    s.layout = std::move(layout);
    s.carrying = carry != 0;
    s.printer_present = printer != 0;
    if (!s.layout || !s.layout->in_bounds(s.agent)) throw DataError("state agent out of bounds");
    return s;
}

bool is_terminal(const EnvState& s) {
    const Layout& l = *s.layout;
    if (l.task == TaskKind::MiniBehavior) return !s.carrying && !s.printer_present;
    return s.agent == l.goal_pos;
}

std::optional<Pos> drop_target(const Layout& layout, Pos agent) {
    for (Action a : kMoveActions) {
        const Pos d = move_delta(a);
        const Pos p{agent.row + d.row, agent.col + d.col};
        if (layout.in_bounds(p) && layout.cell(p) == CellKind::Table) return p;
    }
    return std::nullopt;
}

namespace {

// Move legality outside EnvState, shared with the progress-map BFS.
// phase: 0 = printer present (MiniBehavior) / plain navigation, 1 = carrying.
std::optional<InvalidReason> move_blocked(const Layout& l, Pos from, Action move, int phase,
                                          Pos* dest_out) {
    const Pos d = move_delta(move);
    const Pos dest{from.row + d.row, from.col + d.col};
    if (!l.in_bounds(dest)) return InvalidReason::OutOfBounds;
    if (l.wall_between(from, move)) return InvalidReason::WallCollision;
    switch (l.cell(dest)) {
        case CellKind::Hole: return InvalidReason::HoleEntry;
        case CellKind::Table: return InvalidReason::TableEntry;
        case CellKind::Printer:
            if (phase == 0 && l.task == TaskKind::MiniBehavior)
                return InvalidReason::PrinterBlock;
            break;
        default: break;
    }
    if (dest_out) *dest_out = dest;
    return std::nullopt;
}

bool cell_passable(const Layout& l, Pos p, int phase) {
    switch (l.cell(p)) {
        case CellKind::Hole:
        case CellKind::Table: return false;
        case CellKind::Printer: return phase == 1;
        default: return true;
    }
}

}  // namespace

TransitionResult apply_action(const EnvState& state, Action action) {
    const Layout& l = *state.layout;
    if (is_terminal(state)) return TransitionResult::invalid(InvalidReason::Terminal);

    if (action == Action::Pick) {
        if (l.task != TaskKind::MiniBehavior || state.carrying || !state.printer_present ||
            !adjacent(state.agent, l.printer_pos))
            return TransitionResult::invalid(InvalidReason::NoAdjacentPrinter);
        EnvState next = state;
        next.carrying = true;
        next.printer_present = false;
        return TransitionResult::valid(std::move(next));
    }
    if (action == Action::Drop) {
        if (l.task != TaskKind::MiniBehavior || !state.carrying)
            return TransitionResult::invalid(InvalidReason::NoAdjacentTable);
        if (!drop_target(l, state.agent))
            return TransitionResult::invalid(InvalidReason::NoAdjacentTable);
        EnvState next = state;
        next.carrying = false;
        next.printer_present = false;  // printer now sits on drop_target(l, agent)
        return TransitionResult::valid(std::move(next));
    }

    const int phase = state.carrying ? 1 : 0;
    Pos dest;
    if (auto why = move_blocked(l, state.agent, action, phase, &dest))
        return TransitionResult::invalid(*why);
    EnvState next = state;
    next.agent = dest;
    return TransitionResult::valid(std::move(next));
}

std::vector<Action> legal_actions(const EnvState& state) {
    std::vector<Action> out;
    const bool mb = state.layout->task == TaskKind::MiniBehavior;
    for (Action a : kAllActions) {
        if (!mb && (a == Action::Pick || a == Action::Drop)) continue;
        if (apply_action(state, a).ok()) out.push_back(a);
    }
    return out;
}

ProgressMap compute_progress_map(const Layout& layout) {
    ProgressMap pm;
    pm.task = layout.task;
    pm.size = layout.size;
    pm.phases = layout.task == TaskKind::MiniBehavior ? 2 : 1;
    pm.values.assign(static_cast<std::size_t>(pm.phases * pm.size * pm.size),
                     ProgressMap::kUnreachable);

    struct Node {
        Pos p;
        int phase;
    };
    std::deque<Node> queue;

    if (layout.task == TaskKind::MiniBehavior) {
        // Seed with D=1: carrying next to a table cell, one Drop from done.
        for (int r = 0; r < layout.size; ++r)
            for (int c = 0; c < layout.size; ++c) {
                const Pos p{r, c};
                if (!cell_passable(layout, p, 1)) continue;
                if (drop_target(layout, p)) {
                    pm.at_mut(p, 1) = 1;
                    queue.push_back({p, 1});
                }
            }
    } else {
        pm.at_mut(layout.goal_pos, 0) = 0;
        queue.push_back({layout.goal_pos, 0});
    }

    // Reverse BFS: relax predecessors of each dequeued node.
    while (!queue.empty()) {
        const Node n = queue.front();
        queue.pop_front();
        const int d = pm.at(n.p, n.phase);

        for (Action a : kMoveActions) {
            const Pos delta = move_delta(a);
            const Pos from{n.p.row - delta.row, n.p.col - delta.col};
            if (!layout.in_bounds(from) || !cell_passable(layout, from, n.phase)) continue;
            if (move_blocked(layout, from, a, n.phase, nullptr)) continue;
            if (pm.at(from, n.phase) != ProgressMap::kUnreachable) continue;
            pm.at_mut(from, n.phase) = d + 1;
            queue.push_back({from, n.phase});
        }
        if (layout.task == TaskKind::MiniBehavior && n.phase == 1 &&
            adjacent(n.p, layout.printer_pos) && cell_passable(layout, n.p, 0) &&
            pm.at(n.p, 0) == ProgressMap::kUnreachable) {
            pm.at_mut(n.p, 0) = d + 1;  // Pick transitions phase 0 -> 1 in place
            queue.push_back({n.p, 0});
        }
    }
    return pm;
}

int ProgressMap::remaining(const EnvState& s) const {
    if (is_terminal(s)) return 0;
    return at(s.agent, s.carrying ? 1 : 0);
}

std::vector<Action> enumerate_optimal_actions(const EnvState& state, const ProgressMap& pmap) {
    std::vector<Action> out;
    const int d = pmap.remaining(state);
    if (d <= 0) return out;
    for (Action a : legal_actions(state)) {
        const TransitionResult r = apply_action(state, a);
        if (r.ok() && pmap.remaining(r.next()) == d - 1) out.push_back(a);
    }
    return out;
}

Trajectory sample_optimal_trajectory(const EnvState& state, const ProgressMap& pmap,
                                     std::uint64_t seed) {
    Rng rng(seed);
    Trajectory t;
    t.states.push_back(state);
    EnvState cur = state;
    while (!is_terminal(cur)) {
        const std::vector<Action> opts = enumerate_optimal_actions(cur, pmap);
        if (opts.empty()) throw DataError("optimal trajectory requested from unreachable state");
        const Action a = rng.pick(opts);
        cur = apply_action(cur, a).next();
        t.actions.push_back(a);
        t.states.push_back(cur);
    }
    return t;
}

Trajectory random_walk(const EnvState& state, int max_len, std::uint64_t seed) {
    Rng rng(seed);
    Trajectory t;
    t.states.push_back(state);
    EnvState cur = state;
    for (int i = 0; i < max_len && !is_terminal(cur); ++i) {
        const std::vector<Action> legal = legal_actions(cur);
        if (legal.empty()) break;
        const Action a = rng.pick(legal);
        cur = apply_action(cur, a).next();
        t.actions.push_back(a);
        t.states.push_back(cur);
    }
    return t;
}

int min_size(TaskKind task) { return task == TaskKind::MiniBehavior ? 7 : 3; }

namespace {

Layout gen_frozenlake(int size, Rng& rng) {
    Layout l;
    l.task = TaskKind::FrozenLake;
    l.size = size;
    const int n = size * size;
    for (int attempt = 0; attempt < 10000; ++attempt) {
        l.cells.assign(static_cast<std::size_t>(n), CellKind::Empty);
        const int gi = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
        l.goal_pos = {gi / size, gi % size};
        l.cells[static_cast<std::size_t>(gi)] = CellKind::Goal;
        for (int i = 0; i < n; ++i)
            if (i != gi && rng.chance(0.2)) l.cells[static_cast<std::size_t>(i)] = CellKind::Hole;
        int holes = 0;
        for (CellKind k : l.cells)
            if (k == CellKind::Hole) ++holes;
        if (holes == 0) continue;
        const ProgressMap pm = compute_progress_map(l);
        int spawnable = 0;
        for (int i = 0; i < n; ++i)
            if (i != gi && pm.values[static_cast<std::size_t>(i)] > 0) ++spawnable;
        if (spawnable >= 1) return l;
    }
    throw ConfigError("frozenlake generation: constraints unsatisfiable");
}

Layout gen_maze(int size, Rng& rng) {
    Layout l;
    l.task = TaskKind::Maze;
    l.size = size;
    const int n = size * size;
    l.cells.assign(static_cast<std::size_t>(n), CellKind::Empty);
    l.walls.assign(static_cast<std::size_t>(n), kWallUp | kWallDown | kWallLeft | kWallRight);

    // Recursive backtracker: carve a uniform spanning-tree-shaped passage set.
    std::vector<char> visited(static_cast<std::size_t>(n), 0);
    std::vector<int> stack;
    const int start = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    visited[static_cast<std::size_t>(start)] = 1;
    stack.push_back(start);
    while (!stack.empty()) {
        const int cur = stack.back();
        const Pos p{cur / size, cur % size};
        std::vector<Action> frontier;
        for (Action a : kMoveActions) {
            const Pos d = move_delta(a);
            const Pos q{p.row + d.row, p.col + d.col};
            if (l.in_bounds(q) && !visited[static_cast<std::size_t>(l.index(q))])
                frontier.push_back(a);
        }
        if (frontier.empty()) {
            stack.pop_back();
            continue;
        }
        const Action a = rng.pick(frontier);
        const Pos d = move_delta(a);
        const Pos q{p.row + d.row, p.col + d.col};
        auto open = [&](Pos at, std::uint8_t bit) {
            l.walls[static_cast<std::size_t>(l.index(at))] &= static_cast<std::uint8_t>(~bit);
        };
        switch (a) {
            case Action::Up: open(p, kWallUp); open(q, kWallDown); break;
            case Action::Down: open(p, kWallDown); open(q, kWallUp); break;
            case Action::Left: open(p, kWallLeft); open(q, kWallRight); break;
            case Action::Right: open(p, kWallRight); open(q, kWallLeft); break;
            default: break;
        }
        visited[static_cast<std::size_t>(l.index(q))] = 1;
        stack.push_back(l.index(q));
    }

    const int gi = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    l.goal_pos = {gi / size, gi % size};
    l.cells[static_cast<std::size_t>(gi)] = CellKind::Goal;
    return l;
}

Layout gen_minibehavior(int size, Rng& rng) {
    Layout l;
    l.task = TaskKind::MiniBehavior;
    l.size = size;
    const int n = size * size;
    for (int attempt = 0; attempt < 10000; ++attempt) {
        l.cells.assign(static_cast<std::size_t>(n), CellKind::Empty);
        l.table_cells.clear();
        const int table_row = rng.chance(0.5) ? 0 : size - 1;
        const int k = rng.range(2, size - 2);
        const int c0 = rng.range(0, size - k);
        for (int c = c0; c < c0 + k; ++c) {
            const Pos p{table_row, c};
            l.cells[static_cast<std::size_t>(l.index(p))] = CellKind::Table;
            l.table_cells.push_back(p);
        }
        const int pi = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
        const Pos pp{pi / size, pi % size};
        if (l.cell(pp) == CellKind::Table) continue;
        l.printer_pos = pp;
        l.cells[static_cast<std::size_t>(pi)] = CellKind::Printer;

        const ProgressMap pm = compute_progress_map(l);
        int spawnable = 0;
        for (int r = 0; r < size; ++r)
            for (int c = 0; c < size; ++c) {
                const Pos p{r, c};
                if (l.cell(p) != CellKind::Empty) continue;
                if (pm.at(p, 0) > 0) ++spawnable;
            }
        if (spawnable >= 1) return l;
    }
    throw ConfigError("minibehavior generation: constraints unsatisfiable");
}

}  // namespace

Layout gen_layout(TaskKind task, int size, std::uint64_t seed) {
    if (size < min_size(task) || size > 32)
        throw ConfigError(std::string("unsupported size for ") + task_name(task) + ": " +
                          std::to_string(size));
    Rng rng(seed);
    switch (task) {
        case TaskKind::FrozenLake: return gen_frozenlake(size, rng);
        case TaskKind::Maze: return gen_maze(size, rng);
        case TaskKind::MiniBehavior: return gen_minibehavior(size, rng);
    }
    throw ConfigError("bad task");
}

EnvState spawn_state(LayoutPtr layout, std::uint64_t seed) {
    Rng rng(seed);
    const Layout& l = *layout;
    const ProgressMap pm = compute_progress_map(l);
    std::vector<Pos> candidates;
    for (int r = 0; r < l.size; ++r)
        for (int c = 0; c < l.size; ++c) {
            const Pos p{r, c};
            if (!cell_passable(l, p, 0)) continue;
            if (l.task != TaskKind::MiniBehavior && p == l.goal_pos) continue;
            if (pm.at(p, 0) > 0) candidates.push_back(p);
        }
    if (candidates.empty()) throw DataError("layout has no solvable spawn cell");
    EnvState s;
    s.layout = std::move(layout);
    s.agent = candidates[static_cast<std::size_t>(rng.below(candidates.size()))];
    s.carrying = false;
    s.printer_present = l.task == TaskKind::MiniBehavior;
    return s;
}

}  // namespace vplan
