#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "vplan/common.hpp"

namespace vplan {

enum class TaskKind : std::uint8_t { FrozenLake, Maze, MiniBehavior };

const char* task_name(TaskKind t);
TaskKind task_from_name(std::string_view name);

enum class CellKind : std::uint8_t { Empty, Hole, Goal, Table, Printer };

enum class Action : std::uint8_t { Up, Down, Left, Right, Pick, Drop };

constexpr std::array<Action, 4> kMoveActions = {Action::Up, Action::Down, Action::Left,
                                                Action::Right};
constexpr std::array<Action, 6> kAllActions = {Action::Up,    Action::Down, Action::Left,
                                               Action::Right, Action::Pick, Action::Drop};

const char* action_name(Action a);

struct Pos {
    int row = 0;
    int col = 0;
    bool operator==(const Pos&) const = default;
};

// Row/col delta for a move action; Pick/Drop have no displacement.
Pos move_delta(Action a);
std::optional<Action> action_from_delta(int drow, int dcol);

// Wall mask bits, one per side of a cell (Maze only).
enum WallBit : std::uint8_t {
    kWallUp = 1,
    kWallDown = 2,
    kWallLeft = 4,
    kWallRight = 8,
};

struct Layout {
    TaskKind task = TaskKind::FrozenLake;
    int size = 0;
    std::vector<CellKind> cells;       // row-major, size*size
    std::vector<std::uint8_t> walls;   // row-major 4-bit masks; empty unless Maze
    Pos goal_pos;                      // FrozenLake goal / Maze flag
    Pos printer_pos;                   // MiniBehavior
    std::vector<Pos> table_cells;      // MiniBehavior, contiguous block

    int index(Pos p) const { return p.row * size + p.col; }
    bool in_bounds(Pos p) const {
        return p.row >= 0 && p.row < size && p.col >= 0 && p.col < size;
    }
    CellKind cell(Pos p) const { return cells[static_cast<std::size_t>(index(p))]; }
    std::uint8_t wall_mask(Pos p) const {
        return walls.empty() ? 0 : walls[static_cast<std::size_t>(index(p))];
    }
    bool wall_between(Pos a, Action move) const;

    std::string serialize() const;
    static Layout deserialize(std::string_view text);
    std::string digest() const;
    bool operator==(const Layout&) const = default;
};

using LayoutPtr = std::shared_ptr<const Layout>;

struct EnvState {
    LayoutPtr layout;
    Pos agent;
    bool carrying = false;         // MiniBehavior: agent holds the printer
    bool printer_present = false;  // MiniBehavior: printer still at printer_pos

    bool operator==(const EnvState& o) const {
        return agent == o.agent && carrying == o.carrying &&
               printer_present == o.printer_present &&
               (layout == o.layout || (layout && o.layout && *layout == *o.layout));
    }
    std::string serialize() const;  // state line only; layout serialized separately
    static EnvState deserialize(std::string_view line, LayoutPtr layout);
};

// True once the task is solved: agent at goal, or printer dropped on the table.
bool is_terminal(const EnvState& s);

// MiniBehavior: canonical table cell that receives the printer when the agent
// drops it; first adjacent table cell in Up/Down/Left/Right scan order.
std::optional<Pos> drop_target(const Layout& layout, Pos agent);

enum class InvalidReason : std::uint8_t {
    WallCollision,
    OutOfBounds,
    HoleEntry,
    TableEntry,
    PrinterBlock,
    NoAdjacentPrinter,
    NoAdjacentTable,
    Terminal,
};

const char* invalid_reason_name(InvalidReason r);

class TransitionResult {
public:
    static TransitionResult valid(EnvState next) { return TransitionResult(std::move(next)); }
    static TransitionResult invalid(InvalidReason r) { return TransitionResult(r); }

    bool ok() const { return std::holds_alternative<EnvState>(v_); }
    const EnvState& next() const { return std::get<EnvState>(v_); }
    InvalidReason reason() const { return std::get<InvalidReason>(v_); }

private:
    explicit TransitionResult(EnvState s) : v_(std::move(s)) {}
    explicit TransitionResult(InvalidReason r) : v_(r) {}
    std::variant<EnvState, InvalidReason> v_;
};

// Remaining-step counts D over the extended state space (cell x carrying phase).
// Phase 0: printer at its cell / plain navigation. Phase 1: agent carrying.
struct ProgressMap {
    static constexpr int kUnreachable = -1;

    TaskKind task = TaskKind::FrozenLake;
    int size = 0;
    int phases = 1;
    std::vector<int> values;  // [phase * size*size + row*size + col]

    int at(Pos p, int phase = 0) const {
        return values[static_cast<std::size_t>(phase * size * size + p.row * size + p.col)];
    }
    int& at_mut(Pos p, int phase) {
        return values[static_cast<std::size_t>(phase * size * size + p.row * size + p.col)];
    }
    // D of a full state; 0 for terminal states.
    int remaining(const EnvState& s) const;
};

struct Trajectory {
    std::vector<EnvState> states;
    std::vector<Action> actions;  // one per transition; |actions| == |states|-1
};

Layout gen_layout(TaskKind task, int size, std::uint64_t seed);
EnvState spawn_state(LayoutPtr layout, std::uint64_t seed);
TransitionResult apply_action(const EnvState& state, Action action);
std::vector<Action> legal_actions(const EnvState& state);
ProgressMap compute_progress_map(const Layout& layout);
std::vector<Action> enumerate_optimal_actions(const EnvState& state, const ProgressMap& pmap);
Trajectory sample_optimal_trajectory(const EnvState& state, const ProgressMap& pmap,
                                     std::uint64_t seed);
Trajectory random_walk(const EnvState& state, int max_len, std::uint64_t seed);

// Supported size range per task (generation precondition).
int min_size(TaskKind task);

}  // namespace vplan
