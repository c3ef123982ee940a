#include <map>
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "vplan/gridworld.hpp"

using namespace vplan;
using namespace vplan::testing;

namespace {

LayoutPtr open_lake(int size, Pos goal) {
    Layout l;
    l.task = TaskKind::FrozenLake;
    l.size = size;
    l.cells.assign(static_cast<std::size_t>(size * size), CellKind::Empty);
    l.goal_pos = goal;
    l.cells[static_cast<std::size_t>(l.index(goal))] = CellKind::Goal;
    return std::make_shared<Layout>(std::move(l));
}

EnvState lake_state(const LayoutPtr& l, Pos agent) {
    EnvState s;
    s.layout = l;
    s.agent = agent;
    return s;
}

int internal_open_passages(const Layout& l) {
    int open = 0;
    for (int r = 0; r < l.size; ++r)
        for (int c = 0; c < l.size; ++c) {
            if (c + 1 < l.size && !l.wall_between({r, c}, Action::Right)) ++open;
            if (r + 1 < l.size && !l.wall_between({r, c}, Action::Down)) ++open;
        }
    return open;
}

}  // namespace

TEST_CASE("frozenlake generation satisfies constraints") {
    for (std::uint64_t seed : {7ULL, 11ULL, 99ULL}) {
        const Layout l = gen_layout(TaskKind::FrozenLake, 3, seed);
        int holes = 0, goals = 0;
        for (CellKind k : l.cells) {
            holes += k == CellKind::Hole;
            goals += k == CellKind::Goal;
        }
        CHECK(goals == 1);
        CHECK(holes >= 1);
        const ProgressMap pm = compute_progress_map(l);
        bool spawnable = false;
        for (int i = 0; i < 9; ++i)
            if (pm.values[static_cast<std::size_t>(i)] > 0) spawnable = true;
        CHECK(spawnable);
    }
}

TEST_CASE("maze generation is a spanning tree with symmetric walls") {
    const Layout l = gen_layout(TaskKind::Maze, 4, 1);
    CHECK(internal_open_passages(l) == 15);  // 16 cells, tree has 15 edges
    int flags = 0;
    for (CellKind k : l.cells) flags += k == CellKind::Goal;
    CHECK(flags == 1);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) {
            if (c + 1 < 4)
                CHECK(l.wall_between({r, c}, Action::Right) ==
                      l.wall_between({r, c + 1}, Action::Left));
            if (r + 1 < 4)
                CHECK(l.wall_between({r, c}, Action::Down) ==
                      l.wall_between({r + 1, c}, Action::Up));
        }
    // Spanning tree => everything reachable from the flag.
    const ProgressMap pm = compute_progress_map(l);
    for (int v : pm.values) CHECK(v >= 0);
}

TEST_CASE("minibehavior generation satisfies constraints") {
    const Layout l = gen_layout(TaskKind::MiniBehavior, 7, 3);
    int printers = 0, tables = 0;
    for (CellKind k : l.cells) {
        printers += k == CellKind::Printer;
        tables += k == CellKind::Table;
    }
    CHECK(printers == 1);
    CHECK(tables >= 1);
    CHECK(static_cast<int>(l.table_cells.size()) == tables);
    CHECK(l.cell(l.printer_pos) == CellKind::Printer);
    // contiguity: table cells share a row and span consecutive columns
    for (std::size_t i = 1; i < l.table_cells.size(); ++i) {
        CHECK(l.table_cells[i].row == l.table_cells[0].row);
        CHECK(l.table_cells[i].col == l.table_cells[i - 1].col + 1);
    }
    const EnvState s = spawn_state(std::make_shared<Layout>(l), 5);
    CHECK(s.agent != l.printer_pos);
    CHECK(l.cell(s.agent) == CellKind::Empty);
}

TEST_CASE("generation is deterministic in the seed") {
    for (TaskKind task : {TaskKind::FrozenLake, TaskKind::Maze, TaskKind::MiniBehavior}) {
        const int size = task == TaskKind::MiniBehavior ? 7 : 4;
        const Layout a = gen_layout(task, size, 42);
        const Layout b = gen_layout(task, size, 42);
        CHECK(a.serialize() == b.serialize());
        auto lp = std::make_shared<Layout>(a);
        CHECK(spawn_state(lp, 9) == spawn_state(lp, 9));
    }
    CHECK_THROWS_AS(gen_layout(TaskKind::MiniBehavior, 3, 1), ConfigError);
}

TEST_CASE("spawn lands on a solvable non-goal cell") {
    const LayoutPtr l = open_lake(3, {2, 2});
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const EnvState s = spawn_state(l, seed);
        CHECK(s.agent != Pos{2, 2});
        CHECK(l->cell(s.agent) == CellKind::Empty);
    }
}

TEST_CASE("moves shift one cell and border moves fail typed") {
    const LayoutPtr l = open_lake(3, {2, 2});
    const EnvState s = lake_state(l, {0, 0});
    const TransitionResult right = apply_action(s, Action::Right);
    REQUIRE(right.ok());
    CHECK(right.next().agent == Pos{0, 1});
    const TransitionResult up = apply_action(s, Action::Up);
    REQUIRE(!up.ok());
    CHECK(up.reason() == InvalidReason::OutOfBounds);
}

TEST_CASE("hole entry and terminal transitions are invalid") {
    Layout l = *open_lake(3, {2, 2});
    l.cells[1] = CellKind::Hole;  // (0,1)
    auto lp = std::make_shared<Layout>(l);
    const TransitionResult r = apply_action(lake_state(lp, {0, 0}), Action::Right);
    REQUIRE(!r.ok());
    CHECK(r.reason() == InvalidReason::HoleEntry);
    const TransitionResult t = apply_action(lake_state(lp, {2, 2}), Action::Up);
    REQUIRE(!t.ok());
    CHECK(t.reason() == InvalidReason::Terminal);
}

TEST_CASE("minibehavior pick and drop rules") {
    const Layout l = gen_layout(TaskKind::MiniBehavior, 7, 3);
    auto lp = std::make_shared<Layout>(l);
    // find a passable cell adjacent to the printer
    EnvState s;
    s.layout = lp;
    s.printer_present = true;
    bool found = false;
    for (Action a : kMoveActions) {
        const Pos d = move_delta(a);
        const Pos p{l.printer_pos.row + d.row, l.printer_pos.col + d.col};
        if (l.in_bounds(p) && l.cell(p) == CellKind::Empty) {
            s.agent = p;
            found = true;
            break;
        }
    }
    REQUIRE(found);
    const TransitionResult picked = apply_action(s, Action::Pick);
    REQUIRE(picked.ok());
    CHECK(picked.next().carrying);
    CHECK(!picked.next().printer_present);
    // pick with no adjacent printer
    const TransitionResult bad = apply_action(picked.next(), Action::Pick);
    REQUIRE(!bad.ok());
    CHECK(bad.reason() == InvalidReason::NoAdjacentPrinter);
    // drop requires adjacency to table
    EnvState carrying = picked.next();
    const TransitionResult dropped = apply_action(carrying, Action::Drop);
    if (drop_target(l, carrying.agent)) {
        CHECK(dropped.ok());
    } else {
        REQUIRE(!dropped.ok());
        CHECK(dropped.reason() == InvalidReason::NoAdjacentTable);
    }
}

TEST_CASE("legal_actions matches apply_action exactly") {
    const LayoutPtr l = open_lake(3, {2, 2});
    const std::vector<Action> corner = legal_actions(lake_state(l, {0, 0}));
    CHECK(corner == std::vector<Action>{Action::Down, Action::Right});
    // carrying, not adjacent to table: moves only
    const Layout mb = gen_layout(TaskKind::MiniBehavior, 7, 3);
    auto mbp = std::make_shared<Layout>(mb);
    for (const EnvState& s : all_states(mbp)) {
        const std::vector<Action> legal = legal_actions(s);
        for (Action a : kAllActions) {
            const bool ok = apply_action(s, a).ok();
            const bool listed = std::find(legal.begin(), legal.end(), a) != legal.end();
            CHECK(ok == listed);
        }
    }
}

TEST_CASE("progress map on the open 3x3 lake equals manhattan distance") {
    const LayoutPtr l = open_lake(3, {2, 2});
    const ProgressMap pm = compute_progress_map(*l);
    CHECK(pm.remaining(lake_state(l, {0, 0})) == 4);
    CHECK(pm.remaining(lake_state(l, {2, 1})) == 1);
    CHECK(pm.remaining(lake_state(l, {2, 2})) == 0);
}

TEST_CASE("progress map equals exhaustive DFS search on small instances") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        for (TaskKind task : {TaskKind::FrozenLake, TaskKind::Maze}) {
            const auto lp = std::make_shared<Layout>(gen_layout(task, 4, seed));
            const ProgressMap pm = compute_progress_map(*lp);
            for (const EnvState& s : all_states(lp)) {
                CHECK(pm.remaining(s) == dfs_min_steps(s));
            }
        }
    }
}

TEST_CASE("progress map equals relaxation oracle on minibehavior") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto lp = std::make_shared<Layout>(gen_layout(TaskKind::MiniBehavior, 7, seed));
        const ProgressMap pm = compute_progress_map(*lp);
        for (const EnvState& s : all_states(lp)) {
            CHECK(pm.remaining(s) == relaxation_min_steps(s));
        }
    }
}

TEST_CASE("unit decrement: some legal action reduces D by one") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        for (TaskKind task : {TaskKind::FrozenLake, TaskKind::Maze, TaskKind::MiniBehavior}) {
            const int size = task == TaskKind::MiniBehavior ? 7 : 4;
            const auto lp = std::make_shared<Layout>(gen_layout(task, size, seed));
            const ProgressMap pm = compute_progress_map(*lp);
            for (const EnvState& s : all_states(lp)) {
                const int d = pm.remaining(s);
                if (d <= 0) continue;
                bool decremented = false;
                for (Action a : legal_actions(s)) {
                    const TransitionResult r = apply_action(s, a);
                    if (r.ok() && pm.remaining(r.next()) == d - 1) decremented = true;
                }
                CHECK(decremented);
            }
        }
    }
}

TEST_CASE("maze has a unique simple path between any two cells") {
    const auto lp = std::make_shared<Layout>(gen_layout(TaskKind::Maze, 4, 5));
    const ProgressMap pm = compute_progress_map(*lp);
    for (const EnvState& s : all_states(lp)) {
        if (is_terminal(s)) continue;
        const auto paths = enumerate_shortest_paths(s);
        CHECK(paths.size() == 1);  // tree => unique simple path to the flag
        CHECK(static_cast<int>(paths[0].size()) == pm.remaining(s));
    }
}

TEST_CASE("transition soundness on every state of small instances") {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        for (TaskKind task : {TaskKind::FrozenLake, TaskKind::Maze}) {
            for (int size : {3, 4}) {
                const auto lp = std::make_shared<Layout>(gen_layout(task, size, seed));
                for (const EnvState& s : all_states(lp)) {
                    for (Action a : kAllActions) {
                        const TransitionResult r = apply_action(s, a);
                        if (!r.ok()) continue;
                        const EnvState& n = r.next();
                        CHECK(lp->in_bounds(n.agent));
                        CHECK(lp->cell(n.agent) != CellKind::Hole);
                        CHECK(lp->cell(n.agent) != CellKind::Table);
                        if (n.carrying) CHECK(!n.printer_present);
                    }
                }
            }
        }
    }
}

TEST_CASE("optimal action enumeration") {
    const LayoutPtr l = open_lake(3, {2, 2});
    const auto pm = compute_progress_map(*l);
    CHECK(enumerate_optimal_actions(lake_state(l, {0, 0}), pm).size() == 2);  // diagonal
    CHECK(enumerate_optimal_actions(lake_state(l, {2, 0}), pm) ==
          std::vector<Action>{Action::Right});
    // cross-check against DFS oracle on minibehavior
    const auto mbp = std::make_shared<Layout>(gen_layout(TaskKind::MiniBehavior, 7, 2));
    const auto mbpm = compute_progress_map(*mbp);
    for (const EnvState& s : all_states(mbp)) {
        const int d = mbpm.remaining(s);
        if (d <= 0) continue;
        for (Action a : enumerate_optimal_actions(s, mbpm)) {
            const TransitionResult r = apply_action(s, a);
            REQUIRE(r.ok());
            CHECK(relaxation_min_steps(r.next()) == d - 1);
        }
    }
}

TEST_CASE("optimal trajectory sampling length and support") {
    const LayoutPtr l = open_lake(3, {2, 2});
    const auto pm = compute_progress_map(*l);
    const EnvState s0 = lake_state(l, {0, 0});
    // every sample has length D(v0) and each step decrements D
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const Trajectory t = sample_optimal_trajectory(s0, pm, seed);
        CHECK(static_cast<int>(t.actions.size()) == 4);
        CHECK(t.states.size() == t.actions.size() + 1);
        for (std::size_t i = 0; i + 1 < t.states.size(); ++i)
            CHECK(pm.remaining(t.states[i + 1]) == pm.remaining(t.states[i]) - 1);
    }
    // support covers all shortest paths (6 monotone lattice paths on 3x3)
    const auto all = enumerate_shortest_paths(s0);
    CHECK(all.size() == 6);
    std::set<std::string> seen;
    for (std::uint64_t seed = 0; seed < 10000; ++seed) {
        const Trajectory t = sample_optimal_trajectory(s0, pm, seed);
        std::string sig;
        for (Action a : t.actions) sig += action_name(a)[0];
        seen.insert(sig);
    }
    CHECK(seen.size() == all.size());
}

TEST_CASE("random walk basics and action uniformity") {
    const LayoutPtr l = open_lake(3, {2, 2});
    const EnvState s0 = lake_state(l, {0, 0});
    CHECK(random_walk(s0, 0, 1).states.size() == 1);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Trajectory t = random_walk(s0, 12, seed);
        CHECK(t.states.size() == t.actions.size() + 1);
        for (std::size_t i = 0; i < t.actions.size(); ++i) {
            const TransitionResult r = apply_action(t.states[i], t.actions[i]);
            REQUIRE(r.ok());
            CHECK(r.next() == t.states[i + 1]);
        }
    }
    // first-step action frequencies over 10k walks: multinomial 3 sigma
    std::map<Action, int> counts;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        const Trajectory t = random_walk(s0, 1, derive_seed(77, static_cast<std::uint64_t>(i)));
        REQUIRE(!t.actions.empty());
        counts[t.actions[0]]++;
    }
    const double p = 0.5;  // two legal actions at the corner
    const double sigma = std::sqrt(n * p * (1 - p));
    CHECK(counts.size() == 2);
    for (const auto& [a, c] : counts) {
        (void)a;
        CHECK(std::abs(c - n * p) <= 3 * sigma);
    }
}

TEST_CASE("layout and state serialization round-trips") {
    for (TaskKind task : {TaskKind::FrozenLake, TaskKind::Maze, TaskKind::MiniBehavior}) {
        const int size = task == TaskKind::MiniBehavior ? 7 : 5;
        const Layout l = gen_layout(task, size, 123);
        const Layout back = Layout::deserialize(l.serialize());
        CHECK(back == l);
        CHECK(back.digest() == l.digest());
        auto lp = std::make_shared<Layout>(l);
        const EnvState s = spawn_state(lp, 4);
        const EnvState sback = EnvState::deserialize(s.serialize(), lp);
        CHECK(sback == s);
    }
    CHECK_THROWS_AS(Layout::deserialize("nonsense"), DataError);
}
