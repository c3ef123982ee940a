#include "vplan/raster.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace vplan {

namespace {

constexpr std::uint8_t kHoleGray = 25;
constexpr std::uint8_t kGoalGray = 90;
constexpr std::uint8_t kTableGray = 150;
constexpr std::uint8_t kPrinterGray = 60;
constexpr std::uint8_t kAgentGray = 40;
constexpr std::uint8_t kCarryMarkGray = 140;

Sprite uniform_tile(int t, std::uint8_t gray) {
    Sprite s;
    s.gray.assign(static_cast<std::size_t>(t * t), gray);
    s.mask.assign(static_cast<std::size_t>(t * t), 1);
    return s;
}

void paint_hole(Sprite& s, int t) {
    const int m = t / 8;
    for (int r = m; r < t - m; ++r)
        for (int c = m; c < t - m; ++c) s.gray[static_cast<std::size_t>(r * t + c)] = kHoleGray;
}

void paint_goal(Sprite& s, int t) {
    // upward triangle, apex near the top
    const int top = t / 5;
    const int bottom = t - t / 5;
    const double cx = (t - 1) / 2.0;
    for (int r = top; r < bottom; ++r) {
        const double half = (r - top) * 0.6 + 0.5;
        for (int c = 0; c < t; ++c)
            if (std::abs(c - cx) <= half) s.gray[static_cast<std::size_t>(r * t + c)] = kGoalGray;
    }
}

void paint_printer(Sprite& s, int t) {
    const int m = t / 4;
    const int th = std::max(2, t / 8);
    for (int r = m; r < t - m; ++r)
        for (int c = m; c < t - m; ++c) {
            const bool border = r < m + th || r >= t - m - th || c < m + th || c >= t - m - th;
            if (border) s.gray[static_cast<std::size_t>(r * t + c)] = kPrinterGray;
        }
}

Sprite agent_disk(int t, bool carrying) {
    Sprite s;
    s.gray.assign(static_cast<std::size_t>(t * t), 0);
    s.mask.assign(static_cast<std::size_t>(t * t), 0);
    const double cx = (t - 1) / 2.0;
    const double radius = t * 5.0 / 16.0;
    for (int r = 0; r < t; ++r)
        for (int c = 0; c < t; ++c) {
            const double dr = r - cx, dc = c - cx;
            if (dr * dr + dc * dc <= radius * radius) {
                s.gray[static_cast<std::size_t>(r * t + c)] = kAgentGray;
                s.mask[static_cast<std::size_t>(r * t + c)] = 1;
            }
        }
    if (carrying) {
        const int m = t / 2 - t / 6;
        for (int r = m; r < m + t / 3; ++r)
            for (int c = m; c < m + t / 3; ++c)
                if (s.mask[static_cast<std::size_t>(r * t + c)])
                    s.gray[static_cast<std::size_t>(r * t + c)] = kCarryMarkGray;
    }
    return s;
}

Sprite composite(Sprite base, const Sprite& overlay) {
    for (std::size_t i = 0; i < base.gray.size(); ++i)
        if (overlay.mask[i]) base.gray[i] = overlay.gray[i];
    return base;
}

}  // namespace

TileAtlas TileAtlas::make_default(int tile_px) {
    if (tile_px < 8) throw ConfigError("tile_px must be >= 8");
    TileAtlas a;
    a.tile_px = tile_px;
    const int t = tile_px;

    Sprite empty = uniform_tile(t, a.background);
    Sprite hole = empty;
    paint_hole(hole, t);
    Sprite goal = empty;
    paint_goal(goal, t);
    Sprite table = uniform_tile(t, kTableGray);
    Sprite printer = empty;
    paint_printer(printer, t);
    Sprite table_printer = table;
    paint_printer(table_printer, t);

    a.agent_overlay = agent_disk(t, false);
    a.agent_carrying_overlay = agent_disk(t, true);

    a.base[static_cast<int>(CellContent::Empty)] = empty;
    a.base[static_cast<int>(CellContent::Hole)] = hole;
    a.base[static_cast<int>(CellContent::Goal)] = goal;
    a.base[static_cast<int>(CellContent::Table)] = table;
    a.base[static_cast<int>(CellContent::Printer)] = printer;
    a.base[static_cast<int>(CellContent::TableWithPrinter)] = table_printer;
    a.base[static_cast<int>(CellContent::Agent)] = composite(empty, a.agent_overlay);
    a.base[static_cast<int>(CellContent::AgentOnGoal)] = composite(goal, a.agent_overlay);
    a.base[static_cast<int>(CellContent::AgentCarrying)] =
        composite(empty, a.agent_carrying_overlay);
    return a;
}

double sprite_difference(const Sprite& a, const Sprite& b) {
    if (a.gray.size() != b.gray.size()) throw DataError("sprite size mismatch");
    std::size_t diff = 0;
    for (std::size_t i = 0; i < a.gray.size(); ++i) diff += a.gray[i] != b.gray[i];
    return static_cast<double>(diff) / static_cast<double>(a.gray.size());
}

CellGrid grid_of(const EnvState& state) {
    const Layout& l = *state.layout;
    CellGrid g;
    g.task = l.task;
    g.size = l.size;
    g.walls = l.walls;
    g.cells.resize(static_cast<std::size_t>(l.size * l.size));
    for (int r = 0; r < l.size; ++r)
        for (int c = 0; c < l.size; ++c) {
            CellContent cc = CellContent::Empty;
            switch (l.cell({r, c})) {
                case CellKind::Empty: cc = CellContent::Empty; break;
                case CellKind::Hole: cc = CellContent::Hole; break;
                case CellKind::Goal: cc = CellContent::Goal; break;
                case CellKind::Table: cc = CellContent::Table; break;
                case CellKind::Printer:
                    cc = state.printer_present ? CellContent::Printer : CellContent::Empty;
                    break;
            }
            g.cells[static_cast<std::size_t>(g.index(r, c))] = cc;
        }
    if (l.task == TaskKind::MiniBehavior && !state.carrying && !state.printer_present) {
        if (const auto target = drop_target(l, state.agent))
            g.cells[static_cast<std::size_t>(g.index(target->row, target->col))] =
                CellContent::TableWithPrinter;
    }
    CellContent& agent_cell = g.cells[static_cast<std::size_t>(g.index(state.agent.row,
                                                                       state.agent.col))];
    if (state.carrying) agent_cell = CellContent::AgentCarrying;
    else if (agent_cell == CellContent::Goal) agent_cell = CellContent::AgentOnGoal;
    else agent_cell = CellContent::Agent;
    return g;
}

Raster render_grid(const CellGrid& grid, const TileAtlas& atlas) {
    const int t = atlas.tile_px;
    const int side = grid.size * t;
    Raster img;
    img.width = side;
    img.height = side;
    img.pixels.assign(static_cast<std::size_t>(side) * static_cast<std::size_t>(side), 0);

    for (int r = 0; r < grid.size; ++r)
        for (int c = 0; c < grid.size; ++c) {
            const Sprite& sp = atlas.base[static_cast<int>(grid.at(r, c))];
            for (int y = 0; y < t; ++y)
                for (int x = 0; x < t; ++x)
                    img.at_mut(r * t + y, c * t + x) = sp.gray[static_cast<std::size_t>(y * t + x)];
            if (grid.task == TaskKind::Maze && !grid.walls.empty()) {
                const std::uint8_t m = grid.walls[static_cast<std::size_t>(grid.index(r, c))];
                const int th = atlas.wall_thickness;
                for (int y = 0; y < t; ++y)
                    for (int x = 0; x < t; ++x) {
                        const bool on_wall = ((m & kWallUp) && y < th) ||
                                             ((m & kWallDown) && y >= t - th) ||
                                             ((m & kWallLeft) && x < th) ||
                                             ((m & kWallRight) && x >= t - th);
                        if (on_wall) img.at_mut(r * t + y, c * t + x) = atlas.wall_gray;
                    }
            }
        }
    return img;
}

Raster render(const EnvState& state, const TileAtlas& atlas) {
    return render_grid(grid_of(state), atlas);
}

Raster cell_block(const Raster& raster, int row, int col, const TileAtlas& atlas) {
    const int t = atlas.tile_px;
    if (row < 0 || col < 0 || (row + 1) * t > raster.height || (col + 1) * t > raster.width)
        throw DataError("cell_block coordinates out of range");
    Raster out;
    out.width = t;
    out.height = t;
    out.pixels.resize(static_cast<std::size_t>(t * t));
    for (int y = 0; y < t; ++y)
        for (int x = 0; x < t; ++x)
            out.at_mut(y, x) = raster.at(row * t + y, col * t + x);
    return out;
}

void write_image(const Raster& raster, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open for write: " + path);
    out << "P5\n" << raster.width << ' ' << raster.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(raster.pixels.data()),
              static_cast<std::streamsize>(raster.pixels.size()));
    if (!out) throw DataError("short write: " + path);
}

Raster read_image(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open for read: " + path);
    std::string magic;
    in >> magic;
    if (magic != "P5") throw DataError("not a P5 graymap: " + path);
    int w = 0, h = 0, maxval = 0;
    if (!(in >> w >> h >> maxval) || w <= 0 || h <= 0)
        throw DataError("malformed graymap header: " + path);
    if (maxval != 255) throw DataError("unsupported maxval: " + path);
    in.get();  // single whitespace after header
    Raster r;
    r.width = w;
    r.height = h;
    r.pixels.resize(static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
    in.read(reinterpret_cast<char*>(r.pixels.data()),
            static_cast<std::streamsize>(r.pixels.size()));
    if (in.gcount() != static_cast<std::streamsize>(r.pixels.size()))
        throw DataError("graymap payload shorter than header dims: " + path);
    return r;
}

std::string raster_digest(const Raster& r) {
    Digest d;
    d.update_pod(r.width);
    d.update_pod(r.height);
    d.update(r.pixels.data(), r.pixels.size());
    return d.hex();
}

}  // namespace vplan
