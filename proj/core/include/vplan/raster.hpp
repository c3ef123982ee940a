#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vplan/gridworld.hpp"

namespace vplan {

// What a single rendered cell shows. This is also the policy's per-cell token
// vocabulary: a state is exactly its grid of cell contents (plus wall masks
// for Maze), so rendering is defined for any content grid, coherent or not.
enum class CellContent : std::uint8_t {
    Empty,
    Hole,
    Goal,
    Table,
    Printer,
    TableWithPrinter,
    Agent,
    AgentOnGoal,
    AgentCarrying,
};
constexpr int kCellContentCount = 9;

struct CellGrid {
    TaskKind task = TaskKind::FrozenLake;
    int size = 0;
    std::vector<CellContent> cells;    // row-major
    std::vector<std::uint8_t> walls;   // Maze only, 4-bit masks

    int index(int row, int col) const { return row * size + col; }
    CellContent at(int row, int col) const {
        return cells[static_cast<std::size_t>(index(row, col))];
    }
    bool operator==(const CellGrid&) const = default;
};

// The renderable view of a state; drop target resolved for terminal states.
CellGrid grid_of(const EnvState& state);

struct Raster {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // row-major grayscale

    std::uint8_t at(int row, int col) const {
        return pixels[static_cast<std::size_t>(row) * static_cast<std::size_t>(width) +
                      static_cast<std::size_t>(col)];
    }
    std::uint8_t& at_mut(int row, int col) {
        return pixels[static_cast<std::size_t>(row) * static_cast<std::size_t>(width) +
                      static_cast<std::size_t>(col)];
    }
    bool operator==(const Raster&) const = default;
};

// Grayscale sprite with an explicit paint mask: masked pixels overwrite the
// base cell when composited (used for the agent overlay).
struct Sprite {
    std::vector<std::uint8_t> gray;
    std::vector<std::uint8_t> mask;  // 1 = paint
};

struct TileAtlas {
    int tile_px = 16;
    int wall_thickness = 2;
    std::uint8_t background = 230;
    std::uint8_t wall_gray = 10;
    Sprite base[kCellContentCount];    // full-tile base per content (agent variants composed)
    Sprite agent_overlay;              // plain agent
    Sprite agent_carrying_overlay;

    static TileAtlas make_default(int tile_px = 16);
};

// Fraction of differing pixels between two same-size sprites.
double sprite_difference(const Sprite& a, const Sprite& b);

Raster render_grid(const CellGrid& grid, const TileAtlas& atlas);
Raster render(const EnvState& state, const TileAtlas& atlas);

// tile_px x tile_px view of one cell; throws DataError when out of range.
Raster cell_block(const Raster& raster, int row, int col, const TileAtlas& atlas);

// Binary PGM (P5) with maxval 255.
void write_image(const Raster& raster, const std::string& path);
Raster read_image(const std::string& path);

std::string raster_digest(const Raster& r);

}  // namespace vplan
