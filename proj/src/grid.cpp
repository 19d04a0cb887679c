#include "tqs/grid.hpp"

namespace tqs {

constexpr std::array<std::array<int, 2>, 6> TorusGrid::kLinkDirs;

} // namespace tqs
