#pragma once

#include <vector>

#include "tqs/subsurface.hpp"

namespace tqs {

enum class LoopClass { contractible, essential };
enum class LoopSide { exterior, interior };
enum class LoopAction { kept, filled, removed };

LoopClass classify_loop(const BoundaryLoop& loop);

struct RegularizedSurface {
    SubSurface region;
    // One entry per input boundary loop, in input order.
    std::vector<LoopAction> provenance;
};

// The unique closed disk bounded by a contractible boundary loop of W,
// decided by the Euler characteristic of the two complementary sides.
SubSurface fill_disk(const SubSurface& w, size_t loop_index);

// Contractible boundary loops whose disks contain or are disjoint from
// every other contractible boundary loop's disk.
std::vector<size_t> maximal_loops(const SubSurface& w);

// Exterior iff the collar of W at the loop lies inside the loop's disk.
LoopSide classify_side(const SubSurface& w, size_t loop_index);

// Fill every maximal interior disk, remove every maximal exterior disk;
// result has no contractible boundary loops.
RegularizedSurface regularize(const SubSurface& w);

// Topological measure: the area of the regularization.
double tau(const SubSurface& w);

} // namespace tqs
