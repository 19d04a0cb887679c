#pragma once

#include <vector>

#include "tqs/field.hpp"
#include "tqs/subsurface.hpp"

namespace tqs {

// One value-slab of a triangle assigned to a Reeb arc.  When the triangle
// is flat (all three corner values equal) the slab is bounded in the
// symbolic perturbation coordinate instead and carries its exact area.
struct ReebPiece {
    int tri = -1;
    double lo = 0.0, hi = 0.0; // unperturbed field values
    double area = 0.0;         // torus units
    double integral = 0.0;     // of the field over the slab
    bool flat = false;
    double flat_value = 0.0;
};

struct ReebNode {
    int vertex = -1;
    double value = 0.0;
    int degree = 0;
};

struct ReebArc {
    int node_lo = -1, node_hi = -1;
    double val_lo = 0.0, val_hi = 0.0;
    std::vector<ReebPiece> pieces;
    double measure = 0.0;
    double integral = 0.0;
};

// Reeb graph of a PL torus field: level-set components collapsed to
// points, swept in the symbolically perturbed vertex order.  Spurious
// degree-2 nodes are smoothed away; the first Betti number is checked to
// be exactly 1.
struct ReebGraph {
    std::vector<ReebNode> nodes;
    std::vector<ReebArc> arcs;
    int betti = 0;
};

ReebGraph build_reeb(const TorusField& field);

struct ReebTree {
    int attachment_node = -1;
    double alpha = 0.0;
    std::vector<int> arcs;
    double measure = 0.0;
    double integral = 0.0;
    int side = 0; // +1 hangs above alpha, -1 below, 0 mixed
};

struct CycleTreeDecomposition {
    std::vector<int> cycle_arcs;
    double cycle_measure = 0.0;
    double cycle_integral = 0.0;
    std::vector<ReebTree> trees;
};

// Unique cycle plus attached trees; throws topology_error when the
// stripped residue is not a single cycle.
CycleTreeDecomposition decompose(const ReebGraph& graph);

// Number of Reeb arcs whose open value interval contains t.
int arcs_spanning(const ReebGraph& graph, double t);

// The tree preimage region retracted to one regular value next to its
// attachment level, as a traced subsurface: every boundary cut sits at
// that single level, so the regularization machinery applies directly.
SubSurface tree_region_retract(const TorusField& field, const ReebGraph& graph,
                               const CycleTreeDecomposition& decomp,
                               size_t tree_index);

} // namespace tqs
