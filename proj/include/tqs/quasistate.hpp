#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "tqs/field.hpp"
#include "tqs/reeb.hpp"

namespace tqs {

// Sampled b(t) = tau({H <= t}) with the critical-value partition.
struct BCurve {
    std::vector<double> ts;
    std::vector<double> bs;
    std::vector<double> critical_values; // sorted distinct, brackets [m, M]
    double min_value = 0.0;
    double max_value = 0.0;
};

struct TreeTerm {
    double alpha = 0.0;
    double term = 0.0;           // integral of (alpha - H) over the tree region
    double region_measure = 0.0;
};

struct QuasiStateReport {
    double zeta_reeb = std::nan("");
    double zeta_aarnes = std::nan("");
    double mean = std::nan("");
    double discrepancy = std::nan("");
    std::vector<TreeTerm> trees;
    int n = 0;
    std::string mode;
    double tol = 0.0;
    bool flagged = false;
    bool has_seed = false;
    uint64_t seed = 0;
};

// Default cross-path tolerance: 5e-3 at n = 256, first order in 1/n.
double default_tolerance(int n);

// Midpoint samples, `refine` per interval between consecutive critical
// values, nudged off vertex values.
std::vector<double> sample_grid(const TorusField& field, int refine);

// b(t) through the regularization pipeline; no Reeb graph involved.
BCurve b_curve_tau(const TorusField& field, int refine);
BCurve b_curve_tau(const TorusField& field, const std::vector<double>& ts);

// b(t) from the cycle/tree decomposition:
// b = |X^t ∩ S| + sum of |D_j| over trees passed below t.
BCurve b_curve_reeb(const TorusField& field, int refine);
BCurve b_curve_reeb(const TorusField& field, const ReebGraph& graph,
                    const CycleTreeDecomposition& decomp,
                    const std::vector<double>& ts);

// max H - integral of b, by midpoint quadrature per critical interval.
double evaluate_aarnes(const BCurve& curve);

struct AarnesEval {
    double zeta = 0.0;
    double delta = 0.0; // change under 2x sub-sampling
    bool converged = false;
};
AarnesEval evaluate_aarnes_refined(const BCurve& curve);

// zeta via the cycle/tree formula: mean + sum over trees of
// (alpha_j * |D_j| - integral of H over D_j).
QuasiStateReport evaluate_reeb(const TorusField& field);

enum class QuasiStateMode { reeb, aarnes, both };

struct QuasiStateOptions {
    int t_refine = 0;         // samples per critical interval; 0 = adaptive
    double tol_override = 0.0; // 0 = default_tolerance(n)
};

QuasiStateReport quasi_state(const TorusField& field, QuasiStateMode mode,
                             QuasiStateOptions options = {});

} // namespace tqs
