#include "tqs/quasistate.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "tqs/parallel.hpp"
#include "tqs/regularize.hpp"

namespace tqs {

double default_tolerance(int n) {
    return 5e-3 * 256.0 / double(n);
}

namespace {

// Nudge t off the vertex-value lattice: midpoint of the containing gap.
double make_regular(const std::vector<double>& sorted_vals, double t) {
    if (!std::binary_search(sorted_vals.begin(), sorted_vals.end(), t))
        return t;
    const auto it = std::upper_bound(sorted_vals.begin(), sorted_vals.end(), t);
    if (it == sorted_vals.end())
        return sorted_vals.back() + 1.0;
    const double lo = *(it - 1), hi = *it;
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi)
        throw topology_error("sample_grid: value gap too tight for doubles");
    return mid;
}

} // namespace

std::vector<double> sample_grid(const TorusField& field, int refine) {
    if (refine < 1)
        throw std::invalid_argument("sample_grid: refine must be >= 1");
    const std::vector<double> crit = field.critical_values();
    const std::vector<double> vals = field.distinct_values();
    std::vector<double> ts;
    for (size_t i = 0; i + 1 < crit.size(); ++i) {
        const double a = crit[i], b = crit[i + 1];
        if (!(b > a))
            continue;
        for (int sMP = 0; sMP < refine; ++sMP) {
            const double t = a + (sMP + 0.5) * (b - a) / refine;
            ts.push_back(make_regular(vals, t));
        }
    }
    return ts;
}

BCurve b_curve_tau(const TorusField& field, const std::vector<double>& ts) {
    BCurve curve;
    curve.ts = ts;
    curve.bs.assign(ts.size(), 0.0);
    curve.critical_values = field.critical_values();
    curve.min_value = field.min_value();
    curve.max_value = field.max_value();
    parallel_for(ts.size(), [&](size_t i) {
        curve.bs[i] = tau(SubSurface::sublevel(field, curve.ts[i]));
    });
    return curve;
}

BCurve b_curve_tau(const TorusField& field, int refine) {
    return b_curve_tau(field, sample_grid(field, refine));
}

BCurve b_curve_reeb(const TorusField& field, const ReebGraph& graph,
                    const CycleTreeDecomposition& decomp,
                    const std::vector<double>& ts) {
    BCurve curve;
    curve.ts = ts;
    curve.bs.assign(ts.size(), 0.0);
    curve.critical_values = field.critical_values();
    curve.min_value = field.min_value();
    curve.max_value = field.max_value();

    // Cycle pieces sorted by activation (lo) and completion (hi).
    struct Piece {
        const ReebPiece* p;
        double below_lo = 0.0; // clip area below p->lo, cached on activation
    };
    std::vector<Piece> pieces;
    for (const int a : decomp.cycle_arcs)
        for (const ReebPiece& p : graph.arcs[size_t(a)].pieces)
            pieces.push_back({&p, 0.0});
    std::vector<int> by_lo(pieces.size()), by_hi(pieces.size());
    for (size_t i = 0; i < pieces.size(); ++i)
        by_lo[i] = by_hi[i] = int(i);
    std::sort(by_lo.begin(), by_lo.end(), [&](int x, int y) {
        return pieces[size_t(x)].p->lo < pieces[size_t(y)].p->lo;
    });
    std::sort(by_hi.begin(), by_hi.end(), [&](int x, int y) {
        return pieces[size_t(x)].p->hi < pieces[size_t(y)].p->hi;
    });

    std::vector<double> alphas;
    std::vector<double> alpha_measures;
    {
        std::vector<size_t> idx(decomp.trees.size());
        std::iota(idx.begin(), idx.end(), size_t(0));
        std::sort(idx.begin(), idx.end(), [&](size_t x, size_t y) {
            return decomp.trees[x].alpha < decomp.trees[y].alpha;
        });
        for (const size_t j : idx) {
            alphas.push_back(decomp.trees[j].alpha);
            alpha_measures.push_back(decomp.trees[j].measure);
        }
    }

    std::vector<size_t> order(ts.size());
    std::iota(order.begin(), order.end(), size_t(0));
    std::sort(order.begin(), order.end(),
              [&](size_t x, size_t y) { return ts[x] < ts[y]; });

    const TorusGrid& g = field.grid();
    const double inv_n2 = 1.0 / (double(g.n()) * double(g.n()));
    std::vector<int> active;
    size_t next_lo = 0, next_hi = 0, next_alpha = 0;
    double full_sum = 0.0, tree_sum = 0.0;
    std::vector<char> done(pieces.size(), 0);
    for (const size_t oi : order) {
        const double t = ts[oi];
        while (next_lo < by_lo.size() && pieces[size_t(by_lo[next_lo])].p->lo < t) {
            Piece& pc = pieces[size_t(by_lo[next_lo])];
            if (!pc.p->flat) {
                const auto corners = g.tri_corners(pc.p->tri);
                const std::array<double, 3> vals = {field.value(corners[0]),
                                                    field.value(corners[1]),
                                                    field.value(corners[2])};
                pc.below_lo =
                    clip_below(g.tri_corner_offsets(pc.p->tri), vals, pc.p->lo)
                        .area * inv_n2;
                active.push_back(by_lo[next_lo]);
            }
            ++next_lo;
        }
        while (next_hi < by_hi.size() && pieces[size_t(by_hi[next_hi])].p->hi < t) {
            full_sum += pieces[size_t(by_hi[next_hi])].p->area;
            done[size_t(by_hi[next_hi])] = 1;
            ++next_hi;
        }
        while (next_alpha < alphas.size() && alphas[next_alpha] < t) {
            tree_sum += alpha_measures[next_alpha];
            ++next_alpha;
        }
        double b = full_sum + tree_sum;
        size_t w = 0;
        for (size_t k = 0; k < active.size(); ++k) {
            const int pi = active[k];
            if (done[size_t(pi)])
                continue;
            active[w++] = pi;
            const Piece& pc = pieces[size_t(pi)];
            if (pc.p->hi <= t)
                continue; // completes at this exact sweep step; handled above
            const auto corners = g.tri_corners(pc.p->tri);
            const std::array<double, 3> vals = {field.value(corners[0]),
                                                field.value(corners[1]),
                                                field.value(corners[2])};
            const double below_t =
                clip_below(g.tri_corner_offsets(pc.p->tri), vals, t).area * inv_n2;
            b += below_t - pc.below_lo;
        }
        active.resize(w);
        curve.bs[oi] = b;
    }
    return curve;
}

BCurve b_curve_reeb(const TorusField& field, int refine) {
    const ReebGraph graph = build_reeb(field);
    const CycleTreeDecomposition decomp = decompose(graph);
    return b_curve_reeb(field, graph, decomp, sample_grid(field, refine));
}

namespace {

// Riemann sum with midpoint (Voronoi) weights inside each critical
// interval, using every `step`-th sample.
double integrate_curve(const BCurve& c, size_t step) {
    const auto& crit = c.critical_values;
    double total = 0.0;
    size_t i = 0;
    for (size_t k = 0; k + 1 < crit.size(); ++k) {
        const double a = crit[k], b = crit[k + 1];
        size_t j = i;
        while (j < c.ts.size() && c.ts[j] < b)
            ++j;
        // Samples [i, j) belong to (a, b).
        std::vector<double> sts, sbs;
        for (size_t m = i; m < j; m += step) {
            sts.push_back(c.ts[m]);
            sbs.push_back(c.bs[m]);
        }
        for (size_t m = 0; m < sts.size(); ++m) {
            const double lo = (m == 0) ? a : 0.5 * (sts[m - 1] + sts[m]);
            const double hi =
                (m + 1 == sts.size()) ? b : 0.5 * (sts[m] + sts[m + 1]);
            total += sbs[m] * (hi - lo);
        }
        i = j;
    }
    return total;
}

} // namespace

AarnesEval evaluate_aarnes_refined(const BCurve& curve) {
    for (size_t i = 0; i + 1 < curve.ts.size(); ++i) {
        if (curve.ts[i + 1] < curve.ts[i])
            throw std::invalid_argument("evaluate_aarnes: samples not sorted");
        if (curve.bs[i + 1] < curve.bs[i] - 1e-9)
            throw std::invalid_argument("evaluate_aarnes: b-curve is not monotone");
    }
    AarnesEval ev;
    if (curve.ts.empty()) {
        // Constant field: the integral over [m, M] is empty.
        ev.zeta = curve.max_value;
        ev.converged = true;
        return ev;
    }
    const double full = integrate_curve(curve, 1);
    const double half = integrate_curve(curve, 2);
    ev.zeta = curve.max_value - full;
    ev.delta = std::abs(full - half);
    ev.converged = ev.delta < 1e-6;
    return ev;
}

double evaluate_aarnes(const BCurve& curve) {
    return evaluate_aarnes_refined(curve).zeta;
}

QuasiStateReport evaluate_reeb(const TorusField& field) {
    QuasiStateReport rep;
    rep.n = field.n();
    rep.mode = "reeb";
    rep.mean = field.integrate();
    const ReebGraph graph = build_reeb(field);
    const CycleTreeDecomposition decomp = decompose(graph);
    double zeta = rep.mean;
    for (const ReebTree& t : decomp.trees) {
        TreeTerm term;
        term.alpha = t.alpha;
        term.region_measure = t.measure;
        term.term = t.alpha * t.measure - t.integral;
        zeta += term.term;
        rep.trees.push_back(term);
    }
    std::sort(rep.trees.begin(), rep.trees.end(),
              [](const TreeTerm& a, const TreeTerm& b) { return a.alpha < b.alpha; });
    rep.zeta_reeb = zeta;
    return rep;
}

QuasiStateReport quasi_state(const TorusField& field, QuasiStateMode mode,
                             QuasiStateOptions options) {
    QuasiStateReport rep;
    rep.n = field.n();
    rep.tol = options.tol_override > 0.0 ? options.tol_override
                                         : default_tolerance(field.n());
    if (mode == QuasiStateMode::reeb || mode == QuasiStateMode::both) {
        rep = [&] {
            QuasiStateReport r = evaluate_reeb(field);
            r.tol = rep.tol;
            return r;
        }();
    } else {
        rep.mean = field.integrate();
    }
    if (mode == QuasiStateMode::aarnes || mode == QuasiStateMode::both) {
        int refine = options.t_refine > 0 ? options.t_refine : 8;
        const bool adaptive = options.t_refine <= 0;
        BCurve curve = b_curve_tau(field, refine);
        AarnesEval ev = evaluate_aarnes_refined(curve);
        while (adaptive && !ev.converged && refine < 64) {
            refine *= 2;
            curve = b_curve_tau(field, refine);
            ev = evaluate_aarnes_refined(curve);
        }
        rep.zeta_aarnes = ev.zeta;
    }
    rep.mode = mode == QuasiStateMode::reeb
                   ? "reeb"
                   : (mode == QuasiStateMode::aarnes ? "aarnes" : "both");
    if (mode == QuasiStateMode::both) {
        rep.discrepancy = std::abs(rep.zeta_reeb - rep.zeta_aarnes);
        rep.flagged = rep.discrepancy > rep.tol;
    }
    return rep;
}

} // namespace tqs
