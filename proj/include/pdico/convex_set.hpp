#pragma once

#include <cmath>
#include <variant>
#include <vector>

#include "pdico/errors.hpp"
#include "pdico/grid.hpp"
#include "pdico/simplex.hpp"

namespace pdico {

/// Support function evaluation: either a finite sup with a maximizer or
/// an explicit +infinity flag. Plain floating infinities never enter
/// arithmetic downstream.
struct SupportResult {
    bool finite = true;
    double value = 0;
    Vec maximizer;
};

/// Closed convex set in R^r. Four concrete variants:
///   Box       {w : lower <= w <= upper}
///   Polytope  {w : C w <= e}, certified nonempty at construction
///   Singleton {point}
///   FiniteSet conv-free list of points (argmax scans the list)
///
/// Tie-breaking is fixed everywhere: box components with a zero direction
/// take the upper bound, FiniteSet ties take the lowest index, polytope
/// argmax comes from Bland's pivoting.
class ConvexSet {
public:
    struct Box {
        Vec lower, upper;
    };
    struct Polytope {
        Mat C;
        Vec e;
    };
    struct Singleton {
        Vec point;
    };
    struct FiniteSet {
        std::vector<Vec> points;
    };

    static ConvexSet box(Vec lower, Vec upper) {
        if (lower.size() != upper.size())
            throw dimension_error("box: bound dimensions differ");
        for (int i = 0; i < lower.size(); ++i) {
            if (!(lower[i] <= upper[i]))
                throw error("box: lower > upper in component " + std::to_string(i));
            if (!std::isfinite(lower[i]) || !std::isfinite(upper[i]))
                throw error("box: bounds must be finite");
        }
        return ConvexSet(Box{std::move(lower), std::move(upper)});
    }

    static ConvexSet polytope(Mat C, Vec e) {
        if (C.rows() != e.size())
            throw dimension_error("polytope: row count mismatch");
        LpProblem feas{Vec::Zero(C.cols()), C, e};
        if (lp_solve(feas).status == LpStatus::infeasible)
            throw error("polytope: empty feasible set");
        return ConvexSet(Polytope{std::move(C), std::move(e)});
    }

    static ConvexSet singleton(Vec point) {
        return ConvexSet(Singleton{std::move(point)});
    }

    static ConvexSet finite_set(std::vector<Vec> points) {
        if (points.empty()) throw error("finite set: no points");
        for (size_t i = 0; i < points.size(); ++i) {
            if (points[i].size() != points[0].size())
                throw dimension_error("finite set: mixed dimensions");
            for (size_t j = 0; j < i; ++j)
                if ((points[i] - points[j]).cwiseAbs().maxCoeff() <= 1e-12)
                    throw error("finite set: duplicate points " +
                                std::to_string(j) + " and " + std::to_string(i));
        }
        return ConvexSet(FiniteSet{std::move(points)});
    }

    int dim() const {
        if (auto* b = std::get_if<Box>(&v_)) return static_cast<int>(b->lower.size());
        if (auto* p = std::get_if<Polytope>(&v_)) return static_cast<int>(p->C.cols());
        if (auto* s = std::get_if<Singleton>(&v_)) return static_cast<int>(s->point.size());
        return static_cast<int>(std::get<FiniteSet>(v_).points[0].size());
    }

    bool is_box() const { return std::holds_alternative<Box>(v_); }
    bool is_polytope() const { return std::holds_alternative<Polytope>(v_); }
    bool is_singleton() const { return std::holds_alternative<Singleton>(v_); }
    bool is_finite_set() const { return std::holds_alternative<FiniteSet>(v_); }

    /// sup { <w, direction> : w in set } with a maximizer when finite.
    SupportResult support(const Vec& direction) const {
        if (direction.size() != dim())
            throw dimension_error("support: direction dimension mismatch");
        SupportResult out;
        if (auto* b = std::get_if<Box>(&v_)) {
            out.maximizer = Vec(dim());
            out.value = 0;
            for (int i = 0; i < dim(); ++i) {
                out.maximizer[i] = direction[i] < 0 ? b->lower[i] : b->upper[i];
                out.value += direction[i] * out.maximizer[i];
            }
            return out;
        }
        if (auto* s = std::get_if<Singleton>(&v_)) {
            out.maximizer = s->point;
            out.value = direction.dot(s->point);
            return out;
        }
        if (auto* f = std::get_if<FiniteSet>(&v_)) {
            size_t best = 0;
            double bv = direction.dot(f->points[0]);
            for (size_t i = 1; i < f->points.size(); ++i) {
                const double v = direction.dot(f->points[i]);
                if (v > bv) { bv = v; best = i; }
            }
            out.maximizer = f->points[best];
            out.value = bv;
            return out;
        }
        const auto& p = std::get<Polytope>(v_);
        LpSolution sol = lp_solve({direction, p.C, p.e});
        if (sol.status == LpStatus::unbounded) {
            out.finite = false;
            return out;
        }
        if (sol.status == LpStatus::infeasible)
            throw error("support: polytope became infeasible");  // excluded at construction
        out.value = sol.value;
        out.maximizer = sol.x;
        return out;
    }

    /// Euclidean projection; Box and Singleton variants only.
    Vec project(const Vec& point) const {
        if (point.size() != dim())
            throw dimension_error("project: point dimension mismatch");
        if (auto* b = std::get_if<Box>(&v_)) {
            Vec out(dim());
            for (int i = 0; i < dim(); ++i)
                out[i] = std::min(std::max(point[i], b->lower[i]), b->upper[i]);
            return out;
        }
        if (auto* s = std::get_if<Singleton>(&v_)) return s->point;
        throw capability_error("project: supported for Box and Singleton only");
    }

    bool contains(const Vec& point, double tol = 1e-9) const {
        return distance_inf(point) <= tol;
    }

    /// Distance-like residual: exact inf-norm distance for Box, Singleton
    /// and FiniteSet; maximal constraint violation for Polytope.
    double distance_inf(const Vec& point) const {
        if (point.size() != dim())
            throw dimension_error("distance: point dimension mismatch");
        if (auto* b = std::get_if<Box>(&v_)) {
            double d = 0;
            for (int i = 0; i < dim(); ++i) {
                if (point[i] > b->upper[i]) d = std::max(d, point[i] - b->upper[i]);
                if (point[i] < b->lower[i]) d = std::max(d, b->lower[i] - point[i]);
            }
            return d;
        }
        if (auto* s = std::get_if<Singleton>(&v_))
            return (point - s->point).cwiseAbs().maxCoeff();
        if (auto* f = std::get_if<FiniteSet>(&v_)) {
            double d = std::numeric_limits<double>::infinity();
            for (const auto& p : f->points)
                d = std::min(d, (point - p).cwiseAbs().maxCoeff());
            return d;
        }
        const auto& p = std::get<Polytope>(v_);
        const Vec slack = p.C * point - p.e;
        return std::max(0.0, slack.maxCoeff());
    }

    /// The argmax convention for a zero direction: box midpoint, singleton
    /// point, first FiniteSet point, lexicographically smallest polytope
    /// vertex (bounded directions only).
    Vec zero_direction_point() const {
        if (auto* b = std::get_if<Box>(&v_)) return 0.5 * (b->lower + b->upper);
        if (auto* s = std::get_if<Singleton>(&v_)) return s->point;
        if (auto* f = std::get_if<FiniteSet>(&v_)) return f->points[0];
        const auto& p = std::get<Polytope>(v_);
        // Lexicographic minimum via sequential LPs; falls back to any
        // feasible point along directions where the polytope is unbounded.
        const int base_rows = static_cast<int>(p.C.rows());
        const int r = dim();
        Mat C(base_rows + r, r);
        C.topRows(base_rows) = p.C;
        C.bottomRows(r).setZero();
        Vec e(base_rows + r);
        e.head(base_rows) = p.e;
        for (int j = 0; j < r; ++j) {
            GeneralLp lp;
            lp.c = Vec::Zero(r);
            lp.c[j] = 1.0;
            lp.A = C.topRows(base_rows + j);
            lp.b = e.head(base_rows + j);
            lp.sense.assign(base_rows + j, RowSense::le);
            for (int i = 0; i < j; ++i) lp.sense[base_rows + i] = RowSense::eq;
            GeneralLpSolution sol = solve_general_lp(lp);
            if (sol.status == LpStatus::unbounded) {
                lp.c.setZero();
                sol = solve_general_lp(lp);
                return sol.x;
            }
            if (sol.status != LpStatus::optimal)
                throw error("zero_direction_point: polytope face solve failed");
            C(base_rows + j, j) = 1.0;
            e[base_rows + j] = sol.x[j];
        }
        GeneralLp lp;
        lp.c = Vec::Zero(r);
        lp.A = C;
        lp.b = e;
        lp.sense.assign(base_rows + r, RowSense::eq);
        for (int i = 0; i < base_rows; ++i) lp.sense[i] = RowSense::le;
        GeneralLpSolution sol = solve_general_lp(lp);
        if (sol.status != LpStatus::optimal)
            throw error("zero_direction_point: polytope lexmin solve failed");
        return sol.x;
    }

    /// Normal-cone test at a member w: true iff <w' - w, y> <= tol for all
    /// w' in the set, evaluated through the support function.
    bool normal_cone_contains(const Vec& w, const Vec& y, double tol = 1e-9) const {
        if (is_singleton()) return true;  // cone(U - w) = {0}, dual is all of R^r
        SupportResult s = support(y);
        if (!s.finite) return false;
        return s.value - y.dot(w) <= tol;
    }

    template <typename V>
    const V& get() const { return std::get<V>(v_); }

private:
    template <typename V>
    explicit ConvexSet(V v) : v_(std::move(v)) {}

    std::variant<Box, Polytope, Singleton, FiniteSet> v_;
};

} // namespace pdico
