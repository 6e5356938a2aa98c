#pragma once

#include <optional>
#include <variant>

#include "pdico/convex_set.hpp"
#include "pdico/errors.hpp"
#include "pdico/simplex.hpp"

namespace pdico {

/// Extended real used for Hamiltonian values: finite number or an explicit
/// +infinity flag. Floating infinities never enter arithmetic.
struct ExtReal {
    bool finite = true;
    double value = 0;

    static ExtReal of(double v) { return {true, v}; }
    static ExtReal pos_inf() { return {false, 0}; }
};

/// Outcome of a locally adjoint mapping evaluation: empty, a single point,
/// or a representative of an affine solution set together with the
/// nonnegative multiplier that generated it.
struct LamResult {
    enum class Kind { empty, point, affine_set };

    Kind kind = Kind::empty;
    Vec ustar;
    Vec q;

    static LamResult make_empty() { return {}; }
    static LamResult make_point(Vec u) {
        LamResult r;
        r.kind = Kind::point;
        r.ustar = std::move(u);
        return r;
    }
    static LamResult make_affine(Vec u, Vec mult) {
        LamResult r;
        r.kind = Kind::affine_set;
        r.ustar = std::move(u);
        r.q = std::move(mult);
        return r;
    }
    bool empty() const { return kind == Kind::empty; }
};

/// Convex set-valued mapping F : R^n => R^n in one of three autonomous
/// shapes:
///   LinearControl  F(u) = A u + B U          (A n x n, B n x r, U in R^r)
///   Polyhedral     F(u) = {v : A u - B v <= d}   (A, B s x n)
///   Constant       F(u) = U                  (U in R^n)
///
/// The graph of each variant is convex by construction. All operations are
/// pure; maps are immutable after construction.
class InclusionMap {
public:
    struct LinearControl {
        Mat A, B;
        ConvexSet U;
    };
    struct Polyhedral {
        Mat A, B;
        Vec d;
    };
    struct Constant {
        ConvexSet U;
    };

    static InclusionMap linear_control(Mat A, Mat B, ConvexSet U) {
        if (A.rows() != A.cols())
            throw dimension_error("linear_control: A must be square");
        if (B.rows() != A.rows())
            throw dimension_error("linear_control: B row count must equal n");
        if (U.dim() != B.cols())
            throw dimension_error("linear_control: U dimension must equal B columns");
        return InclusionMap(LinearControl{std::move(A), std::move(B), std::move(U)});
    }

    static InclusionMap polyhedral(Mat A, Mat B, Vec d) {
        if (A.rows() != B.rows() || A.cols() != B.cols() || d.size() != A.rows())
            throw dimension_error("polyhedral: A, B must be s x n and d length s");
        // F(0) = {v : -Bv <= d} must be nonempty.
        LpProblem feas{Vec::Zero(B.cols()), -B, d};
        if (lp_solve(feas).status == LpStatus::infeasible)
            throw error("polyhedral: F(0) is empty");
        return InclusionMap(Polyhedral{std::move(A), std::move(B), std::move(d)});
    }

    static InclusionMap constant(ConvexSet U) {
        return InclusionMap(Constant{std::move(U)});
    }

    bool is_linear_control() const { return std::holds_alternative<LinearControl>(v_); }
    bool is_polyhedral() const { return std::holds_alternative<Polyhedral>(v_); }
    bool is_constant() const { return std::holds_alternative<Constant>(v_); }

    const LinearControl& linear() const { return std::get<LinearControl>(v_); }
    const Polyhedral& poly() const { return std::get<Polyhedral>(v_); }
    const Constant& constant_map() const { return std::get<Constant>(v_); }

    /// State dimension n.
    int state_dim() const {
        if (auto* l = std::get_if<LinearControl>(&v_)) return static_cast<int>(l->A.rows());
        if (auto* p = std::get_if<Polyhedral>(&v_)) return static_cast<int>(p->A.cols());
        return std::get<Constant>(v_).U.dim();
    }

    /// Dimension of the per-point decision: r controls for LinearControl,
    /// the velocity selection itself (n) otherwise.
    int control_dim() const {
        if (auto* l = std::get_if<LinearControl>(&v_)) return static_cast<int>(l->B.cols());
        return state_dim();
    }

    /// Number of polyhedral rows s (0 for the other variants).
    int rows() const {
        if (auto* p = std::get_if<Polyhedral>(&v_)) return static_cast<int>(p->A.rows());
        return 0;
    }

    /// Inf-norm style residual of v against F(u); zero inside the set.
    double velocity_residual(const Vec& u, const Vec& v) const {
        check_dims(u, v);
        if (auto* c = std::get_if<Constant>(&v_)) return c->U.distance_inf(v);
        if (auto* p = std::get_if<Polyhedral>(&v_)) {
            const Vec slack = p->A * u - p->B * v - p->d;
            return std::max(0.0, slack.maxCoeff());
        }
        const auto& l = std::get<LinearControl>(v_);
        return distance_to_bu(l, v - l.A * u);
    }

    bool member(const Vec& u, const Vec& v, double tol = 1e-9) const {
        return velocity_residual(u, v) <= tol;
    }

    /// H_F(u, v*) = sup { <v, v*> : v in F(u) }; +inf when the sup is
    /// unbounded or F(u) is empty.
    ExtReal hamiltonian(const Vec& u, const Vec& vstar) const {
        if (u.size() != state_dim() || vstar.size() != state_dim())
            throw dimension_error("hamiltonian: dimension mismatch");
        if (auto* c = std::get_if<Constant>(&v_)) {
            SupportResult s = c->U.support(vstar);
            return s.finite ? ExtReal::of(s.value) : ExtReal::pos_inf();
        }
        if (auto* l = std::get_if<LinearControl>(&v_)) {
            SupportResult s = l->U.support(l->B.transpose() * vstar);
            return s.finite ? ExtReal::of(u.dot(l->A.transpose() * vstar) + s.value)
                            : ExtReal::pos_inf();
        }
        const auto& p = std::get<Polyhedral>(v_);
        LpSolution s = lp_solve({vstar, -p.B, p.d - p.A * u});
        if (s.status == LpStatus::optimal) return ExtReal::of(s.value);
        return ExtReal::pos_inf();  // unbounded, or F(u) empty
    }

    /// One element of the argmaximum set F_A(u; v*). The zero direction
    /// resolves to the set's deterministic representative (box midpoint,
    /// lowest-index point, lexmin vertex). Throws unbounded_error when the
    /// Hamiltonian is +inf.
    Vec argmax_select(const Vec& u, const Vec& vstar) const {
        if (u.size() != state_dim() || vstar.size() != state_dim())
            throw dimension_error("argmax_select: dimension mismatch");
        if (auto* c = std::get_if<Constant>(&v_)) {
            if (vstar.isZero(0.0)) return c->U.zero_direction_point();
            SupportResult s = c->U.support(vstar);
            if (!s.finite) throw unbounded_error("argmax_select: H is +inf");
            return s.maximizer;
        }
        if (auto* l = std::get_if<LinearControl>(&v_)) {
            const Vec dir = l->B.transpose() * vstar;
            Vec w;
            if (dir.isZero(0.0)) {
                w = l->U.zero_direction_point();
            } else {
                SupportResult s = l->U.support(dir);
                if (!s.finite) throw unbounded_error("argmax_select: H is +inf");
                w = s.maximizer;
            }
            return l->A * u + l->B * w;
        }
        const auto& p = std::get<Polyhedral>(v_);
        ConvexSet fu = velocity_polytope(p, u);
        if (vstar.isZero(0.0)) return fu.zero_direction_point();
        SupportResult s = fu.support(vstar);
        if (!s.finite) throw unbounded_error("argmax_select: H is +inf");
        return s.maximizer;
    }

    /// Locally adjoint mapping F*(v*; (u, v)) evaluated through the closed
    /// forms of each variant. The admissibility gate is the subgradient
    /// definition: v must attain H_F(u, v*), otherwise the result is empty.
    ///
    ///   LinearControl: {A' v*} when the realizing control w maximizes
    ///                  <w', B' v*> over U at w.
    ///   Polyhedral:    {-A' q} for q >= 0 with B' q = -v* and q zero on
    ///                  rows with positive slack (complementarity).
    ///   Constant:      {0} when v maximizes <., v*> over U.
    LamResult lam(const Vec& vstar, const Vec& u, const Vec& v,
                  double tol = 1e-9) const {
        check_dims(u, v);
        if (vstar.size() != state_dim())
            throw dimension_error("lam: direction dimension mismatch");
        if (!member(u, v, tol))
            throw precondition_error("lam: v is not a member of F(u)");

        if (auto* c = std::get_if<Constant>(&v_)) {
            if (!c->U.normal_cone_contains(v, vstar, tol))
                return LamResult::make_empty();
            return LamResult::make_point(Vec::Zero(state_dim()));
        }
        if (auto* l = std::get_if<LinearControl>(&v_)) {
            const Vec w = recover_control(*l, u, v, tol);
            if (!l->U.normal_cone_contains(w, l->B.transpose() * vstar, tol))
                return LamResult::make_empty();
            return LamResult::make_point(l->A.transpose() * vstar);
        }
        const auto& p = std::get<Polyhedral>(v_);
        const Vec slack = p.d - (p.A * u - p.B * v);
        std::vector<int> pins;
        for (int i = 0; i < slack.size(); ++i)
            if (slack[i] > tol) pins.push_back(i);
        NonnegFeasibility f =
            lp_feasible_nonneg(p.B.transpose(), -vstar, pins);
        if (!f.feasible) return LamResult::make_empty();
        return LamResult::make_affine(-p.A.transpose() * f.q, f.q);
    }

    /// Control w in U with B w ~ v - A u (LinearControl only). Deterministic:
    /// solved as the inf-norm fitting LP over U.
    Vec recover_control(const Vec& u, const Vec& v, double tol = 1e-9) const {
        if (auto* l = std::get_if<LinearControl>(&v_))
            return recover_control(*l, u, v, tol);
        throw capability_error("recover_control: LinearControl maps only");
    }

private:
    template <typename V>
    explicit InclusionMap(V v) : v_(std::move(v)) {}

    void check_dims(const Vec& u, const Vec& v) const {
        if (u.size() != state_dim() || v.size() != state_dim())
            throw dimension_error("inclusion map: state dimension mismatch");
    }

    static ConvexSet velocity_polytope(const Polyhedral& p, const Vec& u) {
        try {
            return ConvexSet::polytope(-p.B, p.d - p.A * u);
        } catch (const error&) {
            throw unbounded_error("argmax_select: F(u) is empty");
        }
    }

    /// min over w in U of || B w - r ||_inf, with the attaining w.
    static std::pair<double, Vec> bu_distance_lp(const LinearControl& l,
                                                 const Vec& r) {
        const int n = static_cast<int>(l.B.rows());
        const int rr = static_cast<int>(l.B.cols());
        if (l.U.is_singleton())
            return {(l.B * l.U.get<ConvexSet::Singleton>().point - r)
                        .cwiseAbs()
                        .maxCoeff(),
                    l.U.get<ConvexSet::Singleton>().point};
        if (l.U.is_finite_set()) {
            const auto& pts = l.U.get<ConvexSet::FiniteSet>().points;
            double best = std::numeric_limits<double>::infinity();
            Vec bw;
            for (const auto& p : pts) {
                const double d = (l.B * p - r).cwiseAbs().maxCoeff();
                if (d < best) { best = d; bw = p; }
            }
            return {best, bw};
        }
        Mat C;
        Vec e;
        if (l.U.is_box()) {
            const auto& b = l.U.get<ConvexSet::Box>();
            C = Mat::Zero(2 * rr, rr);
            C.topRows(rr) = Mat::Identity(rr, rr);
            C.bottomRows(rr) = -Mat::Identity(rr, rr);
            e = Vec(2 * rr);
            e.head(rr) = b.upper;
            e.tail(rr) = -b.lower;
        } else {
            const auto& p = l.U.get<ConvexSet::Polytope>();
            C = p.C;
            e = p.e;
        }
        const int uc = static_cast<int>(C.rows());
        GeneralLp lp;
        lp.c = Vec::Zero(rr + 1);
        lp.c[rr] = 1.0;
        lp.A = Mat::Zero(2 * n + uc, rr + 1);
        lp.A.block(0, 0, n, rr) = l.B;
        lp.A.block(0, rr, n, 1).setConstant(-1.0);
        lp.A.block(n, 0, n, rr) = -l.B;
        lp.A.block(n, rr, n, 1).setConstant(-1.0);
        lp.A.block(2 * n, 0, uc, rr) = C;
        lp.b = Vec(2 * n + uc);
        lp.b.head(n) = r;
        lp.b.segment(n, n) = -r;
        lp.b.tail(uc) = e;
        lp.sense.assign(2 * n + uc, RowSense::le);
        GeneralLpSolution s = solve_general_lp(lp);
        if (s.status != LpStatus::optimal)
            throw error("distance LP failed unexpectedly");
        return {s.value, s.x.head(rr)};
    }

    static double distance_to_bu(const LinearControl& l, const Vec& r) {
        return bu_distance_lp(l, r).first;
    }

    static Vec recover_control(const LinearControl& l, const Vec& u,
                               const Vec& v, double tol) {
        auto [dist, w] = bu_distance_lp(l, v - l.A * u);
        if (dist > 10 * std::max(tol, 1e-12))
            throw input_error("recover_control: no control realizes v within tolerance");
        return w;
    }

    std::variant<LinearControl, Polyhedral, Constant> v_;
};

} // namespace pdico
