#pragma once

#include <algorithm>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "pdico/errors.hpp"
#include "pdico/grid.hpp"

namespace pdico {

enum class RowSense { le, eq };
enum class LpStatus { optimal, unbounded, infeasible };

inline const char* to_string(LpStatus s) {
    switch (s) {
        case LpStatus::optimal: return "optimal";
        case LpStatus::unbounded: return "unbounded";
        case LpStatus::infeasible: return "infeasible";
    }
    return "?";
}

/// Dense two-phase primal simplex for
///     min c'z   s.t.  A z (<=|=) b,  z >= 0,
/// with Bland's anti-cycling rule (lowest-index entering column, lowest
/// basic-variable index on ratio ties), so every answer is deterministic.
///
/// Row duals y satisfy c_B = A_B' y for the final basis; reduced costs
/// c - A'y are >= 0 at optimality. Chosen pivots below pivot_min abort
/// with conditioning_error.
struct StandardLpResult {
    LpStatus status = LpStatus::optimal;
    Vec z;                     // structural variables (set when optimal)
    double objective = 0;
    Vec row_duals;             // y per input row, in the row's original orientation
    bool duals_valid = false;
    double infeasibility = 0;  // min l1 artificial mass (when infeasible)
};

namespace detail {

class SimplexTableau {
public:
    SimplexTableau(const Mat& A, const Vec& b, const Vec& c,
                   const std::vector<RowSense>& sense)
        : m_(static_cast<int>(A.rows())), nv_(static_cast<int>(A.cols())),
          sense_(sense), costs_(c) {
        if (b.size() != m_ || c.size() != nv_ ||
            static_cast<int>(sense.size()) != m_)
            throw dimension_error("simplex: inconsistent problem dimensions");

        int n_slack = 0;
        for (auto s : sense_) if (s == RowSense::le) ++n_slack;

        // Equality form with slacks, rows flipped so the rhs is nonnegative.
        flipped_.assign(m_, false);
        int ncols = nv_ + n_slack;
        A0_ = Mat::Zero(m_, ncols + m_);  // reserve room for artificials
        b_ = Vec(m_);
        slack_col_.assign(m_, -1);
        int sc = nv_;
        for (int i = 0; i < m_; ++i) {
            double sgn = 1.0;
            if (b[i] < 0) { sgn = -1.0; flipped_[i] = true; }
            for (int j = 0; j < nv_; ++j) A0_(i, j) = sgn * A(i, j);
            b_[i] = sgn * b[i];
            if (sense_[i] == RowSense::le) {
                slack_col_[i] = sc;
                A0_(i, sc) = sgn;
                ++sc;
            }
        }
        n_real_ = sc;

        // Initial basis: unflipped slacks where possible, artificials elsewhere.
        basis_.assign(m_, -1);
        first_artificial_ = n_real_;
        int ac = n_real_;
        for (int i = 0; i < m_; ++i) {
            if (slack_col_[i] >= 0 && !flipped_[i]) {
                basis_[i] = slack_col_[i];
            } else {
                A0_(i, ac) = 1.0;
                basis_[i] = ac;
                ++ac;
            }
        }
        ncols_ = ac;
        tab_ = A0_.leftCols(ncols_);
        rhs_ = b_;
        in_basis_.assign(ncols_, false);
        for (int i = 0; i < m_; ++i) in_basis_[basis_[i]] = true;
    }

    /// Runs phase I (+ artificial drive-out) and phase II. Returns status.
    LpStatus run(double& infeasibility) {
        // Phase I: minimize the artificial mass.
        if (ncols_ > first_artificial_) {
            Vec pc = Vec::Zero(ncols_);
            for (int j = first_artificial_; j < ncols_; ++j) pc[j] = 1.0;
            build_cost_row(pc);
            iterate(/*allow_artificials=*/true);
            infeasibility = 0;
            for (int i = 0; i < m_; ++i)
                if (basis_[i] >= first_artificial_) infeasibility += rhs_[i];
            if (infeasibility > opts_feas_tol) return LpStatus::infeasible;
            drive_out_artificials();
        } else {
            infeasibility = 0;
        }

        // Phase II on the real costs.
        Vec pc = Vec::Zero(ncols_);
        pc.head(nv_) = costs_;
        build_cost_row(pc);
        return iterate(/*allow_artificials=*/false);
    }

    Vec solution() const {
        Vec z = Vec::Zero(nv_);
        for (int i = 0; i < m_; ++i)
            if (basis_[i] < nv_) z[basis_[i]] = rhs_[i];
        return z;
    }

    /// Solves A_B' y = c_B on the original (unpivoted) columns and restores
    /// the caller's row orientation.
    Vec duals(bool& valid) const {
        Mat B(m_, m_);
        Vec cb(m_);
        for (int i = 0; i < m_; ++i) {
            B.col(i) = A0_.col(basis_[i]).head(m_);
            cb[i] = basis_[i] < nv_ ? costs_[basis_[i]] : 0.0;
        }
        Eigen::PartialPivLU<Mat> lu(B.transpose());
        Vec y = lu.solve(cb);
        const double res = (B.transpose() * y - cb).cwiseAbs().maxCoeff();
        const double scale = std::max(1.0, cb.cwiseAbs().maxCoeff());
        valid = y.allFinite() && res <= 1e-7 * scale;
        for (int i = 0; i < m_; ++i)
            if (flipped_[i]) y[i] = -y[i];
        return y;
    }

private:
    static constexpr double opts_cost_tol = 1e-9;
    static constexpr double opts_feas_tol = 1e-9;
    static constexpr double opts_pivot_eligible = 1e-13;
    static constexpr double opts_pivot_min = 1e-11;

    void build_cost_row(const Vec& pc) {
        cost_ = pc;
        cost0_ = 0;
        for (int i = 0; i < m_; ++i) {
            const double cb = pc[basis_[i]];
            if (cb != 0.0) {
                cost_ -= cb * tab_.row(i).transpose();
                cost0_ -= cb * rhs_[i];
            }
        }
    }

    LpStatus iterate(bool allow_artificials) {
        const int limit = allow_artificials ? ncols_ : first_artificial_;
        for (long pivots = 0;; ++pivots) {
            if (pivots > 1000000)
                throw conditioning_error("simplex: pivot limit exceeded");
            int enter = -1;
            for (int j = 0; j < limit; ++j) {
                if (is_basic(j)) continue;
                if (cost_[j] < -opts_cost_tol) { enter = j; break; }
            }
            if (enter < 0) return LpStatus::optimal;

            double best_ratio = std::numeric_limits<double>::infinity();
            for (int i = 0; i < m_; ++i) {
                const double a = tab_(i, enter);
                if (a > opts_pivot_eligible)
                    best_ratio = std::min(best_ratio, rhs_[i] / a);
            }
            if (!std::isfinite(best_ratio)) return LpStatus::unbounded;
            int leave = -1;
            for (int i = 0; i < m_; ++i) {
                const double a = tab_(i, enter);
                if (a > opts_pivot_eligible && rhs_[i] / a <= best_ratio &&
                    (leave < 0 || basis_[i] < basis_[leave]))
                    leave = i;
            }
            if (std::abs(tab_(leave, enter)) < opts_pivot_min)
                throw conditioning_error("simplex: pivot below 1e-11");
            pivot(leave, enter);
        }
    }

    void drive_out_artificials() {
        for (int i = 0; i < m_; ++i) {
            if (basis_[i] < first_artificial_) continue;
            int enter = -1;
            for (int j = 0; j < first_artificial_; ++j) {
                if (is_basic(j)) continue;
                if (std::abs(tab_(i, j)) > 1e-9) { enter = j; break; }
            }
            if (enter >= 0) pivot(i, enter);
            // Otherwise the row is redundant; the artificial stays basic at 0.
        }
    }

    bool is_basic(int j) const { return in_basis_[j]; }

    void pivot(int r, int s) {
        in_basis_[basis_[r]] = false;
        in_basis_[s] = true;
        const double inv = 1.0 / tab_(r, s);
        tab_.row(r) *= inv;
        rhs_[r] *= inv;
        tab_(r, s) = 1.0;  // exact
        for (int i = 0; i < m_; ++i) {
            if (i == r) continue;
            const double f = tab_(i, s);
            if (f != 0.0) {
                tab_.row(i) -= f * tab_.row(r);
                rhs_[i] -= f * rhs_[r];
                tab_(i, s) = 0.0;
            }
        }
        const double fc = cost_[s];
        if (fc != 0.0) {
            cost_ -= fc * tab_.row(r).transpose();
            cost0_ -= fc * rhs_[r];
            cost_[s] = 0.0;
        }
        basis_[r] = s;
    }

    int m_, nv_;
    std::vector<RowSense> sense_;
    Vec costs_;
    Mat A0_;           // equality form, original (unpivoted) columns
    Mat tab_;
    Vec b_, rhs_;
    Vec cost_;
    double cost0_ = 0;
    std::vector<bool> flipped_, in_basis_;
    std::vector<int> slack_col_, basis_;
    int n_real_ = 0, first_artificial_ = 0, ncols_ = 0;
};

} // namespace detail

inline StandardLpResult simplex_solve(const Mat& A, const Vec& b, const Vec& c,
                                      const std::vector<RowSense>& sense) {
    detail::SimplexTableau t(A, b, c, sense);
    StandardLpResult out;
    double infeas = 0;
    out.status = t.run(infeas);
    out.infeasibility = infeas;
    if (out.status == LpStatus::optimal) {
        out.z = t.solution();
        out.objective = c.dot(out.z);
        out.row_duals = t.duals(out.duals_valid);
    }
    return out;
}

/// max c'x  s.t.  M x <= e,  x free.
struct LpProblem {
    Vec c;
    Mat M;
    Vec e;
};

struct LpSolution {
    LpStatus status = LpStatus::optimal;
    Vec x;
    double value = 0;
    Vec duals;          // q >= 0 with M'q = c and e'q = value (when optimal)
    bool duals_valid = false;
};

inline LpSolution lp_solve(const LpProblem& p) {
    const int k = static_cast<int>(p.M.rows());
    const int m = static_cast<int>(p.M.cols());
    if (p.c.size() != m || p.e.size() != k)
        throw dimension_error("lp_solve: inconsistent dimensions");
    if (k > 10000 || m > 10000)
        throw capability_error("lp_solve: dense problem exceeds 1e4 rows/cols");

    // Free variables split as x = x+ - x-, minimize -c'x.
    Mat A(k, 2 * m);
    A.leftCols(m) = p.M;
    A.rightCols(m) = -p.M;
    Vec c(2 * m);
    c.head(m) = -p.c;
    c.tail(m) = p.c;
    std::vector<RowSense> sense(k, RowSense::le);

    StandardLpResult r = simplex_solve(A, p.e, c, sense);
    LpSolution out;
    out.status = r.status;
    if (r.status == LpStatus::optimal) {
        out.x = r.z.head(m) - r.z.tail(m);
        out.value = p.c.dot(out.x);
        out.duals = -r.row_duals;
        out.duals_valid = r.duals_valid;
    }
    return out;
}

/// Finds q >= 0 with M q = rhs and q_i = 0 for pinned i; among feasible
/// points, phase II minimizes sum(q) under Bland's rule so the answer is
/// reproducible. infeasibility is the attainable l1 equation residual.
struct NonnegFeasibility {
    bool feasible = false;
    Vec q;
    double infeasibility = 0;
};

inline NonnegFeasibility lp_feasible_nonneg(const Mat& M, const Vec& rhs,
                                            const std::vector<int>& pinned = {}) {
    const int rows = static_cast<int>(M.rows());
    const int cols = static_cast<int>(M.cols());
    if (rhs.size() != rows)
        throw dimension_error("lp_feasible_nonneg: inconsistent dimensions");

    std::vector<bool> pin(cols, false);
    for (int i : pinned) {
        if (i < 0 || i >= cols)
            throw dimension_error("lp_feasible_nonneg: pin index out of range");
        pin[i] = true;
    }
    std::vector<int> keep;
    for (int j = 0; j < cols; ++j)
        if (!pin[j]) keep.push_back(j);

    Mat A(rows, static_cast<int>(keep.size()));
    for (size_t j = 0; j < keep.size(); ++j) A.col(j) = M.col(keep[j]);
    Vec c = Vec::Ones(static_cast<int>(keep.size()));
    std::vector<RowSense> sense(rows, RowSense::eq);

    StandardLpResult r = simplex_solve(A, rhs, c, sense);
    NonnegFeasibility out;
    out.infeasibility = r.infeasibility;
    if (r.status == LpStatus::optimal) {
        out.feasible = true;
        out.q = Vec::Zero(cols);
        for (size_t j = 0; j < keep.size(); ++j) out.q[keep[j]] = r.z[j];
    }
    return out;
}

/// General dense LP: min c'x s.t. per-row <= or = constraints, x free.
/// mult holds KKT multipliers: c + A'mult = 0 over active rows, with
/// mult >= 0 on <= rows.
struct GeneralLp {
    Vec c;
    Mat A;
    Vec b;
    std::vector<RowSense> sense;
};

struct GeneralLpSolution {
    LpStatus status = LpStatus::optimal;
    Vec x;
    double value = 0;
    Vec mult;
    bool duals_valid = false;
    double infeasibility = 0;
};

inline GeneralLpSolution solve_general_lp(const GeneralLp& p) {
    const int rows = static_cast<int>(p.A.rows());
    const int m = static_cast<int>(p.A.cols());
    if (p.c.size() != m || p.b.size() != rows ||
        static_cast<int>(p.sense.size()) != rows)
        throw dimension_error("solve_general_lp: inconsistent dimensions");

    Mat A(rows, 2 * m);
    A.leftCols(m) = p.A;
    A.rightCols(m) = -p.A;
    Vec c(2 * m);
    c.head(m) = p.c;
    c.tail(m) = -p.c;

    StandardLpResult r = simplex_solve(A, p.b, c, p.sense);
    GeneralLpSolution out;
    out.status = r.status;
    out.infeasibility = r.infeasibility;
    if (r.status == LpStatus::optimal) {
        out.x = r.z.head(m) - r.z.tail(m);
        out.value = p.c.dot(out.x);
        out.mult = -r.row_duals;
        out.duals_valid = r.duals_valid;
    }
    return out;
}

} // namespace pdico
