#include "portalloc/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include <Eigen/Dense>

#include "portalloc/errors.hpp"

namespace portalloc {
namespace {

enum class VarState : unsigned char { Basic, AtLower, AtUpper, Free };

// Working form: every row i gets a slack s_i so that A x + s = b, with slack
// bounds encoding the relation. Rows whose starting slack is out of bounds get
// an artificial column sigma * e_i that phase 1 drives to zero.
class Solver {
public:
    Solver(const LinearProgram& lp, const SimplexOptions& options)
        : lp_(lp), opt_(options), n_(lp.num_columns()), m_(lp.num_rows()) {
        build_columns();
    }

    LpSolution run() {
        LpSolution result;
        initial_basis();

        if (num_artificials_ > 0) {
            phase_costs(/*phase_one=*/true);
            const auto status = iterate();
            if (status == LpStatus::Unbounded) throw NumericalFailure("phase 1 reported an unbounded ray");
            refactor();
            double infeasibility = 0.0;
            for (std::size_t j = n_ + m_; j < total_; ++j) infeasibility += x_[j];
            if (infeasibility > opt_.feasibility_tolerance * (1.0 + lp_.rhs_inf_norm())) {
                result.status = LpStatus::Infeasible;
                result.iterations = iterations_;
                return result;
            }
            for (std::size_t j = n_ + m_; j < total_; ++j) {
                upper_[j] = 0.0;
                if (state_[j] != VarState::Basic) {
                    state_[j] = VarState::AtLower;
                    x_[j] = 0.0;
                }
            }
        }

        phase_costs(/*phase_one=*/false);
        const auto status = iterate();
        result.iterations = iterations_;
        if (status == LpStatus::Unbounded) {
            result.status = LpStatus::Unbounded;
            return result;
        }
        refactor();

        result.status = LpStatus::Optimal;
        result.values.assign(x_.begin(), x_.begin() + static_cast<std::ptrdiff_t>(n_));
        for (std::size_t j = 0; j < n_; ++j) {
            result.values[j] = std::clamp(result.values[j], lower_[j], upper_[j]);
        }
        result.objective = lp_.objective_value(result.values);
        const Eigen::VectorXd y = duals();
        result.duals.assign(y.data(), y.data() + y.size());
        return result;
    }

private:
    void build_columns() {
        total_ = n_ + m_;
        lower_.resize(total_);
        upper_.resize(total_);
        col_start_.assign(n_ + 1, 0);
        for (const auto& row : lp_.rows()) {
            for (const auto& t : row.terms) ++col_start_[t.column + 1];
        }
        for (std::size_t j = 0; j < n_; ++j) col_start_[j + 1] += col_start_[j];
        col_rows_.resize(col_start_.back());
        col_vals_.resize(col_start_.back());
        std::vector<std::size_t> fill(col_start_.begin(), col_start_.end() - 1);
        for (std::size_t i = 0; i < m_; ++i) {
            for (const auto& t : lp_.row(i).terms) {
                col_rows_[fill[t.column]] = i;
                col_vals_[fill[t.column]] = t.value;
                ++fill[t.column];
            }
        }
        for (std::size_t j = 0; j < n_; ++j) {
            lower_[j] = lp_.column(j).lower;
            upper_[j] = lp_.column(j).upper;
        }
        for (std::size_t i = 0; i < m_; ++i) {
            switch (lp_.row(i).relation) {
                case Relation::LessEqual: lower_[n_ + i] = 0.0; upper_[n_ + i] = kInfinity; break;
                case Relation::GreaterEqual: lower_[n_ + i] = -kInfinity; upper_[n_ + i] = 0.0; break;
                case Relation::Equal: lower_[n_ + i] = 0.0; upper_[n_ + i] = 0.0; break;
            }
        }
    }

    void initial_basis() {
        x_.assign(total_, 0.0);
        state_.assign(total_, VarState::AtLower);
        for (std::size_t j = 0; j < n_; ++j) place_at_bound(j);

        Eigen::VectorXd residual(m_);
        for (std::size_t i = 0; i < m_; ++i) residual[i] = lp_.row(i).rhs;
        for (std::size_t j = 0; j < n_; ++j) {
            if (x_[j] == 0.0) continue;
            for (std::size_t p = col_start_[j]; p < col_start_[j + 1]; ++p) residual[col_rows_[p]] -= col_vals_[p] * x_[j];
        }

        basis_.assign(m_, 0);
        const double tol = opt_.feasibility_tolerance;
        for (std::size_t i = 0; i < m_; ++i) {
            const std::size_t slack = n_ + i;
            const double r = residual[i];
            if (r >= lower_[slack] - tol && r <= upper_[slack] + tol) {
                basis_[i] = slack;
                state_[slack] = VarState::Basic;
                x_[slack] = r;
                continue;
            }
            const double bound = r < lower_[slack] ? lower_[slack] : upper_[slack];
            state_[slack] = r < lower_[slack] ? VarState::AtLower : VarState::AtUpper;
            x_[slack] = bound;
            const std::size_t art = total_++;
            art_row_.push_back(i);
            art_sign_.push_back(r - bound > 0 ? 1.0 : -1.0);
            lower_.push_back(0.0);
            upper_.push_back(kInfinity);
            x_.push_back(std::abs(r - bound));
            state_.push_back(VarState::Basic);
            basis_[i] = art;
            ++num_artificials_;
        }
        cost_.assign(total_, 0.0);
        refactor();
    }

    void place_at_bound(std::size_t j) {
        if (std::isfinite(lower_[j])) {
            state_[j] = VarState::AtLower;
            x_[j] = lower_[j];
        } else if (std::isfinite(upper_[j])) {
            state_[j] = VarState::AtUpper;
            x_[j] = upper_[j];
        } else {
            state_[j] = VarState::Free;
            x_[j] = 0.0;
        }
    }

    void phase_costs(bool phase_one) {
        std::fill(cost_.begin(), cost_.end(), 0.0);
        if (phase_one) {
            for (std::size_t j = n_ + m_; j < total_; ++j) cost_[j] = -1.0;
        } else {
            for (std::size_t j = 0; j < n_; ++j) cost_[j] = lp_.column(j).objective;
        }
    }

    // Column j of [A | I | artificials] times a dense row vector.
    double dot_column(std::size_t j, const Eigen::VectorXd& v) const {
        if (j < n_) {
            double total = 0.0;
            for (std::size_t p = col_start_[j]; p < col_start_[j + 1]; ++p) total += col_vals_[p] * v[col_rows_[p]];
            return total;
        }
        if (j < n_ + m_) return v[j - n_];
        const std::size_t a = j - n_ - m_;
        return art_sign_[a] * v[art_row_[a]];
    }

    Eigen::VectorXd ftran(std::size_t j) const {
        if (j < n_) {
            Eigen::VectorXd alpha = Eigen::VectorXd::Zero(m_);
            for (std::size_t p = col_start_[j]; p < col_start_[j + 1]; ++p) alpha += col_vals_[p] * binv_.col(col_rows_[p]);
            return alpha;
        }
        if (j < n_ + m_) return binv_.col(j - n_);
        const std::size_t a = j - n_ - m_;
        return art_sign_[a] * binv_.col(art_row_[a]);
    }

    // Basic slacks and artificials are signed unit columns. With U the rows they
    // cover and R the rest, only the block A[R, structural basics] needs an LU;
    // the unit rows follow by substitution.
    void invert_basis() {
        std::vector<std::ptrdiff_t> unit_at_row(m_, -1);
        std::vector<std::size_t> structural;
        std::vector<double> unit_sign(m_, 0.0);
        for (std::size_t i = 0; i < m_; ++i) {
            const std::size_t j = basis_[i];
            if (j < n_) {
                structural.push_back(i);
                continue;
            }
            const std::size_t r = j < n_ + m_ ? j - n_ : art_row_[j - n_ - m_];
            if (unit_at_row[r] >= 0) throw NumericalFailure("basis factorization: repeated unit column");
            unit_at_row[r] = static_cast<std::ptrdiff_t>(i);
            unit_sign[i] = j < n_ + m_ ? 1.0 : art_sign_[j - n_ - m_];
        }
        std::vector<std::ptrdiff_t> block_row(m_, -1);
        std::vector<std::size_t> free_rows;
        for (std::size_t r = 0; r < m_; ++r) {
            if (unit_at_row[r] < 0) {
                block_row[r] = static_cast<std::ptrdiff_t>(free_rows.size());
                free_rows.push_back(r);
            }
        }
        const auto k = static_cast<Eigen::Index>(structural.size());
        if (free_rows.size() != structural.size()) throw NumericalFailure("basis factorization: singular basis");

        binv_ = Eigen::MatrixXd::Zero(m_, m_);
        Eigen::MatrixXd block_inv;
        if (k > 0) {
            Eigen::MatrixXd block = Eigen::MatrixXd::Zero(k, k);
            for (Eigen::Index b = 0; b < k; ++b) {
                const std::size_t j = basis_[structural[b]];
                for (std::size_t p = col_start_[j]; p < col_start_[j + 1]; ++p) {
                    if (block_row[col_rows_[p]] >= 0) block(block_row[col_rows_[p]], b) = col_vals_[p];
                }
            }
            Eigen::PartialPivLU<Eigen::MatrixXd> lu(block);
            const double smallest = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
            if (!(smallest >= opt_.pivot_tolerance)) {
                throw NumericalFailure("basis factorization pivot " + std::to_string(smallest) + " below tolerance");
            }
            block_inv = lu.inverse();
            for (Eigen::Index b = 0; b < k; ++b)
                for (Eigen::Index a = 0; a < k; ++a) binv_(structural[b], free_rows[a]) = block_inv(b, a);
        }
        // Unit position i at row r: sign * x_r + A[r, C] x_C = rhs_r.
        std::vector<std::size_t> unit_rows;
        std::vector<std::ptrdiff_t> unit_index(m_, -1);
        for (std::size_t r = 0; r < m_; ++r) {
            if (unit_at_row[r] < 0) continue;
            const auto i = static_cast<std::size_t>(unit_at_row[r]);
            binv_(i, r) = unit_sign[i];
            unit_index[r] = static_cast<std::ptrdiff_t>(unit_rows.size());
            unit_rows.push_back(r);
        }
        if (k == 0 || unit_rows.empty()) return;
        Eigen::MatrixXd coupling = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(unit_rows.size()), k);
        for (Eigen::Index b = 0; b < k; ++b) {
            const std::size_t j = basis_[structural[b]];
            for (std::size_t p = col_start_[j]; p < col_start_[j + 1]; ++p) {
                if (unit_index[col_rows_[p]] >= 0) coupling(unit_index[col_rows_[p]], b) = col_vals_[p];
            }
        }
        const Eigen::MatrixXd w = coupling * block_inv;
        for (std::size_t u = 0; u < unit_rows.size(); ++u) {
            const auto i = static_cast<std::size_t>(unit_at_row[unit_rows[u]]);
            const double sign = unit_sign[i];
            for (Eigen::Index a = 0; a < k; ++a) binv_(i, free_rows[a]) = -sign * w(static_cast<Eigen::Index>(u), a);
        }
    }

    void refactor() {
        pivots_since_refactor_ = 0;
        if (m_ == 0) {
            binv_.resize(0, 0);
            return;
        }
        invert_basis();

        // Recompute basic values from the nonbasic ones to shed drift.
        Eigen::VectorXd rhs(m_);
        for (std::size_t i = 0; i < m_; ++i) rhs[i] = lp_.row(i).rhs;
        for (std::size_t j = 0; j < total_; ++j) {
            if (state_[j] == VarState::Basic || x_[j] == 0.0) continue;
            if (j < n_) {
                for (std::size_t p = col_start_[j]; p < col_start_[j + 1]; ++p) rhs[col_rows_[p]] -= col_vals_[p] * x_[j];
            } else if (j < n_ + m_) {
                rhs[j - n_] -= x_[j];
            } else {
                const std::size_t a = j - n_ - m_;
                rhs[art_row_[a]] -= art_sign_[a] * x_[j];
            }
        }
        const Eigen::VectorXd xb = binv_ * rhs;
        for (std::size_t i = 0; i < m_; ++i) x_[basis_[i]] = xb[i];
    }

    Eigen::VectorXd duals() const {
        Eigen::VectorXd cb(m_);
        for (std::size_t i = 0; i < m_; ++i) cb[i] = cost_[basis_[i]];
        return binv_.transpose() * cb;
    }

    double phase_objective() const {
        double total = 0.0;
        for (std::size_t j = 0; j < total_; ++j) total += cost_[j] * x_[j];
        return total;
    }

    struct Entering {
        std::size_t column;
        double direction;  // +1 increase, -1 decrease
    };

    std::optional<Entering> price(const Eigen::VectorXd& y, bool bland) const {
        const double tol = opt_.optimality_tolerance;
        std::optional<Entering> best;
        double best_score = 0.0;
        for (std::size_t j = 0; j < total_; ++j) {
            const VarState st = state_[j];
            if (st == VarState::Basic || lower_[j] == upper_[j]) continue;
            const double d = cost_[j] - dot_column(j, y);
            double direction = 0.0;
            if ((st == VarState::AtLower || st == VarState::Free) && d > tol) direction = 1.0;
            if ((st == VarState::AtUpper || st == VarState::Free) && d < -tol) direction = -1.0;
            if (direction == 0.0) continue;
            if (bland) return Entering{j, direction};
            if (std::abs(d) > best_score) {
                best_score = std::abs(d);
                best = Entering{j, direction};
            }
        }
        return best;
    }

    // Returns Optimal when no improving column remains, Unbounded on an open ray.
    LpStatus iterate() {
        std::size_t limit = opt_.max_iterations;
        if (limit == 0) limit = 50 * (m_ + total_) + 10000;
        const std::size_t stall_limit = 3 * (m_ + n_);
        bool bland = false;
        std::size_t stalled = 0;
        double best_objective = phase_objective();

        for (;;) {
            if (iterations_ >= limit) throw NumericalFailure("simplex iteration limit reached");
            const Eigen::VectorXd y = duals();
            const auto entering = price(y, bland);
            if (!entering) return LpStatus::Optimal;
            ++iterations_;

            const std::size_t q = entering->column;
            const double dir = entering->direction;
            const Eigen::VectorXd alpha = ftran(q);

            // Ratio test. Basic i moves by -dir * alpha_i per unit step.
            double step = kInfinity;
            std::optional<std::size_t> leave;
            const double tie = 1e-12;
            for (std::size_t i = 0; i < m_; ++i) {
                const double delta = dir * alpha[i];
                const std::size_t b = basis_[i];
                double ratio;
                if (delta > opt_.ratio_pivot_tolerance && std::isfinite(lower_[b])) {
                    ratio = std::max(0.0, (x_[b] - lower_[b]) / delta);
                } else if (delta < -opt_.ratio_pivot_tolerance && std::isfinite(upper_[b])) {
                    ratio = std::max(0.0, (upper_[b] - x_[b]) / -delta);
                } else {
                    continue;
                }
                if (!leave || ratio < step - tie) {
                    step = ratio;
                    leave = i;
                } else if (ratio <= step + tie) {
                    const bool better = bland ? basis_[i] < basis_[*leave]
                                              : std::abs(alpha[i]) > std::abs(alpha[*leave]);
                    if (better) {
                        step = std::min(step, ratio);
                        leave = i;
                    }
                }
            }

            const double flip = upper_[q] - lower_[q];
            if (std::isfinite(flip) && (!leave || flip <= step)) {
                // Entering variable reaches its opposite bound; basis unchanged.
                x_[q] = dir > 0 ? upper_[q] : lower_[q];
                state_[q] = dir > 0 ? VarState::AtUpper : VarState::AtLower;
                for (std::size_t i = 0; i < m_; ++i) x_[basis_[i]] -= dir * flip * alpha[i];
            } else if (!leave) {
                return LpStatus::Unbounded;
            } else {
                const std::size_t r = *leave;
                const std::size_t out = basis_[r];
                x_[q] += dir * step;
                for (std::size_t i = 0; i < m_; ++i) x_[basis_[i]] -= dir * step * alpha[i];
                const bool to_lower = dir * alpha[r] > 0;
                x_[out] = to_lower ? lower_[out] : upper_[out];
                state_[out] = to_lower ? VarState::AtLower : VarState::AtUpper;
                basis_[r] = q;
                state_[q] = VarState::Basic;

                const Eigen::RowVectorXd pivot_row = binv_.row(r) / alpha[r];
                binv_.noalias() -= alpha * pivot_row;
                binv_.row(r) = pivot_row;

                if (++pivots_since_refactor_ >= opt_.refactor_interval) refactor();
            }

            const double objective = phase_objective();
            if (objective > best_objective + 1e-12 * (1.0 + std::abs(best_objective))) {
                best_objective = objective;
                stalled = 0;
            } else if (!bland && ++stalled >= stall_limit) {
                bland = true;
            }
        }
    }

    const LinearProgram& lp_;
    SimplexOptions opt_;
    std::size_t n_;
    std::size_t m_;
    std::size_t total_ = 0;
    std::size_t num_artificials_ = 0;
    std::size_t iterations_ = 0;
    std::size_t pivots_since_refactor_ = 0;

    std::vector<std::size_t> col_start_;
    std::vector<std::size_t> col_rows_;
    std::vector<double> col_vals_;
    std::vector<std::size_t> art_row_;
    std::vector<double> art_sign_;

    std::vector<double> lower_;
    std::vector<double> upper_;
    std::vector<double> cost_;
    std::vector<double> x_;
    std::vector<VarState> state_;
    std::vector<std::size_t> basis_;
    Eigen::MatrixXd binv_;
};

}  // namespace

LpSolution solve(const LinearProgram& lp, const SimplexOptions& options) {
    lp.check();
    Solver solver(lp, options);
    return solver.run();
}

}  // namespace portalloc
