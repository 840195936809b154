// Copyright (C) 2026 mcmot contributors
// SPDX-License-Identifier: Apache-2.0
//

#include <mcmot/fota.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace mcmot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// log(sum exp(t)) over terms that may include -inf entries.
double log_sum_exp(const Eigen::VectorXd& t) {
    const double m = t.maxCoeff();
    if (m == -kInf) return -kInf;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < t.size(); ++i) {
        acc += std::exp(t(i) - m);
    }
    return m + std::log(acc);
}

Eigen::VectorXd safe_log(const Eigen::VectorXd& v) {
    Eigen::VectorXd out(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        out(i) = v(i) > 0.0 ? std::log(v(i)) : -kInf;
    }
    return out;
}

}  // namespace

double default_s(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
    return std::min(p.sum(), q.sum());
}

void validate(const TransportProblem& problem) {
    const Eigen::Index n = problem.cost.rows();
    const Eigen::Index m = problem.cost.cols();
    if (n == 0 || m == 0) {
        throw std::invalid_argument("TransportProblem: empty cost matrix");
    }
    if (!problem.cost.allFinite()) {
        throw std::invalid_argument("TransportProblem: non-finite cost entry");
    }
    if (problem.p.size() != n || problem.q.size() != m) {
        throw std::invalid_argument("TransportProblem: mass size mismatch");
    }
    if (!(problem.p.minCoeff() > 0.0) || !(problem.q.minCoeff() > 0.0)) {
        throw std::invalid_argument("TransportProblem: masses must be positive");
    }
    const double cap = default_s(problem.p, problem.q);
    if (!(problem.s > 0.0) || problem.s > cap + 1e-12) {
        throw std::invalid_argument(
            "TransportProblem: s must lie in (0, min(|p|, |q|)]");
    }
    if (!(problem.epsilon >= 0.0) || !std::isfinite(problem.epsilon)) {
        throw std::invalid_argument("TransportProblem: bad epsilon");
    }
    if (!(problem.gamma > 0.0)) {
        throw std::invalid_argument("TransportProblem: gamma must be positive");
    }
    if (problem.max_iters < 1 || !(problem.tol > 0.0)) {
        throw std::invalid_argument("TransportProblem: bad iteration settings");
    }
}

Eigen::MatrixXd extend_cost(const Eigen::MatrixXd& cost, double epsilon) {
    if (cost.size() == 0) {
        throw std::invalid_argument("extend_cost: empty cost matrix");
    }
    if (!cost.allFinite() || !std::isfinite(epsilon) || epsilon < 0.0) {
        throw std::invalid_argument("extend_cost: non-finite input");
    }
    const Eigen::Index n = cost.rows();
    const Eigen::Index m = cost.cols();
    Eigen::MatrixXd out(n + 1, m + 1);
    out.topLeftCorner(n, m) = cost;
    out.col(m).head(n).setConstant(epsilon);
    out.row(n).head(m).setConstant(epsilon);
    out(n, m) = 2.0 * epsilon + cost.maxCoeff();
    return out;
}

TransportPlan sinkhorn(const TransportProblem& problem) {
    validate(problem);
    const Eigen::Index n = problem.cost.rows();
    const Eigen::Index m = problem.cost.cols();
    const double gamma = problem.gamma;

    const Eigen::MatrixXd cbar = extend_cost(problem.cost, problem.epsilon);

    Eigen::VectorXd pbar(n + 1), qbar(m + 1);
    pbar.head(n) = problem.p;
    pbar(n) = problem.q.sum() - problem.s;
    qbar.head(m) = problem.q;
    qbar(m) = problem.p.sum() - problem.s;
    // Guard tiny negatives from s = min(|p|, |q|) in floating point.
    pbar(n) = std::max(pbar(n), 0.0);
    qbar(m) = std::max(qbar(m), 0.0);

    const Eigen::VectorXd log_p = safe_log(pbar);
    const Eigen::VectorXd log_q = safe_log(qbar);

    // Rows/columns with zero mass carry -inf potentials and hence zero plan
    // mass; only the remaining (active) coordinates take part in the solve.
    std::vector<Eigen::Index> act_f, act_g;
    for (Eigen::Index i = 0; i <= n; ++i) {
        if (log_p(i) != -kInf) act_f.push_back(i);
    }
    for (Eigen::Index j = 0; j <= m; ++j) {
        if (log_q(j) != -kInf) act_g.push_back(j);
    }
    const Eigen::Index dim =
        static_cast<Eigen::Index>(act_f.size() + act_g.size());

    Eigen::VectorXd f = Eigen::VectorXd::Zero(n + 1);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(m + 1);
    for (Eigen::Index i = 0; i <= n; ++i) {
        if (log_p(i) == -kInf) f(i) = -kInf;
    }
    for (Eigen::Index j = 0; j <= m; ++j) {
        if (log_q(j) == -kInf) g(j) = -kInf;
    }

    // One balancing sweep: rows against current g, then columns against the
    // refreshed f. plan = exp((f_i + g_j - C_ij) / gamma).
    Eigen::VectorXd row_terms(m + 1), col_terms(n + 1);
    auto sweep = [&](Eigen::VectorXd& fv, Eigen::VectorXd& gv) {
        for (Eigen::Index i : act_f) {
            row_terms = (gv - cbar.row(i).transpose()) / gamma;
            fv(i) = gamma * (log_p(i) - log_sum_exp(row_terms));
        }
        for (Eigen::Index j : act_g) {
            col_terms = (fv - cbar.col(j)) / gamma;
            gv(j) = gamma * (log_q(j) - log_sum_exp(col_terms));
        }
    };
    auto fill_plan = [&](const Eigen::VectorXd& fv, const Eigen::VectorXd& gv,
                         Eigen::MatrixXd& plan) {
        for (Eigen::Index i = 0; i <= n; ++i) {
            for (Eigen::Index j = 0; j <= m; ++j) {
                const double e = fv(i) + gv(j) - cbar(i, j);
                plan(i, j) =
                    (fv(i) == -kInf || gv(j) == -kInf) ? 0.0 : std::exp(e / gamma);
            }
        }
    };
    auto plan_error = [&](const Eigen::MatrixXd& plan) {
        const double row_err = (plan.rowwise().sum() - pbar).cwiseAbs().maxCoeff();
        const double col_err =
            (plan.colwise().sum().transpose() - qbar).cwiseAbs().maxCoeff();
        return std::max(row_err, col_err);
    };
    auto pack = [&](const Eigen::VectorXd& fv, const Eigen::VectorXd& gv) {
        Eigen::VectorXd x(dim);
        Eigen::Index k = 0;
        for (Eigen::Index i : act_f) x(k++) = fv(i);
        for (Eigen::Index j : act_g) x(k++) = gv(j);
        return x;
    };
    auto unpack = [&](const Eigen::VectorXd& x, Eigen::VectorXd& fv,
                      Eigen::VectorXd& gv) {
        Eigen::Index k = 0;
        for (Eigen::Index i : act_f) fv(i) = x(k++);
        for (Eigen::Index j : act_g) gv(j) = x(k++);
    };

    // Plain sweeps converge linearly, and the rate degrades badly when the
    // extension row/column tie many entries at the same cost. After a short
    // warm-up the iterate is extrapolated from the recent sweep history
    // (Anderson mixing); a candidate that blows up is discarded in favour of
    // the plain sweep, so the safeguarded scheme never does worse than the
    // unaccelerated one. The best iterate seen so far is what gets returned.
    constexpr int kWarmupSweeps = 10;
    constexpr int kMixDepth = 8;
    constexpr double kRejectFactor = 1e6;
    std::vector<Eigen::VectorXd> hist_x, hist_fx;

    TransportPlan result;
    result.plan = Eigen::MatrixXd::Zero(n + 1, m + 1);
    result.marginal_error = kInf;

    Eigen::MatrixXd plan_buf(n + 1, m + 1);
    Eigen::VectorXd f_try(n + 1), g_try(m + 1);
    for (int iter = 1; iter <= problem.max_iters; ++iter) {
        const Eigen::VectorXd x = pack(f, g);
        Eigen::VectorXd f_new = f, g_new = g;
        sweep(f_new, g_new);
        fill_plan(f_new, g_new, plan_buf);
        if (!plan_buf.allFinite()) {
            throw std::domain_error(
                "sinkhorn: kernel overflow, gamma too small for the cost scale");
        }
        const Eigen::VectorXd phix = pack(f_new, g_new);

        bool mixed = false;
        Eigen::VectorXd x_next = phix;
        if (iter > kWarmupSweeps && !hist_x.empty()) {
            const Eigen::Index mk = std::min<Eigen::Index>(
                kMixDepth, std::min<Eigen::Index>(
                               static_cast<Eigen::Index>(hist_x.size()), dim));
            const Eigen::VectorXd rk = phix - x;
            const double r_scale = rk.norm();
            if (r_scale > 0.0) {
                // Least squares over residual differences, normalised by the
                // current residual so the solve stays conditioned as the
                // iterate approaches the fixed point.
                Eigen::MatrixXd d_res(dim, mk), d_img(dim, mk);
                for (Eigen::Index a = 0; a < mk; ++a) {
                    const std::size_t idx = hist_x.size() - 1 - a;
                    d_res.col(a) = ((hist_fx[idx] - hist_x[idx]) - rk) / r_scale;
                    d_img.col(a) = hist_fx[idx] - phix;
                }
                const Eigen::VectorXd alpha =
                    d_res.colPivHouseholderQr().solve(-rk / r_scale);
                x_next = phix + d_img * alpha;
                mixed = true;
            }
        }

        bool accepted = false;
        double err = kInf;
        if (mixed) {
            f_try = f;
            g_try = g;
            unpack(x_next, f_try, g_try);
            fill_plan(f_try, g_try, plan_buf);
            err = plan_error(plan_buf);
            accepted =
                std::isfinite(err) && err <= kRejectFactor * result.marginal_error;
        }
        if (accepted) {
            f = f_try;
            g = g_try;
        } else {
            // Plain sweep, either by schedule or because the extrapolated
            // candidate blew up (the sweep history restarts in that case).
            f = f_new;
            g = g_new;
            fill_plan(f, g, plan_buf);
            err = plan_error(plan_buf);
            if (mixed) {
                hist_x.clear();
                hist_fx.clear();
            }
        }
        if (accepted || !mixed) {
            hist_x.push_back(x);
            hist_fx.push_back(phix);
            if (static_cast<int>(hist_x.size()) > kMixDepth + 1) {
                hist_x.erase(hist_x.begin());
                hist_fx.erase(hist_fx.begin());
            }
        }

        result.iterations_used = iter;
        if (err < result.marginal_error) {
            result.marginal_error = err;
            result.plan = plan_buf;
        }
        if (result.marginal_error <= problem.tol) {
            result.converged = true;
            break;
        }
    }
    return result;
}

Assignment extract_assignment(const TransportPlan& plan, double min_mass) {
    const Eigen::Index rows = plan.plan.rows();
    const Eigen::Index cols = plan.plan.cols();
    if (rows < 2 || cols < 2) {
        throw std::invalid_argument("extract_assignment: plan too small");
    }
    const Eigen::Index n = rows - 1;
    const Eigen::Index m = cols - 1;

    Assignment out;
    out.detection_to_track.assign(m, kUnmatched);
    out.track_to_detections.assign(n, {});

    for (Eigen::Index j = 0; j < m; ++j) {
        Eigen::Index best_row = 0;
        double best_mass = plan.plan(0, j);
        for (Eigen::Index i = 1; i <= n; ++i) {
            if (plan.plan(i, j) > best_mass) {
                best_mass = plan.plan(i, j);
                best_row = i;
            }
        }
        if (best_row == n || best_mass < min_mass) continue;
        out.detection_to_track[j] = static_cast<int>(best_row);
        out.track_to_detections[best_row].push_back(static_cast<int>(j));
    }
    return out;
}

Assignment solve(const TransportProblem& problem, double min_mass) {
    return extract_assignment(sinkhorn(problem), min_mass);
}

namespace {

bool nearly_integral(double v) { return std::abs(v - std::round(v)) < 1e-9; }

// Exhaustive search over integral placements: each detection column goes
// wholly to one row (interior or dustbin); interior row slack rides the
// dustbin column at cost epsilon, dustbin slack sits in the corner.
std::pair<Eigen::MatrixXd, double> enumerate_oracle(
    const TransportProblem& problem, const Eigen::MatrixXd& cbar) {
    const int n = static_cast<int>(problem.cost.rows());
    const int m = static_cast<int>(problem.cost.cols());
    const double dustbin_mass = problem.q.sum() - problem.s;

    std::vector<int> placement(m, 0), best(m, 0);
    std::vector<double> load(n, 0.0);
    double best_cost = kInf;

    while (true) {
        std::fill(load.begin(), load.end(), 0.0);
        int binned = 0;
        for (int j = 0; j < m; ++j) {
            if (placement[j] == n) {
                ++binned;
            } else {
                load[placement[j]] += 1.0;
            }
        }

        bool feasible = static_cast<double>(binned) <= dustbin_mass + 1e-9;
        for (int i = 0; feasible && i < n; ++i) {
            feasible = load[i] <= problem.p(i) + 1e-9;
        }
        if (feasible) {
            double cost = 0.0;
            for (int j = 0; j < m; ++j) cost += cbar(placement[j], j);
            for (int i = 0; i < n; ++i) {
                cost += (problem.p(i) - load[i]) * problem.epsilon;
            }
            cost += (dustbin_mass - binned) * cbar(n, m);
            if (cost < best_cost) {
                best_cost = cost;
                best = placement;
            }
        }

        int digit = 0;
        while (digit < m && ++placement[digit] > n) {
            placement[digit] = 0;
            ++digit;
        }
        if (digit == m) break;
    }

    Eigen::MatrixXd plan = Eigen::MatrixXd::Zero(n + 1, m + 1);
    std::fill(load.begin(), load.end(), 0.0);
    int binned = 0;
    for (int j = 0; j < m; ++j) {
        plan(best[j], j) = 1.0;
        if (best[j] == n) {
            ++binned;
        } else {
            load[best[j]] += 1.0;
        }
    }
    for (int i = 0; i < n; ++i) {
        plan(i, m) = std::max(problem.p(i) - load[i], 0.0);
    }
    plan(n, m) = std::max(dustbin_mass - binned, 0.0);
    return {plan, best_cost};
}

// Dense two-phase primal simplex with Bland's rule; exact (up to fp
// round-off) and provably terminating at this scale.
class SimplexSolver {
  public:
    SimplexSolver(Eigen::MatrixXd a, Eigen::VectorXd b, Eigen::VectorXd c)
        : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)),
          rows_(static_cast<int>(a_.rows())), cols_(static_cast<int>(a_.cols())) {}

    // Returns the primal solution of min c.x s.t. A x = b, x >= 0.
    Eigen::VectorXd run() {
        const int total = cols_ + rows_;  // structural + artificial columns
        tableau_ = Eigen::MatrixXd::Zero(rows_, total + 1);
        tableau_.leftCols(cols_) = a_;
        tableau_.middleCols(cols_, rows_).setIdentity();
        tableau_.col(total) = b_;
        basis_.resize(rows_);
        for (int r = 0; r < rows_; ++r) basis_[r] = cols_ + r;

        // Phase 1: minimize the sum of artificials.
        Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(total);
        phase1.tail(rows_).setOnes();
        if (optimize(phase1) > 1e-7) {
            throw std::logic_error("lp_oracle: balanced problem infeasible");
        }
        expel_artificials();

        // Phase 2 over the structural columns only.
        Eigen::VectorXd phase2 = Eigen::VectorXd::Constant(total, kInf);
        phase2.head(cols_) = c_;
        optimize(phase2);

        Eigen::VectorXd x = Eigen::VectorXd::Zero(cols_);
        for (int r = 0; r < rows_; ++r) {
            if (basis_[r] < cols_) x(basis_[r]) = tableau_(r, total);
        }
        return x;
    }

  private:
    // Bland's rule: entering = lowest-index improving column, leaving =
    // lowest-index basic variable among the ratio-test ties.
    double optimize(const Eigen::VectorXd& cost) {
        const int total = cols_ + rows_;
        while (true) {
            int enter = -1;
            for (int j = 0; j < total; ++j) {
                if (cost(j) == kInf) continue;  // artificial barred in phase 2
                double reduced = cost(j);
                for (int r = 0; r < rows_; ++r) {
                    reduced -= cost(basis_[r]) * tableau_(r, j);
                }
                if (reduced < -1e-9) {
                    enter = j;
                    break;
                }
            }
            if (enter < 0) break;

            int leave = -1;
            double best_ratio = kInf;
            for (int r = 0; r < rows_; ++r) {
                const double coef = tableau_(r, enter);
                if (coef > 1e-9) {
                    const double ratio = tableau_(r, total) / coef;
                    if (ratio < best_ratio - 1e-12 ||
                        (ratio < best_ratio + 1e-12 &&
                         (leave < 0 || basis_[r] < basis_[leave]))) {
                        best_ratio = ratio;
                        leave = r;
                    }
                }
            }
            if (leave < 0) {
                throw std::logic_error("lp_oracle: unbounded transport LP");
            }
            pivot(leave, enter);
        }

        double obj = 0.0;
        for (int r = 0; r < rows_; ++r) {
            if (cost(basis_[r]) != kInf) {
                obj += cost(basis_[r]) * tableau_(r, total);
            }
        }
        return obj;
    }

    void pivot(int row, int col) {
        tableau_.row(row) /= tableau_(row, col);
        for (int r = 0; r < rows_; ++r) {
            if (r != row && std::abs(tableau_(r, col)) > 0.0) {
                tableau_.row(r) -= tableau_(r, col) * tableau_.row(row);
            }
        }
        basis_[row] = col;
    }

    // Drive any degenerate basic artificial out of the basis so phase 2
    // never touches artificial columns.
    void expel_artificials() {
        for (int r = 0; r < rows_; ++r) {
            if (basis_[r] < cols_) continue;
            for (int j = 0; j < cols_; ++j) {
                if (std::abs(tableau_(r, j)) > 1e-9) {
                    pivot(r, j);
                    break;
                }
            }
        }
    }

    Eigen::MatrixXd a_;
    Eigen::VectorXd b_;
    Eigen::VectorXd c_;
    int rows_, cols_;
    Eigen::MatrixXd tableau_;
    std::vector<int> basis_;
};

std::pair<Eigen::MatrixXd, double> simplex_oracle(
    const TransportProblem& problem, const Eigen::MatrixXd& cbar) {
    const int n = static_cast<int>(problem.cost.rows());
    const int m = static_cast<int>(problem.cost.cols());
    const int vars = (n + 1) * (m + 1);

    // Row-sum constraint per extended row, column-sum per extended column;
    // the last column constraint is implied by balance and dropped to keep
    // the system full rank.
    const int cons = (n + 1) + m;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(cons, vars);
    Eigen::VectorXd b(cons);
    Eigen::VectorXd c(vars);

    const auto var = [m](int i, int j) { return i * (m + 1) + j; };
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= m; ++j) {
            a(i, var(i, j)) = 1.0;
            if (j < m) a(n + 1 + j, var(i, j)) = 1.0;
            c(var(i, j)) = cbar(i, j);
        }
        b(i) = i < n ? problem.p(i) : std::max(problem.q.sum() - problem.s, 0.0);
    }
    for (int j = 0; j < m; ++j) b(n + 1 + j) = problem.q(j);

    const Eigen::VectorXd x = SimplexSolver(a, b, c).run();

    Eigen::MatrixXd plan(n + 1, m + 1);
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= m; ++j) {
            plan(i, j) = std::max(x(var(i, j)), 0.0);
        }
    }
    return {plan, (plan.array() * cbar.array()).sum()};
}

}  // namespace

std::pair<Eigen::MatrixXd, double> lp_oracle(const TransportProblem& problem) {
    validate(problem);
    const Eigen::Index n = problem.cost.rows();
    const Eigen::Index m = problem.cost.cols();
    if (n * m > 64) {
        throw std::invalid_argument("lp_oracle: instance too large (N*M > 64)");
    }
    const Eigen::MatrixXd cbar = extend_cost(problem.cost, problem.epsilon);

    bool integral = nearly_integral(problem.s);
    for (Eigen::Index i = 0; integral && i < n; ++i) {
        integral = nearly_integral(problem.p(i));
    }
    for (Eigen::Index j = 0; integral && j < m; ++j) {
        integral = std::abs(problem.q(j) - 1.0) < 1e-9;
    }
    // (n+1)^m placements; stay exhaustive only while that is cheap.
    const double placements = std::pow(static_cast<double>(n) + 1.0,
                                       static_cast<double>(m));
    if (integral && placements <= 2e6) {
        return enumerate_oracle(problem, cbar);
    }
    return simplex_oracle(problem, cbar);
}

}  // namespace mcmot
