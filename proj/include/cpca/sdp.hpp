#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cpca/chebfit.hpp"
#include "cpca/errors.hpp"

namespace cpca {

enum class SdpStatus { Optimal, MaxIters, NumericalFailure };

/// Equality-constrained block SDP for minimizing a degree-m Chebyshev series
/// g(u) = sum_j c_j T_j(u) on [-1, 1]:
///
///   max t   s.t.  <A_j, Q> + <B_j, Q'> + [j == 0] t = c_j  (j = 0..m),
///                 Q PSD of order d1+1, Q' PSD of order d2+1,
///
/// where d1 = floor(m/2), d2 = floor((m-1)/2). The blocks are the Gram
/// matrices of the Markov-Lukacs weighted-square decomposition of g - t:
/// (1+u) h1^2 + (1-u) h2^2 for odd m, h1^2 + (1-u^2) h2^2 for even m.
struct SdpProblem {
    int m = 0;
    int n1 = 0;
    int n2 = 0;
    std::vector<Eigen::MatrixXd> A;
    std::vector<Eigen::MatrixXd> B;
    Eigen::VectorXd rhs;

    void dump(std::ostream& os) const {
        os << "degree " << m << ", blocks " << n1 << " " << n2 << "\n";
        for (int j = 0; j <= m; ++j) {
            os << "constraint " << j << ": rhs = " << rhs[j] << ", t_coeff = " << (j == 0 ? 1 : 0) << "\n";
            os << "A:\n" << A[static_cast<std::size_t>(j)] << "\nB:\n" << B[static_cast<std::size_t>(j)] << "\n";
        }
    }
};

struct SdpSolution {
    double t_lower = std::numeric_limits<double>::quiet_NaN();
    double t_upper = std::numeric_limits<double>::quiet_NaN();
    double gap = std::numeric_limits<double>::quiet_NaN();
    SdpStatus status = SdpStatus::NumericalFailure;
    Eigen::MatrixXd Q;
    Eigen::MatrixXd Qp;
    int iterations = 0;
    double condition_estimate = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::pair<double, double>> bound_history;  // (t_lower, t_upper) per iteration
};

/// Assembles the reformulation by symbolic expansion of every basis product:
/// T_u T_v = (T_{u+v} + T_{|u-v|}) / 2, applied again for the weight factors
/// T_1 (odd m) and T_2 (even m). Each ordered pair (u, v) deposits its share
/// into the coefficient matrix of the constraint row it lands in, which keeps
/// the multiplicity bookkeeping exact for pairs hitting several rows.
inline SdpProblem build_reformulation(const std::vector<double>& coeffs) {
    const int m = static_cast<int>(coeffs.size()) - 1;
    if (m < 1) throw std::invalid_argument("build_reformulation: needs degree >= 1");
    SdpProblem prob;
    prob.m = m;
    const int d1 = m / 2;
    const int d2 = (m - 1) / 2;
    prob.n1 = d1 + 1;
    prob.n2 = d2 + 1;
    prob.A.assign(static_cast<std::size_t>(m) + 1, Eigen::MatrixXd::Zero(prob.n1, prob.n1));
    prob.B.assign(static_cast<std::size_t>(m) + 1, Eigen::MatrixXd::Zero(prob.n2, prob.n2));
    prob.rhs = Eigen::Map<const Eigen::VectorXd>(coeffs.data(), m + 1);

    const auto deposit = [&](std::vector<Eigen::MatrixXd>& mats, int u, int v, int row, double val) {
        mats[static_cast<std::size_t>(row)](u, v) += val;
    };

    if (m % 2 == 1) {
        // (1 + T_1) * v1' Q v1  and  (1 - T_1) * v2' Q' v2
        for (int u = 0; u <= d1; ++u) {
            for (int v = 0; v <= d1; ++v) {
                const int w[2] = {u + v, std::abs(u - v)};
                for (int wi : w) {
                    deposit(prob.A, u, v, wi, 0.5);
                    deposit(prob.A, u, v, wi + 1, 0.25);
                    deposit(prob.A, u, v, std::abs(wi - 1), 0.25);
                }
            }
        }
        for (int u = 0; u <= d2; ++u) {
            for (int v = 0; v <= d2; ++v) {
                const int w[2] = {u + v, std::abs(u - v)};
                for (int wi : w) {
                    deposit(prob.B, u, v, wi, 0.5);
                    deposit(prob.B, u, v, wi + 1, -0.25);
                    deposit(prob.B, u, v, std::abs(wi - 1), -0.25);
                }
            }
        }
    } else {
        // v1' Q v1  and  (1 - T_2)/2 * v2' Q' v2
        for (int u = 0; u <= d1; ++u) {
            for (int v = 0; v <= d1; ++v) {
                deposit(prob.A, u, v, u + v, 0.5);
                deposit(prob.A, u, v, std::abs(u - v), 0.5);
            }
        }
        for (int u = 0; u <= d2; ++u) {
            for (int v = 0; v <= d2; ++v) {
                const int w[2] = {u + v, std::abs(u - v)};
                for (int wi : w) {
                    deposit(prob.B, u, v, wi, 0.25);
                    deposit(prob.B, u, v, wi + 2, -0.125);
                    deposit(prob.B, u, v, std::abs(wi - 2), -0.125);
                }
            }
        }
    }
    return prob;
}

namespace detail {

// Largest step alpha with X + alpha*dX staying PSD, via the smallest
// eigenvalue of L^-1 dX L^-T where X = L L'. Returns +inf if unconstrained.
inline double max_psd_step(const Eigen::MatrixXd& x, const Eigen::MatrixXd& dx) {
    Eigen::LLT<Eigen::MatrixXd> llt(x);
    if (llt.info() != Eigen::Success) return 0.0;
    const Eigen::MatrixXd l = llt.matrixL();
    Eigen::MatrixXd w = l.triangularView<Eigen::Lower>().solve(dx);
    w = l.triangularView<Eigen::Lower>().solve(w.transpose().eval());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (w + w.transpose()),
                                                      Eigen::EigenvaluesOnly);
    const double lambda_min = es.eigenvalues().minCoeff();
    if (lambda_min >= -1e-14) return std::numeric_limits<double>::infinity();
    return -1.0 / lambda_min;
}

struct IpmBlock {
    const std::vector<Eigen::MatrixXd>* mats = nullptr;
    Eigen::MatrixXd X, S, Sinv;
    Eigen::MatrixXd Rd;        // sum_j y_j A_j - S
    Eigen::MatrixXd dX, dS;    // current direction
    std::vector<Eigen::MatrixXd> T;  // X * A_k * Sinv, reused across the two solves
};

}  // namespace detail

/// Dense primal-dual interior-point solve of the block reformulation, to
/// duality gap eps3. Mehrotra predictor-corrector with the HKM scaling; the
/// free variable t is carried in the Newton system directly. The dual start
/// y = e_0 is strictly feasible (the row-0 blocks are the moment matrices of
/// the Chebyshev measure), so the reported upper bound is a certified bound
/// on the optimum throughout.
inline SdpSolution solve_sdp(const SdpProblem& prob, double eps3, int max_iters = 100) {
    if (!(eps3 > 0.0)) throw std::invalid_argument("solve_sdp: eps3 must be positive");
    const int m = prob.m;
    const int ncon = m + 1;
    const double n_total = prob.n1 + prob.n2;

    SdpSolution sol;
    sol.Q = Eigen::MatrixXd::Identity(prob.n1, prob.n1);
    sol.Qp = Eigen::MatrixXd::Identity(prob.n2, prob.n2);

    detail::IpmBlock blocks[2];
    blocks[0].mats = &prob.A;
    blocks[1].mats = &prob.B;
    blocks[0].X = sol.Q;
    blocks[1].X = sol.Qp;
    blocks[0].S = prob.A[0];
    blocks[1].S = prob.B[0];

    Eigen::VectorXd y = Eigen::VectorXd::Zero(ncon);
    y[0] = 1.0;

    // primal start for t: sampled minimum of the series minus one
    double t_var = std::numeric_limits<double>::infinity();
    {
        ChebProxy g(Interval(-1.0, 1.0), std::vector<double>(prob.rhs.data(), prob.rhs.data() + ncon));
        const std::vector<double> pts = cheb_points(32, g.interval);
        for (double x : pts) t_var = std::min(t_var, eval_clenshaw(g, x));
        t_var -= 1.0;
    }

    double data_norm = 0.0;
    for (int j = 0; j < ncon; ++j) {
        data_norm = std::max(data_norm, prob.A[static_cast<std::size_t>(j)].cwiseAbs().maxCoeff());
        data_norm = std::max(data_norm, prob.B[static_cast<std::size_t>(j)].cwiseAbs().maxCoeff());
    }
    const double rhs_l1 = 1.0 + prob.rhs.lpNorm<1>();
    const double step_frac = 0.98;

    const auto finish = [&](SdpStatus status, double lower, double upper) {
        sol.status = status;
        sol.t_lower = lower;
        sol.t_upper = upper;
        sol.gap = upper - lower;
        sol.Q = blocks[0].X;
        sol.Qp = blocks[1].X;
        return sol;
    };

    double lb = -std::numeric_limits<double>::infinity();
    double ub = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < max_iters; ++iter) {
        // residuals
        Eigen::VectorXd rp = prob.rhs;
        for (int j = 0; j < ncon; ++j) {
            rp[j] -= (prob.A[static_cast<std::size_t>(j)].cwiseProduct(blocks[0].X)).sum();
            rp[j] -= (prob.B[static_cast<std::size_t>(j)].cwiseProduct(blocks[1].X)).sum();
        }
        rp[0] -= t_var;
        const double r_e = 1.0 - y[0];

        double dual_res = 0.0;
        double comp = 0.0;
        double rd_dot_x = 0.0;
        for (auto& blk : blocks) {
            blk.Rd.setZero(blk.S.rows(), blk.S.cols());
            for (int j = 0; j < ncon; ++j) blk.Rd += y[j] * (*blk.mats)[static_cast<std::size_t>(j)];
            blk.Rd -= blk.S;
            dual_res = std::max(dual_res, blk.Rd.lpNorm<Eigen::Infinity>());
            comp += (blk.X.cwiseProduct(blk.S)).sum();
            rd_dot_x += std::abs((blk.Rd.cwiseProduct(blk.X)).sum());
        }
        const double mu = comp / n_total;

        // Certified bounds. The dual iterate stays feasible up to round-off,
        // so c'y is an upper bound on the optimum; the primal objective is
        // discounted by the first-order cost of its residual violation. The
        // recorded pair then satisfies ub - lb >= <X,S> >= 0 at every iterate.
        const double correction = std::abs(y.dot(rp)) + rd_dot_x + std::abs(r_e * t_var);
        ub = prob.rhs.dot(y);
        lb = t_var - correction;
        sol.bound_history.emplace_back(lb, ub);
        sol.iterations = iter;

        const bool dual_ok = dual_res <= 1e-9 * (1.0 + data_norm);
        const bool reconstruct_ok = rp.lpNorm<1>() <= 5e-7 * rhs_l1;
        if (dual_ok && reconstruct_ok && ub - lb <= eps3) return finish(SdpStatus::Optimal, lb, ub);

        // Schur complement M_jk = sum_blocks tr(A_j X A_k S^-1)
        for (auto& blk : blocks) {
            Eigen::LLT<Eigen::MatrixXd> llt(blk.S);
            if (llt.info() != Eigen::Success) return finish(SdpStatus::NumericalFailure, lb, ub);
            blk.Sinv = llt.solve(Eigen::MatrixXd::Identity(blk.S.rows(), blk.S.cols()));
            blk.T.resize(static_cast<std::size_t>(ncon));
            for (int k = 0; k < ncon; ++k)
                blk.T[static_cast<std::size_t>(k)] = blk.X * (*blk.mats)[static_cast<std::size_t>(k)] * blk.Sinv;
        }
        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(ncon, ncon);
        for (int j = 0; j < ncon; ++j) {
            for (int k = 0; k < ncon; ++k) {
                double acc = 0.0;
                for (auto& blk : blocks)
                    acc += ((*blk.mats)[static_cast<std::size_t>(j)]
                                .cwiseProduct(blk.T[static_cast<std::size_t>(k)].transpose()))
                               .sum();
                M(j, k) = acc;
            }
        }
        M = 0.5 * (M + M.transpose()).eval();

        // eliminate dy_0 (pinned by the normalization row) and factor once
        Eigen::MatrixXd Mrr = M.bottomRightCorner(m, m);
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(Mrr);
        sol.condition_estimate = lu.rcond();
        if (!(sol.condition_estimate > 1e-15)) return finish(SdpStatus::NumericalFailure, lb, ub);

        // solves the Newton system for a given complementarity target per block
        const auto solve_direction = [&](const Eigen::MatrixXd& rc1, const Eigen::MatrixXd& rc2) {
            const Eigen::MatrixXd* rc[2] = {&rc1, &rc2};
            Eigen::VectorXd h = Eigen::VectorXd::Zero(ncon);
            for (int b = 0; b < 2; ++b) {
                auto& blk = blocks[b];
                const Eigen::MatrixXd G = (*rc[b] - blk.X * blk.Rd) * blk.Sinv;
                for (int j = 0; j < ncon; ++j)
                    h[j] += ((*blk.mats)[static_cast<std::size_t>(j)].cwiseProduct(G.transpose())).sum();
            }
            Eigen::VectorXd dy(ncon);
            dy[0] = r_e;
            const Eigen::VectorXd rhs_r =
                (h - rp).tail(m) - M.block(1, 0, m, 1) * r_e;
            dy.tail(m) = lu.solve(rhs_r);
            const double dt = M.row(0).dot(dy) - h[0] + rp[0];
            for (int b = 0; b < 2; ++b) {
                auto& blk = blocks[b];
                blk.dS = blk.Rd;
                for (int j = 0; j < ncon; ++j) blk.dS += dy[j] * (*blk.mats)[static_cast<std::size_t>(j)];
                Eigen::MatrixXd dx = (*rc[b] - blk.X * blk.dS) * blk.Sinv;
                blk.dX = 0.5 * (dx + dx.transpose());
            }
            return std::make_pair(dy, dt);
        };

        // predictor (affine scaling)
        auto [dy_aff, dt_aff] = solve_direction(-blocks[0].X * blocks[0].S, -blocks[1].X * blocks[1].S);
        Eigen::MatrixXd dX_aff[2], dS_aff[2];
        double ap_aff = 1.0, ad_aff = 1.0;
        for (int b = 0; b < 2; ++b) {
            dX_aff[b] = blocks[b].dX;
            dS_aff[b] = blocks[b].dS;
            ap_aff = std::min(ap_aff, step_frac * detail::max_psd_step(blocks[b].X, blocks[b].dX));
            ad_aff = std::min(ad_aff, step_frac * detail::max_psd_step(blocks[b].S, blocks[b].dS));
        }
        double mu_aff = 0.0;
        for (int b = 0; b < 2; ++b)
            mu_aff += ((blocks[b].X + ap_aff * dX_aff[b]).cwiseProduct(blocks[b].S + ad_aff * dS_aff[b])).sum();
        mu_aff /= n_total;
        const double sigma = std::clamp(std::pow(std::max(mu_aff, 0.0) / mu, 3.0), 0.0, 1.0);

        // corrector
        const Eigen::MatrixXd rc1 = sigma * mu * Eigen::MatrixXd::Identity(prob.n1, prob.n1) -
                                    blocks[0].X * blocks[0].S - dX_aff[0] * dS_aff[0];
        const Eigen::MatrixXd rc2 = sigma * mu * Eigen::MatrixXd::Identity(prob.n2, prob.n2) -
                                    blocks[1].X * blocks[1].S - dX_aff[1] * dS_aff[1];
        auto [dy, dt] = solve_direction(rc1, rc2);
        if (!dy.allFinite() || !std::isfinite(dt)) return finish(SdpStatus::NumericalFailure, lb, ub);

        double ap = 1.0, ad = 1.0;
        for (auto& blk : blocks) {
            ap = std::min(ap, step_frac * detail::max_psd_step(blk.X, blk.dX));
            ad = std::min(ad, step_frac * detail::max_psd_step(blk.S, blk.dS));
        }
        if (ap < 1e-12 && ad < 1e-12) return finish(SdpStatus::NumericalFailure, lb, ub);

        for (auto& blk : blocks) {
            blk.X += ap * blk.dX;
            blk.S += ad * blk.dS;
            blk.X = 0.5 * (blk.X + blk.X.transpose()).eval();
            blk.S = 0.5 * (blk.S + blk.S.transpose()).eval();
        }
        t_var += ap * dt;
        y += ad * dy;
    }

    return finish(SdpStatus::MaxIters, lb, ub);
}

/// Minimum of a proxy on its interval via the SDP route, to one-sided error
/// eps3: the returned value lies in [p*, p* + eps3]. Degrees 0 and 1 are
/// resolved in closed form; the interval translation is coefficient-free
/// because the series is already expressed in the mapped argument.
inline double minimize_by_sdp(const ChebProxy& p, double eps3, int max_iters = 100) {
    const int m = p.degree();
    if (m == 0) return p.coeffs[0];
    if (m == 1) return p.coeffs[0] - std::abs(p.coeffs[1]);
    const SdpProblem prob = build_reformulation(p.coeffs);
    const SdpSolution sol = solve_sdp(prob, eps3, max_iters);
    if (sol.status != SdpStatus::Optimal) {
        throw SolverFailure(std::string("minimize_by_sdp: ") +
                                (sol.status == SdpStatus::MaxIters ? "iteration cap reached"
                                                                   : "numerical failure") +
                                " (gap " + std::to_string(sol.gap) + ")",
                            sol.condition_estimate);
    }
    return sol.t_upper;
}

}  // namespace cpca
