#pragma once

#include <Eigen/Dense>

#include "lightcast/errors.hpp"

namespace lightcast {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct RidgeSolution {
    Vector coef;
    bool jitter_applied = false;
};

/// Solves (X'X + diag(penalty)) w = X'y via LDLT. If the normal equations are
/// numerically singular (zero-penalty collinear blocks), retries once with a
/// small ridge jitter, relative to the Gram diagonal, added to the unpenalized
/// diagonal entries.
inline RidgeSolution ridge_solve(const Matrix& X, const Vector& y, const Vector& diag_penalty,
                                 double jitter = 1e-8) {
    if (X.rows() != y.size()) throw ValueError("ridge_solve: X rows and y length differ");
    if (X.cols() != diag_penalty.size()) throw ValueError("ridge_solve: penalty length mismatch");

    Matrix gram = X.transpose() * X;
    gram.diagonal() += diag_penalty;
    const Vector rhs = X.transpose() * y;

    auto try_solve = [&](const Matrix& A, bool check_rank) -> std::pair<Vector, bool> {
        Eigen::LDLT<Matrix> ldlt(A);
        if (ldlt.info() != Eigen::Success) return {Vector(), false};
        if (check_rank) {
            // a vanishing pivot marks a rank-deficient (collinear) design even
            // when the system happens to stay consistent
            const auto d = ldlt.vectorD();
            if (d.minCoeff() <= 1e-12 * std::max(d.maxCoeff(), 1.0)) return {Vector(), false};
        }
        Vector w = ldlt.solve(rhs);
        if (!w.allFinite()) return {Vector(), false};
        const double residual = (A * w - rhs).norm();
        const double scale = rhs.norm() + 1.0;
        return {std::move(w), residual <= 1e-6 * scale};
    };

    auto [w, ok] = try_solve(gram, true);
    if (ok) return {std::move(w), false};

    Matrix jittered = gram;
    const double unit = jitter * std::max(1.0, gram.diagonal().maxCoeff());
    for (Eigen::Index i = 0; i < diag_penalty.size(); ++i)
        if (diag_penalty(i) == 0.0) jittered(i, i) += unit;
    auto [wj, okj] = try_solve(jittered, false);
    if (!okj) throw DataError("ridge_solve: normal equations singular even with jitter");
    return {std::move(wj), true};
}

} // namespace lightcast
