#include "fembem/linalg.hpp"

#include <cassert>
#include <stdexcept>

namespace fembem {

namespace {

void check_square(Eigen::Index rows, Eigen::Index cols) {
    if (rows != cols) throw std::invalid_argument("factorize: matrix not square");
}

#ifndef NDEBUG
void assert_residual(const Vector& ax, const Vector& b, double a_fro, const Vector& x) {
    double res = (ax - b).norm();
    double scale = a_fro * x.norm() + b.norm();
    assert(res <= 1e-10 * scale + 1e-300);
    (void)res;
    (void)scale;
}
#endif

} // namespace

DenseFactorization::DenseFactorization(const DenseMatrix& a) : matrix_(a) {
    check_square(a.rows(), a.cols());
    if (!a.allFinite()) throw std::invalid_argument("factorize: non-finite entries");
    lu_.compute(a);
    double maxabs = a.size() > 0 ? a.cwiseAbs().maxCoeff() : 0.0;
    double minpiv = a.size() > 0 ? lu_.matrixLU().diagonal().cwiseAbs().minCoeff() : 1.0;
    if (a.size() > 0 && minpiv < 1e-14 * maxabs) throw std::runtime_error("singular system");
}

Vector DenseFactorization::solve(const Vector& rhs) const {
    if (rhs.size() != lu_.rows()) throw std::invalid_argument("solve: dimension mismatch");
    Vector x = lu_.solve(rhs);
#ifndef NDEBUG
    assert_residual(matrix_ * x, rhs, matrix_.norm(), x);
#endif
    return x;
}

SparseFactorization::SparseFactorization(const SparseMatrix& a)
    : matrix_(a), n_(static_cast<int>(a.rows())) {
    check_square(a.rows(), a.cols());
    matrix_.makeCompressed();
    lu_.compute(matrix_);
    if (lu_.info() != Eigen::Success) throw std::runtime_error("singular system");
}

Vector SparseFactorization::solve(const Vector& rhs) const {
    if (rhs.size() != n_) throw std::invalid_argument("solve: dimension mismatch");
    Vector x = lu_.solve(rhs);
    if (lu_.info() != Eigen::Success) throw std::runtime_error("singular system");
#ifndef NDEBUG
    assert_residual(matrix_ * x, rhs, matrix_.norm(), x);
#endif
    return x;
}

void BorderedBlockMatrix::multiply(const Vector& x1, const Vector& x2, Vector& y1,
                                   Vector& y2) const {
    y1 = S * x1 + U * x2;
    Vector gathered(w_cols.size());
    for (size_t k = 0; k < w_cols.size(); ++k) gathered[static_cast<Eigen::Index>(k)] = x1[w_cols[k]];
    y2 = D * x2;
    if (!w_cols.empty()) y2 += w_core * gathered;
}

BlockFactorization::BlockFactorization(const BorderedBlockMatrix& a)
    : blocks_(std::make_shared<BorderedBlockMatrix>(a)), s_lu_(a.S) {
    const int m = a.m();
    if (a.U.cols() != m || a.w_core.rows() != m ||
        a.w_core.cols() != static_cast<Eigen::Index>(a.w_cols.size()))
        throw std::invalid_argument("factorize: inconsistent block dimensions");
    // Schur complement D - W S^{-1} U, built one border column at a time
    DenseMatrix schur = a.D;
    Vector col(a.n());
    for (int j = 0; j < m; ++j) {
        col = a.U.col(j);
        Vector x = s_lu_.solve(col);
        Vector gathered(a.w_cols.size());
        for (size_t k = 0; k < a.w_cols.size(); ++k)
            gathered[static_cast<Eigen::Index>(k)] = x[a.w_cols[k]];
        if (!a.w_cols.empty()) schur.col(j) -= a.w_core * gathered;
    }
    if (m > 0) schur_lu_ = std::make_unique<DenseFactorization>(schur);
}

void BlockFactorization::solve(const Vector& b1, const Vector& b2, Vector& x1, Vector& x2) const {
    const auto& a = *blocks_;
    Vector y = s_lu_.solve(b1);
    if (a.m() > 0) {
        Vector gathered(a.w_cols.size());
        for (size_t k = 0; k < a.w_cols.size(); ++k)
            gathered[static_cast<Eigen::Index>(k)] = y[a.w_cols[k]];
        Vector rhs2 = b2;
        if (!a.w_cols.empty()) rhs2 -= a.w_core * gathered;
        x2 = schur_lu_->solve(rhs2);
        x1 = s_lu_.solve(b1 - a.U * x2);
    } else {
        x2.resize(0);
        x1 = y;
    }
#ifndef NDEBUG
    Vector r1, r2;
    a.multiply(x1, x2, r1, r2);
    double scale = (b1.norm() + b2.norm()) + (x1.norm() + x2.norm());
    assert((r1 - b1).norm() + (r2 - b2).norm() <= 1e-8 * scale + 1e-300);
    (void)scale;
#endif
}

} // namespace fembem
