#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace fembem {

using Vector = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

// LU with partial pivoting, reusable for multiple right-hand sides.
// Throws "singular system" when a pivot falls below 1e-14 * max|entry|.
class DenseFactorization {
public:
    explicit DenseFactorization(const DenseMatrix& a);
    Vector solve(const Vector& rhs) const;
    int size() const { return static_cast<int>(lu_.rows()); }

private:
    Eigen::PartialPivLU<DenseMatrix> lu_;
    DenseMatrix matrix_; // kept for the debug residual check
};

class SparseFactorization {
public:
    explicit SparseFactorization(const SparseMatrix& a);
    Vector solve(const Vector& rhs) const;
    int size() const { return n_; }

private:
    Eigen::SparseLU<SparseMatrix> lu_;
    SparseMatrix matrix_;
    int n_ = 0;
};

inline DenseFactorization factorize(const DenseMatrix& a) { return DenseFactorization(a); }
inline SparseFactorization factorize(const SparseMatrix& a) { return SparseFactorization(a); }

inline Vector solve(const DenseFactorization& f, const Vector& rhs) { return f.solve(rhs); }
inline Vector solve(const SparseFactorization& f, const Vector& rhs) { return f.solve(rhs); }

// Square block matrix
//   [ S  U ]
//   [ W  D ]
// with sparse n x n block S, sparse n x m border U, dense m x m block D, and
// a dense m x n border W that is nonzero only on the columns `w_cols`
// (stored as the m x |w_cols| core `w_core`).
struct BorderedBlockMatrix {
    SparseMatrix S;
    SparseMatrix U;
    DenseMatrix w_core;
    std::vector<int> w_cols;
    DenseMatrix D;

    int n() const { return static_cast<int>(S.rows()); }
    int m() const { return static_cast<int>(D.rows()); }
    // action of the full block operator, for tests and residual checks
    void multiply(const Vector& x1, const Vector& x2, Vector& y1, Vector& y2) const;
};

// Direct factorization of the block system: sparse LU of S plus a dense LU of
// the boundary Schur complement D - W S^{-1} U.
class BlockFactorization {
public:
    explicit BlockFactorization(const BorderedBlockMatrix& a);
    // solve [S U; W D] (x1, x2) = (b1, b2)
    void solve(const Vector& b1, const Vector& b2, Vector& x1, Vector& x2) const;

private:
    std::shared_ptr<const BorderedBlockMatrix> blocks_;
    SparseFactorization s_lu_;
    std::unique_ptr<DenseFactorization> schur_lu_;
};

inline BlockFactorization factorize(const BorderedBlockMatrix& a) { return BlockFactorization(a); }

} // namespace fembem
