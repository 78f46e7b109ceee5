#pragma once

#include <Eigen/Dense>

#include "mcd/errors.hpp"

namespace mcd {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Relative positive-definiteness floor: eigenvalues below
/// tau_pd * lambda_max are treated as zero.
inline constexpr double kPdFloor = 1e-10;

/// (M + M')/2, throws ShapeError on non-square input.
Matrix symmetrize(const Matrix& m);

/// Symmetric k x k matrix; symmetrized on construction.
class SymMatrix {
public:
    SymMatrix() = default;
    explicit SymMatrix(const Matrix& m) : m_(symmetrize(m)) {}
    static SymMatrix zero(int k) { return SymMatrix(Matrix::Zero(k, k)); }

    int dim() const { return static_cast<int>(m_.rows()); }
    const Matrix& mat() const { return m_; }

private:
    Matrix m_;
};

/// Positive definite symmetric matrix. Construction checks the smallest
/// eigenvalue against kPdFloor * largest and throws DegenerateMatrix.
class PDSMatrix {
public:
    PDSMatrix() = default;
    explicit PDSMatrix(const Matrix& m);
    static PDSMatrix identity(int k) { return PDSMatrix(Matrix::Identity(k, k)); }

    int dim() const { return static_cast<int>(m_.rows()); }
    const Matrix& mat() const { return m_; }

private:
    Matrix m_;
};

/// Ellipsoid parameters theta = (m, G, r): center, PDS shape matrix
/// (square root of the scatter), coverage radius.
struct ThetaParams {
    Vector m;
    PDSMatrix G;
    double r = 0.0;

    ThetaParams() = default;
    ThetaParams(Vector center, PDSMatrix shape, double radius);
    int dim() const { return static_cast<int>(m.size()); }
};

/// Direction (h, A, s) in R^k x S(k) x R.
struct TangentVector {
    Vector h;
    SymMatrix A;
    double s = 0.0;

    TangentVector() = default;
    TangentVector(Vector h_, SymMatrix A_, double s_);
    static TangentVector zero(int k);
    int dim() const { return static_cast<int>(h.size()); }
};

/// Dimension of the tangent space: k + k(k+1)/2 + 1.
inline int tangent_dim(int k) { return k + k * (k + 1) / 2 + 1; }

/// Flatten to canonical coordinates (h_1..h_k, A upper triangle row-wise, s).
Vector tangent_to_coords(const TangentVector& t);

/// Inverse of tangent_to_coords; throws ShapeError if sizes disagree.
TangentVector coords_to_tangent(const Vector& c, int k);

/// Unique symmetric PDS square root via eigendecomposition.
PDSMatrix pds_sqrt(const PDSMatrix& c);

/// Column-major stacking of a square matrix.
Vector vec(const Matrix& m);

/// Commutation matrix: C_{k,k} vec(A) = vec(A') for every k x k matrix A.
Matrix commutation_matrix(int k);

/// Kronecker product; block (i,j) of the result is m(i,j) * N.
Matrix kron(const Matrix& m, const Matrix& n);

}  // namespace mcd
