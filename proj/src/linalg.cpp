#include "mcd/linalg.hpp"

#include <cmath>

namespace mcd {

Matrix symmetrize(const Matrix& m) {
    if (m.rows() != m.cols()) {
        throw ShapeError("symmetrize: matrix must be square");
    }
    return 0.5 * (m + m.transpose());
}

PDSMatrix::PDSMatrix(const Matrix& m) : m_(symmetrize(m)) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(m_, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (!(lo > kPdFloor * std::max(hi, 0.0))) {
        throw DegenerateMatrix("PDSMatrix: smallest eigenvalue " + std::to_string(lo) +
                               " below positive-definiteness floor");
    }
}

ThetaParams::ThetaParams(Vector center, PDSMatrix shape, double radius)
    : m(std::move(center)), G(std::move(shape)), r(radius) {
    if (G.dim() != m.size()) {
        throw ShapeError("ThetaParams: location and shape dimensions disagree");
    }
    if (!(r > 0.0)) {
        throw Error("ThetaParams: coverage radius must be positive");
    }
}

TangentVector::TangentVector(Vector h_, SymMatrix A_, double s_)
    : h(std::move(h_)), A(std::move(A_)), s(s_) {
    if (A.dim() != h.size()) {
        throw ShapeError("TangentVector: vector and matrix dimensions disagree");
    }
}

TangentVector TangentVector::zero(int k) {
    return TangentVector(Vector::Zero(k), SymMatrix::zero(k), 0.0);
}

Vector tangent_to_coords(const TangentVector& t) {
    const int k = t.dim();
    Vector c(tangent_dim(k));
    int pos = 0;
    for (int i = 0; i < k; ++i) c[pos++] = t.h[i];
    for (int i = 0; i < k; ++i)
        for (int j = i; j < k; ++j) c[pos++] = t.A.mat()(i, j);
    c[pos] = t.s;
    return c;
}

TangentVector coords_to_tangent(const Vector& c, int k) {
    if (c.size() != tangent_dim(k)) {
        throw ShapeError("coords_to_tangent: expected dimension " +
                         std::to_string(tangent_dim(k)) + ", got " + std::to_string(c.size()));
    }
    Vector h(k);
    Matrix a = Matrix::Zero(k, k);
    int pos = 0;
    for (int i = 0; i < k; ++i) h[i] = c[pos++];
    for (int i = 0; i < k; ++i)
        for (int j = i; j < k; ++j) {
            a(i, j) = c[pos];
            a(j, i) = c[pos];
            ++pos;
        }
    return TangentVector(std::move(h), SymMatrix(a), c[pos]);
}

PDSMatrix pds_sqrt(const PDSMatrix& c) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(c.mat());
    if (eig.info() != Eigen::Success) {
        throw DegenerateMatrix("pds_sqrt: eigendecomposition failed");
    }
    const Vector roots = eig.eigenvalues().cwiseSqrt();
    Matrix g = eig.eigenvectors() * roots.asDiagonal() * eig.eigenvectors().transpose();
    return PDSMatrix(g);
}

Vector vec(const Matrix& m) {
    if (m.rows() != m.cols()) {
        throw ShapeError("vec: matrix must be square");
    }
    return Eigen::Map<const Vector>(m.data(), m.size());
}

Matrix commutation_matrix(int k) {
    Matrix c = Matrix::Zero(k * k, k * k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) c(i * k + j, j * k + i) = 1.0;
    return c;
}

Matrix kron(const Matrix& m, const Matrix& n) {
    Matrix out(m.rows() * n.rows(), m.cols() * n.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            out.block(i * n.rows(), j * n.cols(), n.rows(), n.cols()) = m(i, j) * n;
    return out;
}

}  // namespace mcd
