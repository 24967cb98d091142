#pragma once

#include <Eigen/Dense>

namespace gel {

template <typename Scalar>
using DenseMatrixT = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
using DenseVectorT = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using DenseMatrix = DenseMatrixT<double>;
using DenseVector = DenseVectorT<double>;
using Index = Eigen::Index;

template <typename Derived>
bool all_finite(const Eigen::DenseBase<Derived>& m) {
    return m.allFinite();
}

} // namespace gel
