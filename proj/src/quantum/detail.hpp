#pragma once

#include "ctrace/quantum.hpp"

namespace ctrace::detail {

/// Unitary DFT matrix F with F_{kj} = exp(-i k_k x_j) / sqrt(n), rows in FFT order.
Eigen::MatrixXcd dft_matrix(const GridSpec& g);
Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);
/// Hermitian eigen-decomposition; uses the real solver when the matrix is real.
void hermitian_eigen(const Eigen::MatrixXcd& A, Eigen::VectorXd& values, Eigen::MatrixXcd& vectors);

}  // namespace ctrace::detail
