#pragma once

#include <Eigen/Dense>

#include "icestring/phase.hpp"

namespace icestr {

struct EigenSystem {
    Eigen::VectorXd values;   // ascending
    Eigen::MatrixXcd vectors; // columns, empty when not requested
};

// Dense Hermitian eigensolver: Householder reduction to real tridiagonal
// form followed by implicit-shift QL. Off-diagonals are deflated once
// |e_i| <= rel_tol * (|d_i| + |d_{i+1}|).
EigenSystem eigh(const Eigen::MatrixXcd& A, bool want_vectors = true, double rel_tol = 1e-13);

// max |A_ij - conj(A_ji)|
double hermitian_defect(const Eigen::MatrixXcd& A);

// pivoted LU
cplx determinant(const Eigen::MatrixXcd& A);
// determinant after dividing each row by its largest modulus; 0 if a row vanishes
cplx normalized_determinant(const Eigen::MatrixXcd& A);

// k right singular vectors of the smallest singular values (columns);
// sigma receives all singular values in ascending order when given
Eigen::MatrixXcd smallest_right_singular(const Eigen::MatrixXcd& M, int k, Eigen::VectorXd* sigma = nullptr);

}  // namespace icestr
