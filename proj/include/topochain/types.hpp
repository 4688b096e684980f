#pragma once

#include <complex>

#include <Eigen/Dense>

namespace topochain {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

// Complex amplitudes over the p*N chain sites (single-excitation subspace).
using StateVector = CVector;

}  // namespace topochain
