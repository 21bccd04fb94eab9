// schur.hpp — completely bounded norms of Schur multipliers on finite index
// sets via semidefinite feasibility (bisection + Dykstra alternating
// projections), with factorization witnesses, and the polarization
// decomposition M_f = M_a - M_b used for weak amenability.

#pragma once

#include <string>

#include "freeprod/linop.hpp"

namespace freeprod {

struct CbFactorization {
    Matrix x;  // h x m, columns are the x_s
    Matrix y;  // h x m, columns are the y_t
    double value = 0.0;  // max_s ||x_s|| * max_t ||y_t||

    // max entrywise deviation of <x_s, y_t> from a given symbol
    double reconstruction_error(const Matrix& a) const;
};

struct CbResult {
    double value = 0.0;
    double lo = 0.0, hi = 0.0;
    CbFactorization fact;
    bool converged = true;
    int dykstra_iters = 0;
    std::string certificate;  // "exact-bracket" or "sdp-bracketed"
};

// Certified two-sided bracket for ||M_a||_cb with |value - truth| <= tol.
CbResult cb_norm(const Matrix& a, double tol = 1e-6);

struct PolarizeResult {
    Matrix a;  // Gram((x+y)/2), PSD
    Matrix b;  // Gram((x-y)/2), PSD
    Eigen::VectorXd diag_correction;  // d_s >= 0 with a_ss + d_s = 1 + eps
    double eps = 0.0;
    double max_half_diff_sq = 0.0;  // max_s ||(x_s - y_s)/2||^2
};

// Requires ||x_s||, ||y_s|| <= sqrt(1+eps) and <x_s, y_s> = 1 (unit diagonal
// of a real symmetric symbol).
PolarizeResult polarize(const Matrix& x, const Matrix& y, double eps);

}  // namespace freeprod
