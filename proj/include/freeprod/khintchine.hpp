// khintchine.hpp — the compression blocks realizing the embedding of a
// homogeneous degree-d element into the 2d+1 column/row/diagonal summands,
// the E_d norm, the (K_d) sandwich verification, the 2d+1-term product
// reconstruction, certified norm enclosures and projection-bound checks.

#pragma once

#include <optional>
#include <string>

#include "freeprod/fock.hpp"
#include "freeprod/linop.hpp"

namespace freeprod {

// A free element with matrix coefficients in M_s (amplification).
struct AmplifiedElement {
    struct ATerm {
        Matrix coeff;  // s x s
        std::vector<Letter> letters;
    };
    FamilyPtr family;
    int s = 1;
    Matrix scalar;  // s x s
    std::vector<ATerm> terms;

    int degree() const;
    bool homogeneous(int d) const;

    static AmplifiedElement from(const FreeElement& x);
    static AmplifiedElement from(const FreeElement& x, int s,
                                 const std::vector<Matrix>& coeffs,
                                 const Matrix& scalar_coeff);
};

// One compression block, kept as per-term sparse pieces with M_s coefficients.
struct IotaBlock {
    std::vector<std::pair<SpMat, Matrix>> parts;
    std::int64_t rows = 0, cols = 0;
    int s = 1;

    double norm(const NormOptions& opts = {}) const;
    Matrix dense() const;  // for small blocks / tests
};

struct IotaBlocks {
    int d = 0;
    int s = 1;
    std::vector<IotaBlock> plain;               // k = 0..d
    std::vector<std::vector<IotaBlock>> diag;   // [k][j], k = 0..d-1
};

// Compression blocks of a homogeneous degree-d element. Requires fock.L >= d.
IotaBlocks iota(const FockPtr& fock, const AmplifiedElement& x, int d);

// Max of the 2d+1 block norms (d+1 plain, d diagonal families with sup over j).
double ed_norm(const IotaBlocks& blocks, const NormOptions& opts = {});
double ed_norm(const FockPtr& fock, const FreeElement& x, int d);

struct KdReport {
    int d = 0, s = 1, L = 0;
    double ed = 0.0;
    double t_L = 0.0;
    double constant = 0.0;       // 2d+1
    double alt_constant = 0.0;   // (sqrt(N)+1)d+1
    double tol = 0.0;
    double ratio = 0.0;          // t_L / ed
    bool lower_ok = false;       // ed <= t_L + tol
    bool upper_ok = false;       // t_L <= (2d+1) ed + tol
    bool pass() const { return lower_ok && upper_ok; }
    std::string payload;         // filled on failure
};

// Requires L >= d and fock.L >= L + d.
KdReport verify_kd(const FockPtr& fock, const AmplifiedElement& x, int d, int L);

// Largest singular value of the exact rectangle of x on domain F_L.
NormResult truncated_norm(const FockPtr& fock, const AmplifiedElement& x, int L);

struct NormEnclosure {
    double lower = 0.0;
    double upper = 0.0;
    int witness_L = 0;
    Vector lower_witness;
    std::vector<double> band_norms;        // n = -d..d
    std::vector<int> band_restriction;     // stratum bound used per n
    double band_route = 0.0;
    std::vector<double> khintchine_terms;  // (2e+1) * ed_norm(P_e x), e = 0..d
    double khintchine_route = 0.0;
};

// Certified enclosure: lower from the exact window, upper = min(band route,
// Khintchine route). Requires fock.L >= max(L, d) + d.
NormEnclosure enclose_norm(const FockPtr& fock, const FreeElement& x, int L);

// ||H_n(x)|_{H'_p}|| for p = 0..p_max (length-p stratum restriction norms).
std::vector<double> stagnation_profile(const FockPtr& fock, const FreeElement& x,
                                       int n, int p_max);

struct ProjectionReport {
    int d = 0;
    double lower_qd = 0.0, lower_pd = 0.0, upper_x = 0.0;
    double qd_constant = 0.0;  // 2d+1
    double pd_constant = 0.0;  // max(4d,1)
    bool qd_ok = false, pd_ok = false;
    bool pass() const { return qd_ok && pd_ok; }
};

ProjectionReport verify_projection_bounds(const FockPtr& fock, const FreeElement& x,
                                          int d, int L);

// The 2d+1 sandwiched products of one elementary tensor, summed; equals the
// represented element exactly on domain F_L (needs fock.L >= L + d).
SpMat factdec_sum(const FockPtr& fock, const FreeElement& x, int domain_L);

}  // namespace freeprod
