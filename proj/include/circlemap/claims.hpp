#ifndef CIRCLEMAP_CLAIMS_HPP
#define CIRCLEMAP_CLAIMS_HPP

#include <vector>

#include "circlemap/jet.hpp"
#include "circlemap/polynomial.hpp"

namespace circlemap {

using RatPoly = Polynomial<Rational>;
using RatJet = Jet<Rational>;

/// Exact-rational cycle of lift germs: jets[k] is the germ at p_k, its image
/// is p_{k+1} plus an integer wrap on the last point.
struct RationalCycle {
    std::vector<RatJet> jets;
    int d = 2;  // lift degree
    int s = 1;

    std::vector<Rational> points() const {
        std::vector<Rational> out;
        for (const auto& j : jets) out.push_back(j.base);
        return out;
    }
};

/// Cycle with local form p_{k+1} + u(1 + u^{2m} P_k(u)) truncated at the given
/// order; optional extra coefficients beyond order 4m exercise the O-freedom.
RationalCycle make_cycle_order4m(const std::vector<Rational>& points, int wrap,
                                 int d, int m, const std::vector<RatPoly>& P,
                                 int order,
                                 const std::vector<std::vector<Rational>>& tails = {});

/// Cycle with local form p_{k+1} + u(1 + u^{2n} P(u) + u^{4n} R_k(u)) at order 6n.
RationalCycle make_cycle_order6n(const std::vector<Rational>& points, int wrap,
                                 int d, int n, const RatPoly& P,
                                 const std::vector<RatPoly>& R);

struct AveragingStep {
    std::vector<RatJet> phi;  // conjugator germ at each p_k
    RationalCycle conjugated; // germ of phi o H o phi^{-1} at each phi(p_k)
    Rational L;               // (d^N - 1)/(d - 1)
    Rational lambda;          // L / N: reciprocal of the conjugator multiplier
};

/// One round of the averaging recursion at jet level, exact in rationals:
/// phi_k = (1/L) sum_{j<N} germ of H^j at p_k.
AveragingStep averaging_step(const RationalCycle& cycle, int N);

struct Claim1Result {
    Rational L, lambda;
    RatPoly formula;               // (lambda^{2m}/s) sum_k P_k(lambda x)
    std::vector<RatPoly> extracted;  // per cycle point
    std::vector<RatPoly> residuals;  // extracted - formula (must all vanish)
    bool exact = false;
    RatPoly printed_formula;       // (L^{2m}/s) sum_k P_k(L x), for comparison
    bool printed_matches = false;  // true only when N = 1
};

/// Averaging conjugacy acting on a multiplier-one cycle in the 4m-form:
/// verifies that the conjugated germs keep the form with a shared polynomial
/// equal to (lambda^{2m}/s) sum_k P_k(lambda x), lambda = L/N -- an exact
/// polynomial identity.  (The same statement with lambda replaced by L fails
/// for N >= 2 by the factor N^{2m}; printed_formula records it.)
Claim1Result verify_claim1(const std::vector<RatPoly>& P, int s, int m, int d,
                           int N, const std::vector<Rational>& points, int wrap,
                           const std::vector<std::vector<Rational>>& tails = {});

struct Claim2Result {
    Rational L, lambda;
    RatPoly P_hat_formula;           // lambda^{2n} P(lambda x)
    std::vector<RatPoly> P_hat;      // extracted per point
    RatPoly R_hat;                   // extracted at the first point
    std::vector<RatPoly> R_cross;    // R_hat_k - R_hat_0 (must all vanish)
    bool exact = false;
};

/// Averaging conjugacy on a cycle in the 6n-form with shared P: verifies the
/// conjugated germs keep the 6n-form with P_hat = lambda^{2n} P(lambda x) and
/// a cycle-point-independent R_hat, exactly.
Claim2Result verify_claim2(const RatPoly& P, const std::vector<RatPoly>& R,
                           int s, int n, int d, int N,
                           const std::vector<Rational>& points, int wrap);

/// Exact truncated identity P(x(1 + x^{2n} P(x))) = P(x) + x^{2n+1} P'(x) P(x)
/// + O(x^{4n}): returns true when the two sides agree through order 4n - 1.
bool verify_pofh_identity(const RatPoly& P, int n);

/// The iterate form from the 6n hypothesis: germ of H^j equals
/// p_{j+k} + F_j(u) + u^{4n} sum_{l<j} R_{l+k}(u) + O(u^{6n}), where
/// F_j(u) = u(1 + u^{2n} j P(u) + u^{4n} (j(j-1)/2)((2n+1)P^2 + u P' P)).
/// Returns the maximal order where the computed iterate differs (or -1).
int verify_iterate_form(const RatPoly& P, const std::vector<RatPoly>& R, int s,
                        int n, int d, int j, const std::vector<Rational>& points,
                        int wrap);

/// Conjugation by germs with uniform linear scale 1/L and telescoping
/// higher blocks reproduces the printed constant: the conjugated cycle has
/// shared polynomial (L^{2m}/s) sum_k P_k(L x) exactly.  Used to pin down the
/// relation between the two normalizations.
Claim1Result verify_claim1_unit_scale(const std::vector<RatPoly>& P, int s, int m,
                                      const Rational& L,
                                      const std::vector<Rational>& points, int wrap,
                                      int d);

} // namespace circlemap

#endif
