#pragma once

#include <vector>

#include "worm/types.hpp"
#include "worm/weight.hpp"

namespace worm::poles {

enum class PoleSource { CosineFactor, AnnulusFactor };

struct Pole {
    cplx location;
    PoleSource source;
    int multiplicity = 1;
    double residual_abs = 0.0;  // |G| at the reported location (numeric sets only)
};

struct PoleSet {
    std::vector<Pole> poles;
    Rect search_region;
};

/// Zeros of G(zeta) = F(W_{Jk})(-2 i zeta) inside the region, from the closed
/// lists: cosine-factor zeros on the imaginary axis (integer or half-integer
/// heights outside the cancelled band) and annulus-factor zeros
/// m pi i/(2 alpha ln beta) + (k+1)/(2 alpha), m != 0. Coincidences are merged
/// with multiplicity 2.
PoleSet poles_predicted(const ModeIndex& mode, const WormParams& p, const Rect& region);

/// Argument-principle count of zeros of G inside the rectangle (the contour
/// is padded slightly; it must stay clear of zeros).
int argument_principle_count(const weight::WeightSpec& spec, const Rect& region,
                             int total_nodes = 4096, double pad = 1e-3);

/// Newton-refined zeros seeded from the predictions, cross-checked against the
/// argument-principle count. Throws numeric_error on a count mismatch.
PoleSet poles_numeric(const ModeIndex& mode, const WormParams& p, const Rect& region, double tol);

struct ResidueTerm {
    int ell;        // >= 0
    cplx coeff;     // C_ell
    double exponent;  // ell + n/2
};

struct WindingTerm {
    cplx coeff;     // C
    cplx exponent;  // nu - i mu for k = -2 (nu + i (k+1)/(2 alpha) in general)
};

struct ResidueExpansion {
    std::vector<ResidueTerm> discrete_terms;
    WindingTerm winding_term;
    double remainder_order = 0.0;  // nu + eps
    double depth = 0.0;            // contour depth used (= nu + eps)
    ModeIndex mode;
    WormParams params;
};

/// Residue expansion of the strip kernel across the band
/// -(nu + eps) <= Im zeta < 0. Simple zeros only; double poles are detected
/// and refused. depth_epsilon <= 0 selects the default
/// min(0.1, half the gap to the next pole below depth nu).
ResidueExpansion residue_series(const ModeIndex& mode, const WormParams& p, double depth_epsilon);

struct DoublePoleHit {
    cplx location;
    int m_cos;  // cosine index (height in units of i or i/2 grid)
    int m_ann;  // annulus index
};

/// All coincidences between cosine-factor and annulus-factor zeros in the
/// band |Im zeta| <= 2 (nu + n). Empty for k = -2 with generic parameters.
std::vector<DoublePoleHit> double_pole_detect(const ModeIndex& mode, const WormParams& p);

/// Depth of the shallowest pole strictly below the winding depth nu; the
/// residue remainder decays at this rate once the winding term is removed.
double next_pole_depth(const ModeIndex& mode, const WormParams& p);

}  // namespace worm::poles
