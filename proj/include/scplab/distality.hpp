// Distality and ergodicity of integer toral automorphisms.
#pragma once

#include "scplab/groups.hpp"
#include "scplab/spectral_linalg.hpp"

#include <optional>

namespace scplab::linalg {

struct DistalityVerdict {
    bool distal = false;
    /// Part of the characteristic polynomial with no root-of-unity roots (1 when distal).
    RatPolynomial non_cyclotomic_factor;
    /// Root whose certified modulus interval avoids 1; present exactly when not distal.
    std::optional<RootEnclosure> witness;
};

inline DistalityVerdict distality_verdict(const groups::IntAutomorphism& a) {
    DistalityVerdict v;
    v.distal = kronecker_all_roots_unit_modulus(a.char_poly());
    v.non_cyclotomic_factor = split_cyclotomic(to_rational(a.char_poly())).second;
    if (!v.distal) {
        v.witness = off_circle_witness(isolate_roots(v.non_cyclotomic_factor));
        if (!v.witness) throw Indeterminate("non-distal automorphism without a certified off-circle root");
    }
    return v;
}

inline bool ergodicity_verdict(const groups::IntAutomorphism& a) { return !has_root_of_unity_factor(a.char_poly()); }

}  // namespace scplab::linalg
