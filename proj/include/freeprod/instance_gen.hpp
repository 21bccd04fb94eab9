// instance_gen.hpp — seeded random instances: centered Gaussian letters with
// bounded operator norm, uniformly sampled alternating index tuples, matrix
// coefficients for amplified runs.

#pragma once

#include <cstdint>
#include <random>

#include "freeprod/free_element.hpp"
#include "freeprod/khintchine.hpp"

namespace freeprod {

struct GeneratorSpec {
    int degree = 1;
    std::uint64_t seed = 0;
    double letter_scale = 1.0;
    int terms_per_degree = 1;
    bool homogeneous = false;  // keep only the top degree
};

using Rng = std::mt19937_64;

// Centered complex Gaussian letter scaled to operator norm letter_scale.
Letter random_letter(const AlgebraWithState& alg, int algebra_index, Rng& rng,
                     double scale);

FreeElement generate_element(const FamilyPtr& family, const GeneratorSpec& spec);

// Independent Gaussian s x s coefficient matrices.
std::vector<Matrix> random_coeffs(int count, int s, Rng& rng);

AmplifiedElement generate_amplified(const FamilyPtr& family, const GeneratorSpec& spec,
                                    int s);

}  // namespace freeprod
