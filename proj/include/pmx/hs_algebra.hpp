// Copyright 2026 The pmx Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "pmx/operator_core.hpp"

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace pmx {

/// Generalized Gell-Mann basis of d x d Hermitian matrices.
///
/// elements[0] = sqrt(2/d) * identity; the rest are traceless. Order:
/// symmetric pairs (j<k, lexicographic), antisymmetric pairs, diagonals.
/// Tr(elements[a] * elements[b]) = 2 delta_ab.
struct SuBasis {
    std::size_t d = 1;
    std::vector<ComplexMatrix> elements;
};

SuBasis build_su_basis(std::size_t d);

/// f and dsym over indices 0..d^2-1, zero whenever any index is 0.
struct StructureTensors {
    std::size_t n = 0;  // d^2
    std::vector<double> f;
    std::vector<double> dsym;

    double f_at(std::size_t a, std::size_t b, std::size_t c) const {
        return f[(a * n + b) * n + c];
    }
    double d_at(std::size_t a, std::size_t b, std::size_t c) const {
        return dsym[(a * n + b) * n + c];
    }
};

StructureTensors structure_constants(const SuBasis &basis);

/// Tr(s_a s_b s_c) for all basis indices, flattened as (a * n + b) * n + c.
std::vector<Complex> triple_traces(const SuBasis &basis);

/// One basis index per factor.
using TermPattern = std::vector<std::size_t>;
/// Sparse coefficients (|c| > 1e-12) keyed by pattern.
using TermCoefficients = std::map<TermPattern, double>;

/// Number of product-basis terms, prod d_k^2.
std::size_t term_count(std::span<const std::size_t> dims);
/// Linear index p = sum_k t_k * prod_{l>k} d_l^2.
std::size_t term_index(const TermPattern &t, std::span<const std::size_t> dims);
TermPattern term_pattern(std::size_t index, std::span<const std::size_t> dims);
/// Bit k set iff t_k != 0.
unsigned long term_mask(const TermPattern &t);
/// Compact name such as "0zz0" for qubit factors; other dims use
/// bracketed indices.
std::string term_name(const TermPattern &t, std::span<const std::size_t> dims);

/// sigma_{t_1} (x) ... (x) sigma_{t_n}.
ComplexMatrix term_operator(const TermPattern &t, std::span<const std::size_t> dims);

TermCoefficients hs_decompose(const ComplexMatrix &m, const SpaceLayout &layout);
ComplexMatrix hs_recompose(const TermCoefficients &coeffs, const SpaceLayout &layout);

/// Dense coefficient vector c_t = Tr(sigma_t m)/2^n indexed by term_index.
HermOpVector to_hs_vector(const ComplexMatrix &m, std::span<const std::size_t> dims);
ComplexMatrix from_hs_vector(const HermOpVector &v, std::span<const std::size_t> dims);

/// Multiplies each product-basis coefficient of m by weights[term_mask(t)].
/// `weights` must hold 2^(factor count) entries. Works for any square m
/// (coefficients are complex in general).
ComplexMatrix scale_terms(const ComplexMatrix &m, std::span<const std::size_t> dims, std::span<const double> weights);

}  // namespace pmx
