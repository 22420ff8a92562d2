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

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pmx {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

using FactorIndex = std::size_t;
using FactorSet = std::vector<FactorIndex>;

/// Raised when a requested computation exceeds the desk-scale size limits.
class SizeError : public std::length_error {
   public:
    using std::length_error::length_error;
};

/// Global absolute tolerance. Defaults to 1e-9; the PMX_TOL environment
/// variable (a decimal number) overrides it for the whole process.
double tolerance();

enum class Role { input, output };

struct Factor {
    std::string label;
    std::size_t dim = 1;

    bool operator==(const Factor &) const = default;
};

struct Party {
    std::string name;
    FactorSet inputs;
    FactorSet outputs;

    bool operator==(const Party &) const = default;
};

/// Ordered tensor factors grouped into parties with input/output roles.
///
/// Every factor belongs to exactly one (party, role) slot. The factor order
/// is the order of the Kronecker product; nothing is reordered implicitly.
/// A party may have no output factors (its output space is trivial).
class SpaceLayout {
   public:
    SpaceLayout() = default;
    SpaceLayout(std::vector<Factor> factors, std::vector<Party> parties);

    const std::vector<Factor> &factors() const {
        return factors_;
    }
    const std::vector<Party> &parties() const {
        return parties_;
    }
    std::size_t factor_count() const {
        return factors_.size();
    }
    std::size_t dim(FactorIndex f) const;
    std::vector<std::size_t> dims() const;
    std::size_t total_dim() const;
    /// Product of the dimensions of every output factor (1 if there are none).
    std::size_t output_dim() const;

    std::size_t party_index(std::string_view name) const;
    const Party &party(std::string_view name) const;
    std::size_t party_of(FactorIndex f) const;
    Role role_of(FactorIndex f) const;
    std::size_t find_factor(std::string_view label) const;

    FactorSet output_factors() const;
    FactorSet input_factors() const;
    /// Inputs then outputs of one party, in declaration order.
    FactorSet party_factors(std::string_view name) const;

    /// Drops every factor of `name`, keeping the remaining factors in order.
    SpaceLayout without_party(std::string_view name) const;

    bool operator==(const SpaceLayout &) const = default;

    /// Factors A_I, B_I, A_O, B_O.
    static SpaceLayout bipartite(std::size_t a_in = 2, std::size_t b_in = 2, std::size_t a_out = 2,
                                 std::size_t b_out = 2);
    /// Factors X_I, X_O for a single party.
    static SpaceLayout single_party(std::size_t in = 2, std::size_t out = 2, std::string name = "A");
    /// Factors A_I, B_I, A_O, B_O, C_T, C_C; party C has no output.
    static SpaceLayout switch_layout(std::size_t d = 2);
    /// Factors A_I, B_I, D_I, A_O, B_O, D_O, C_T, C_C.
    static SpaceLayout extended_switch_layout(std::size_t d = 2);

   private:
    std::vector<Factor> factors_;
    std::vector<Party> parties_;
};

std::string to_string(const SpaceLayout &layout);

/// Offsets that split a composite index into a chosen subset of factors and
/// the complement. `sub[s] + rest[r]` is the composite index whose subset
/// digits (ordered as listed) encode `s` and whose remaining digits (in the
/// original order) encode `r`.
struct FactorSplit {
    FactorSplit(std::span<const std::size_t> dims, std::span<const FactorIndex> subset);

    std::vector<std::size_t> sub;
    std::vector<std::size_t> rest;
};

ComplexMatrix tensor(std::span<const ComplexMatrix> blocks);
ComplexMatrix tensor(std::initializer_list<ComplexMatrix> blocks);
ComplexVector tensor_vectors(std::span<const ComplexVector> parts);
ComplexVector tensor_vectors(std::initializer_list<ComplexVector> parts);

ComplexMatrix partial_trace(const ComplexMatrix &m, std::span<const std::size_t> dims,
                            std::span<const FactorIndex> factors);
ComplexMatrix partial_trace(const ComplexMatrix &m, const SpaceLayout &layout, std::span<const FactorIndex> factors);

/// Transpose in the computational basis on the listed factors only.
ComplexMatrix partial_transpose(const ComplexMatrix &m, std::span<const std::size_t> dims,
                                std::span<const FactorIndex> factors);
ComplexMatrix partial_transpose(const ComplexMatrix &m, const SpaceLayout &layout,
                                std::span<const FactorIndex> factors);

/// Reorders factors: factor `order[p]` of the input becomes factor `p` of the output.
ComplexMatrix permute_factors(const ComplexMatrix &m, std::span<const std::size_t> dims,
                              std::span<const FactorIndex> order);

/// An operator on a list of factors (acting in the listed order).
struct Block {
    FactorSet factors;
    ComplexMatrix op;
};

/// Tensor product of blocks that together cover every factor exactly once.
ComplexMatrix assemble(std::span<const std::size_t> dims, std::span<const Block> blocks);
/// `op` on `factors` tensored with the identity on everything else.
ComplexMatrix embed(const ComplexMatrix &op, std::span<const std::size_t> dims, std::span<const FactorIndex> factors);

struct VectorBlock {
    FactorSet factors;
    ComplexVector vec;
};

ComplexVector assemble_vector(std::span<const std::size_t> dims, std::span<const VectorBlock> blocks);

/// Unnormalized maximally entangled vector sum_i |ii> on C^d (x) C^d.
ComplexVector identity_ket(std::size_t d);
/// Swap of two equal-dimension factors, as a d^2 x d^2 permutation matrix.
ComplexMatrix swap_operator(std::size_t d);

double max_norm(const ComplexMatrix &m);
bool is_hermitian(const ComplexMatrix &m, double tol);

struct HermitianEigen {
    RealVector values;      // descending
    ComplexMatrix vectors;  // columns match `values`
};

/// Throws std::invalid_argument unless `m` is Hermitian to 1e-10 (relative
/// to max(1, max-norm)).
HermitianEigen eig_hermitian(const ComplexMatrix &m);

/// Smallest eigenvalue of a Hermitian matrix. Large low-rank inputs are
/// handled through a randomized range finder whose residual is checked
/// before it is trusted; otherwise a full eigensolve is used.
double min_eigenvalue(const ComplexMatrix &m);

/// Number of eigenvalues above 1e-9 * max|eigenvalue|.
std::size_t numerical_rank(const ComplexMatrix &m);

/// exp(-i * lambda * h) for Hermitian h.
ComplexMatrix unitary_from_generator(const ComplexMatrix &h, double lambda);

/// A Hermitian operator in the product Hilbert-Schmidt basis; see hs_algebra.
struct HermOpVector {
    RealVector coefficients;
};

/// Orthonormal basis (as columns) of {x : r.x = 0 for every row r}. Singular
/// values at or below 1e-9 * (largest singular value) count as zero.
RealMatrix real_kernel(std::span<const HermOpVector> rows, std::size_t n);
RealMatrix real_kernel(const RealMatrix &rows);

/// Numerical rank of a real matrix with the same singular-value threshold.
std::size_t real_rank(const RealMatrix &m);

}  // namespace pmx
