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

#include "pmx/hs_algebra.hpp"
#include "pmx/operator_core.hpp"

#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace pmx {

enum class TermClass { allowed, forbidden };

/// A term is forbidden iff it is nontrivial on some output factor and every
/// party it touches is touched on its output.
TermClass classify_term(const TermPattern &t, const SpaceLayout &layout);
/// Same rule on a factor mask (bit k = nontrivial on factor k).
TermClass classify_mask(unsigned long mask, const SpaceLayout &layout);

/// Linear map that multiplies every product-basis coefficient by a weight
/// depending only on which factors the term is nontrivial on.
class TermProjector {
   public:
    TermProjector(std::vector<std::size_t> dims, std::vector<double> weights);

    static TermProjector identity(std::vector<std::size_t> dims);
    /// The projector onto span(allowed terms) of a layout.
    static TermProjector valid_subspace(const SpaceLayout &layout);

    const std::vector<std::size_t> &dims() const {
        return dims_;
    }
    const std::vector<double> &weights() const {
        return weights_;
    }
    double weight(const TermPattern &t) const {
        return weights_[term_mask(t)];
    }
    std::size_t dim() const;

    ComplexMatrix apply(const ComplexMatrix &m) const;
    ComplexMatrix operator()(const ComplexMatrix &m) const {
        return apply(m);
    }

    /// Map on the joint space: factors of *this first, then of `other`.
    TermProjector tensor(const TermProjector &other) const;

    TermProjector operator+(const TermProjector &o) const;
    TermProjector operator-(const TermProjector &o) const;

   private:
    std::vector<std::size_t> dims_;
    std::vector<double> weights_;
};

class ProcessMatrix {
   public:
    /// Throws std::invalid_argument if the matrix does not match the layout
    /// or is not Hermitian to 1e-9 (relative to its max-norm).
    ProcessMatrix(SpaceLayout layout, ComplexMatrix matrix);

    const SpaceLayout &layout() const {
        return layout_;
    }
    const ComplexMatrix &matrix() const {
        return matrix_;
    }
    std::size_t dim() const {
        return static_cast<std::size_t>(matrix_.rows());
    }

   private:
    SpaceLayout layout_;
    ComplexMatrix matrix_;
};

struct ConditionCheck {
    std::string name;
    bool passed = false;
    double residual = 0.0;
    double tolerance = 0.0;
    // Informational checks do not affect the verdict.
    bool required = true;
};

struct ValidationReport {
    std::vector<ConditionCheck> checks;

    bool valid() const;
    /// Throws std::out_of_range if absent.
    const ConditionCheck &check(std::string_view name) const;
    std::vector<std::string> failed() const;
};

std::string format_report(const ValidationReport &report);

ProcessMatrix project_valid(const ProcessMatrix &w);

/// Checks "positivity" (residual: most negative eigenvalue magnitude),
/// "trace" (|Tr W - d_O|) and "subspace" (max-norm of P(W) - W).
ValidationReport validate(const ProcessMatrix &w);

/// CJ elements act on the party's inputs then outputs (declaration order).
struct Instrument {
    std::string party;
    std::vector<ComplexMatrix> cj_elements;
};

/// Positivity of every element and Tr_out(sum) = 1_in.
ValidationReport validate_instrument(const Instrument &inst, const SpaceLayout &layout);

struct ProbabilityTable {
    std::vector<std::string> parties;  // layout party order
    std::vector<std::size_t> shape;    // outcomes per party
    std::vector<double> p;             // row-major over outcomes
    std::vector<std::string> warnings;

    double at(std::span<const std::size_t> outcome) const;
    double total() const;
};

/// p(i, j, ...) = Tr(W (C_i (x) C_j (x) ...)). Instruments may be given in
/// any order but must cover every party exactly once.
ProbabilityTable born_probabilities(const ProcessMatrix &w, std::span<const Instrument> instruments);

/// CJ of a linear map given as a (d_out^2 x d_in^2) matrix acting on
/// row-major vectorized operators (vec(X)[i * d + j] = X_ij).
ComplexMatrix cj_of_map(const ComplexMatrix &superop, std::size_t d_in, std::size_t d_out);
ComplexMatrix cj_of_kraus(std::span<const ComplexMatrix> kraus);
ComplexMatrix cj_of_unitary(const ComplexMatrix &u);

enum class Direction { a_to_b, b_to_a };
enum class CausalFlags { no_signalling, a_to_b, b_to_a, neither };

std::string to_string(CausalFlags f);

/// W = rho on every input factor (layout input order) tensored with identity
/// on the outputs.
ProcessMatrix shared_state(const ComplexMatrix &rho, const SpaceLayout &layout = SpaceLayout::bipartite());
/// Bipartite qubit process W = core^{X_I X_O Y_I} (x) 1^{Y_O}, where X is the
/// first party of `direction`.
ProcessMatrix channel_with_memory(const ComplexMatrix &core, Direction direction);
/// Memoryless special case core = rho^{X_I} (x) C^{X_O Y_I}.
ProcessMatrix channel(Direction direction, const ComplexMatrix &rho, const ComplexMatrix &channel_cj);
ProcessMatrix w_ocb();
/// |1>><<1| on a single party's input and output. Not a valid process.
ProcessMatrix w_ll();

/// Pure process |v><v| on a layout (v unnormalized).
ProcessMatrix pure_process(const SpaceLayout &layout, const ComplexVector &v);
/// |ABC> or |BAC> on A_I, B_I, A_O, B_O, C_T (psi enters the first party).
ComplexVector causal_order_ket(const ComplexVector &psi, Direction direction);
/// Fixed order (first party of `direction` first) with control in `control`.
ProcessMatrix fixed_order_with_control(const ComplexVector &psi, Direction direction, const ComplexVector &control);
ProcessMatrix quantum_switch(const ComplexVector &psi = ComplexVector::Unit(2, 0));
ProcessMatrix extended_switch(const ComplexVector &psi = ComplexVector::Unit(2, 0));

/// Structural signalling flags between parties a and b. Every other party
/// must have trivial output; those parties are traced out first.
CausalFlags causal_order_flags(const ProcessMatrix &w, std::string_view a = "A", std::string_view b = "B");

/// sqrt(Tr(W1 W2) / (Tr W1 Tr W2)); equals |<v1|v2>| / (|v1| |v2|) for pure processes.
double process_overlap(const ProcessMatrix &w1, const ProcessMatrix &w2);

/// A random full-rank valid process: the maximally mixed process plus a
/// small traceless allowed-term perturbation.
ProcessMatrix random_valid_process(const SpaceLayout &layout, std::mt19937_64 &rng);

}  // namespace pmx
