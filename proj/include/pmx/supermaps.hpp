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
#include "pmx/process_space.hpp"

#include <functional>
#include <memory>
#include <mutex>
#include <random>
#include <string>
#include <string_view>

namespace pmx {

/// Largest joint (input x output) dimension for which a CJ operator is
/// materialized.
inline constexpr std::size_t kMaxCjDim = 4096;

/// A linear map from operators on `in_layout` to operators on `out_layout`.
///
/// The CJ operator C = sum_ij |i><j| (x) A(|i><j|) on H_1 (x) H_2 is the
/// reference representation and is built on first use. Constructors with a
/// known closed form also carry a direct action so that large instances can
/// still be applied; the direct and CJ routes agree (see the tests).
class Supermap {
   public:
    using Action = std::function<ComplexMatrix(const ComplexMatrix &)>;
    using CjBuilder = std::function<ComplexMatrix()>;

    Supermap(SpaceLayout in_layout, SpaceLayout out_layout, Action action, CjBuilder cj_builder, std::string name);

    static Supermap from_cj(SpaceLayout in_layout, SpaceLayout out_layout, ComplexMatrix cj, std::string name = "cj");

    const SpaceLayout &in_layout() const {
        return in_;
    }
    const SpaceLayout &out_layout() const {
        return out_;
    }
    const std::string &name() const {
        return name_;
    }
    std::size_t joint_dim() const {
        return in_.total_dim() * out_.total_dim();
    }

    /// Throws SizeError when joint_dim() exceeds kMaxCjDim.
    const ComplexMatrix &cj() const;

    ComplexMatrix apply_matrix(const ComplexMatrix &w) const;
    /// Tr_1(C (W^T (x) 1)), regardless of any direct action.
    ComplexMatrix apply_via_cj(const ComplexMatrix &w) const;

   private:
    struct Lazy {
        std::once_flag once;
        ComplexMatrix cj;
    };

    SpaceLayout in_;
    SpaceLayout out_;
    Action action_;
    CjBuilder cj_builder_;
    std::string name_;
    std::shared_ptr<Lazy> lazy_;
};

/// Throws std::invalid_argument if W's layout differs from the input layout.
ProcessMatrix apply(const Supermap &s, const ProcessMatrix &w);

/// Level of the higher-order hierarchy. Level 1 is a process on a layout;
/// level n > 1 maps level n-1 objects (slot 1) to level n-1 objects (slot 2).
class HierarchyLevel {
   public:
    static HierarchyLevel process(SpaceLayout layout);
    static HierarchyLevel transformation(const HierarchyLevel &in, const HierarchyLevel &out);
    /// n nested levels with the same layout in every slot. Throws
    /// std::invalid_argument if n < 1.
    static HierarchyLevel uniform(int n, const SpaceLayout &base);

    int n() const {
        return n_;
    }
    const std::vector<std::size_t> &dims() const {
        return dims_;
    }
    std::size_t dim() const;
    /// Trace of every valid object at this level (d_O at level 1).
    double trace_norm() const {
        return trace_norm_;
    }
    /// Null at level 1.
    const HierarchyLevel *slot1() const {
        return slot1_.get();
    }
    const HierarchyLevel *slot2() const {
        return slot2_.get();
    }
    /// Only set at level 1.
    const SpaceLayout *layout() const {
        return layout_.get();
    }

   private:
    HierarchyLevel() = default;

    int n_ = 1;
    std::vector<std::size_t> dims_;
    double trace_norm_ = 1.0;
    std::shared_ptr<const HierarchyLevel> slot1_;
    std::shared_ptr<const HierarchyLevel> slot2_;
    std::shared_ptr<const SpaceLayout> layout_;
};

/// P at level 1; 1(x)1 - P1(x)1 + P1(x)P2 (one level down) above that.
TermProjector hierarchy_projector(const HierarchyLevel &level);

/// Positivity, trace rescaling and P^(n)(X) = X. At level n > 1 trace
/// rescaling is checked on the span of valid inputs, P1(Tr_2 X - c 1) = 0.
ValidationReport validate_order_n(const ComplexMatrix &x, const HierarchyLevel &level);

/// A random full-rank object satisfying every level-n condition.
ComplexMatrix random_valid_order_n(const HierarchyLevel &level, std::mt19937_64 &rng);

/// Checks "positivity", "trace_rescaling" and "subspace" (the
/// P1(x)1(C) = P1(x)P2(C) condition). "trace_rescaling_strict"
/// (Tr_2 C = (d2/d1) 1 exactly) is reported but does not count.
ValidationReport validate_supermap(const Supermap &s);

Supermap identity_supermap(const SpaceLayout &layout);
/// W -> U W U^dagger on one layout.
Supermap unitary_supermap(const SpaceLayout &layout, const ComplexMatrix &u, std::string name = "unitary");
/// W -> Tr(W) W~ / d_O(in).
Supermap constant_map(const SpaceLayout &in_layout, const ProcessMatrix &target);
/// W -> (1 - p) W + p W~ (with the constant map as above).
Supermap interpolation_map(const ProcessMatrix &target, double p);

/// The controlled swap unitary on the switch layout (qubit target).
ComplexMatrix c_swap_unitary();
/// (SWAP (x) SWAP - 1) (x) 1 (x) |1><1| on the switch layout.
ComplexMatrix c_swap_generator();
/// exp(-i lambda H) for the generator above; equals c_swap_unitary() at pi/2.
ComplexMatrix v_lambda_unitary(double lambda);

struct GlobalLoopProbe {
    // Largest |c_t| over terms nontrivial on A_I, B_I, A_O, B_O and trivial on C.
    double coefficient = 0.0;
    std::string term;
    // Same, restricted to sigma_i on all four party factors.
    double equal_index = 0.0;
};

/// HS probe of V_lambda |ABC>|1> on the switch layout.
GlobalLoopProbe vlambda_global_loop(double lambda);

Supermap c_swap_v();
Supermap v_lambda(double lambda);

/// A_M(W) = Tr_X(W (C_M (x) 1)) for a CPTP map M of party X (CJ on the
/// party's inputs then outputs). The output layout drops X's factors.
Supermap instrument_reduction(const SpaceLayout &in_layout, std::string_view party, const ComplexMatrix &cj);

}  // namespace pmx
