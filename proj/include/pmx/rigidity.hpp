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
#include "pmx/process_space.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace pmx {

/// Largest total Hilbert dimension accepted by build_constraints.
inline constexpr std::size_t kMaxRigidityDim = 32;

/// Linear conditions Tr([H, T] F) = 0 on a traceless Hermitian H, for every
/// allowed term T and forbidden term F. Columns are the traceless terms:
/// column c stands for term index c + 1.
struct ConstraintSystem {
    SpaceLayout layout;
    std::vector<TermPattern> valid_terms;
    std::vector<TermPattern> forbidden_terms;
    /// |valid_terms| * |forbidden_terms|, before pruning.
    std::size_t pair_count = 0;
    /// Distinct nonzero rows (identically zero functionals and repeated
    /// rows up to scale are dropped; the kernel is unchanged).
    RealMatrix rows;

    std::size_t unknowns() const {
        return static_cast<std::size_t>(rows.cols());
    }
};

/// Throws SizeError above kMaxRigidityDim.
ConstraintSystem build_constraints(const SpaceLayout &layout);

/// Orthonormal kernel basis as columns (coordinates as in ConstraintSystem).
RealMatrix generator_kernel(const ConstraintSystem &system);

/// Columns e_t for the terms nontrivial on exactly one factor.
RealMatrix single_body_basis(const SpaceLayout &layout);

/// H = sum_c x_c sigma_{c+1} for traceless coordinates x.
ComplexMatrix generator_operator(const RealVector &x, const SpaceLayout &layout);

struct RigidityReport {
    std::string layout;
    std::size_t valid_terms = 0;
    std::size_t forbidden_terms = 0;
    std::size_t pair_count = 0;
    std::size_t row_count = 0;
    std::size_t kernel_dim = 0;
    std::size_t single_body_dim = 0;
    /// ||(1 - K K^T) S||_max and ||(1 - S S^T) K||_max.
    double single_body_in_kernel = 0.0;
    double kernel_in_single_body = 0.0;
    /// max over kernel H and allowed terms T of ||P([H, T]) - [H, T]||_max.
    double soundness_residual = 0.0;
    std::size_t spot_checks = 0;
    std::size_t spot_failures = 0;

    bool passed() const;
};

/// Kernel versus single-body span, soundness on every allowed term, and
/// exp(-i lambda H) W exp(i lambda H) staying valid for 5 random kernel
/// elements, lambda in {0.3, 1.0}, on the named (or random) valid processes
/// of the layout.
RigidityReport verify_rigidity(const SpaceLayout &layout, std::uint64_t seed = 42);

std::string format_report(const RigidityReport &report);

}  // namespace pmx
