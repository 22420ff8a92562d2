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

#include <string>

namespace pmx {

/// P_T(X) = Pi X Pi (Pi the support projector of W) and the valid-subspace
/// projector P_V, both as real matrices on HS coefficient vectors.
struct SubspacePair {
    RealMatrix p_t;
    RealMatrix p_v;
    std::size_t dim_t = 0;
    std::size_t dim_v = 0;
};

/// Largest process dimension for which the full projector pair is built
/// (the HS coefficient space has dim^2 coordinates).
inline constexpr std::size_t kMaxProjectorPairDim = 32;

/// Eigenvectors of W with eigenvalue above 1e-9 * lambda_max, as columns.
ComplexMatrix support_basis(const ComplexMatrix &w);

SubspacePair subspace_pair(const ProcessMatrix &w);

/// Number of eigenvalues of (P_T + P_V)/2 within 1e-8 of 1.
std::size_t intersection_dim_projectors(const ProcessMatrix &w);
/// r^2 minus the rank of Y -> (1 - P_V)(V Y V^dag) over Hermitian r x r Y,
/// where V spans the support. Usable at any dimension.
std::size_t intersection_dim_support(const ProcessMatrix &w);

/// The projector method up to kMaxProjectorPairDim, the support method above.
std::size_t support_intersection_dim(const ProcessMatrix &w);

struct ExtremalityCertificate {
    bool extremal = false;
    std::size_t intersection_dim = 0;
    std::size_t support_rank = 0;
    std::string method;
};

ExtremalityCertificate is_extremal(const ProcessMatrix &w);

struct DarianoResult {
    std::size_t c_count = 0;
    std::size_t d_count = 0;
    std::size_t total = 0;
    std::size_t rank = 0;
    std::size_t space_dim = 0;
    bool independent = false;
};

/// Linear independence of C (Hermitian basis of L(supp W)) together with D
/// (the terms sigma_i^{Y_I} sigma_mu^{Y_O} sigma_nu^{X_I} sigma_rho^{X_O} and
/// 1 1 sigma_i^{X_I} sigma_mu^{X_O}, i >= 1, with X the earlier party).
/// Throws std::invalid_argument unless W is bipartite and X does not
/// receive signals from Y.
DarianoResult dariano_test(const ProcessMatrix &w, Direction order = Direction::a_to_b);

struct NonReachabilityReport {
    std::size_t wocb_rank = 0;
    std::size_t wocb_intersection_dim = 0;
    bool wocb_extremal = false;
    DarianoResult witness_a_to_b;
    DarianoResult witness_b_to_a;
    /// |C| + |D| for any rank-8 process, against dim L(H) = 256.
    std::size_t counted = 0;
    std::size_t space_dim = 0;
    bool passed = false;
    std::string verdict;
};

/// W_OCB has rank 8 and is extremal, while no rank-8 causally ordered
/// bipartite-qubit process is extremal; hence no reversible supermap
/// reaches W_OCB from a causally ordered process.
NonReachabilityReport non_reachability_report();

std::string format_report(const NonReachabilityReport &report);

}  // namespace pmx
