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

#include "pmx/extremality.hpp"

#include "pmx/hs_algebra.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace pmx {

namespace {

// v_a v_a^dag, (v_a v_b^dag + v_b v_a^dag)/sqrt2, i(v_a v_b^dag - v_b v_a^dag)/sqrt2.
std::vector<ComplexMatrix> hermitian_support_basis(const ComplexMatrix &v) {
    const Eigen::Index r = v.cols();
    const double s = 1.0 / std::sqrt(2.0);
    std::vector<ComplexMatrix> out;
    out.reserve(static_cast<std::size_t>(r * r));
    for (Eigen::Index a = 0; a < r; ++a) {
        out.push_back(v.col(a) * v.col(a).adjoint());
    }
    for (Eigen::Index a = 0; a < r; ++a) {
        for (Eigen::Index b = a + 1; b < r; ++b) {
            ComplexMatrix ab = v.col(a) * v.col(b).adjoint();
            out.push_back(s * (ab + ab.adjoint()));
            out.push_back(Complex(0.0, s) * (ab - ab.adjoint()));
        }
    }
    return out;
}

TermProjector forbidden_projector(const SpaceLayout &layout) {
    return TermProjector::identity(layout.dims()) - TermProjector::valid_subspace(layout);
}

}  // namespace

ComplexMatrix support_basis(const ComplexMatrix &w) {
    auto eig = eig_hermitian(w);
    if (eig.values.size() == 0 || eig.values(0) <= 0.0) {
        return ComplexMatrix(w.rows(), 0);
    }
    const double thr = 1e-9 * eig.values(0);
    Eigen::Index r = 0;
    while (r < eig.values.size() && eig.values(r) > thr) {
        ++r;
    }
    return eig.vectors.leftCols(r);
}

SubspacePair subspace_pair(const ProcessMatrix &w) {
    if (w.dim() > kMaxProjectorPairDim) {
        throw SizeError("subspace_pair: process dimension " + std::to_string(w.dim()) + " exceeds " +
                        std::to_string(kMaxProjectorPairDim));
    }
    const auto dims = w.layout().dims();
    const std::size_t n = term_count(dims);
    const ComplexMatrix v = support_basis(w.matrix());
    const ComplexMatrix pi = v * v.adjoint();
    SubspacePair out;
    out.p_t = RealMatrix(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    out.p_v = RealMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    const auto p = TermProjector::valid_subspace(w.layout());
    for (std::size_t t = 0; t < n; ++t) {
        const TermPattern pat = term_pattern(t, dims);
        ComplexMatrix s = term_operator(pat, dims);
        ComplexMatrix x = pi * s * pi;
        out.p_t.col(static_cast<Eigen::Index>(t)) = to_hs_vector((x + x.adjoint()) / 2.0, dims).coefficients;
        const double wt = p.weight(pat);
        out.p_v(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(t)) = wt;
        out.dim_v += wt == 1.0 ? 1 : 0;
    }
    out.p_t = (out.p_t + out.p_t.transpose()).eval() / 2.0;
    out.dim_t = static_cast<std::size_t>(v.cols() * v.cols());
    return out;
}

std::size_t intersection_dim_projectors(const ProcessMatrix &w) {
    SubspacePair pair = subspace_pair(w);
    RealMatrix avg = (pair.p_t + pair.p_v) / 2.0;
    Eigen::SelfAdjointEigenSolver<RealMatrix> solver(avg, Eigen::EigenvaluesOnly);
    return static_cast<std::size_t>(((solver.eigenvalues().array() - 1.0).abs() <= 1e-8).count());
}

std::size_t intersection_dim_support(const ProcessMatrix &w) {
    const auto dims = w.layout().dims();
    const ComplexMatrix v = support_basis(w.matrix());
    const auto basis = hermitian_support_basis(v);
    if (basis.empty()) {
        return 0;
    }
    const auto q = forbidden_projector(w.layout());
    const auto n = static_cast<Eigen::Index>(term_count(dims));
    RealMatrix m(n, static_cast<Eigen::Index>(basis.size()));
    for (std::size_t j = 0; j < basis.size(); ++j) {
        ComplexMatrix f = q(basis[j]);
        m.col(static_cast<Eigen::Index>(j)) = to_hs_vector((f + f.adjoint()) / 2.0, dims).coefficients;
    }
    // Every column vanishing means all of T lies in V.
    if (m.cwiseAbs().maxCoeff() <= 1e-12) {
        return basis.size();
    }
    return basis.size() - real_rank(m);
}

std::size_t support_intersection_dim(const ProcessMatrix &w) {
    if (w.dim() <= kMaxProjectorPairDim) {
        return intersection_dim_projectors(w);
    }
    return intersection_dim_support(w);
}

ExtremalityCertificate is_extremal(const ProcessMatrix &w) {
    ExtremalityCertificate cert;
    cert.support_rank = static_cast<std::size_t>(support_basis(w.matrix()).cols());
    cert.method = w.dim() <= kMaxProjectorPairDim ? "projectors" : "support";
    cert.intersection_dim = support_intersection_dim(w);
    cert.extremal = cert.intersection_dim == 1;
    return cert;
}

DarianoResult dariano_test(const ProcessMatrix &w, Direction order) {
    const SpaceLayout &layout = w.layout();
    if (layout.parties().size() != 2 || layout.factor_count() != 4) {
        throw std::invalid_argument("dariano_test: a bipartite layout is required");
    }
    for (const auto &p : layout.parties()) {
        if (p.inputs.size() != 1 || p.outputs.size() != 1) {
            throw std::invalid_argument("dariano_test: each party needs one input and one output factor");
        }
    }
    const Party &first = layout.parties()[order == Direction::a_to_b ? 0 : 1];
    const Party &second = layout.parties()[order == Direction::a_to_b ? 1 : 0];
    const CausalFlags flags = causal_order_flags(w, layout.parties()[0].name, layout.parties()[1].name);
    const CausalFlags wanted = order == Direction::a_to_b ? CausalFlags::a_to_b : CausalFlags::b_to_a;
    if (flags != wanted && flags != CausalFlags::no_signalling) {
        throw std::invalid_argument("dariano_test: process is not causally ordered in the requested direction (" +
                                    to_string(flags) + ")");
    }
    const auto dims = layout.dims();
    const FactorIndex xi = first.inputs[0], xo = first.outputs[0], yi = second.inputs[0], yo = second.outputs[0];
    auto sq = [&](FactorIndex f) { return dims[f] * dims[f]; };

    std::vector<std::size_t> d_terms;
    for (std::size_t i = 1; i < sq(yi); ++i) {
        for (std::size_t mu = 0; mu < sq(yo); ++mu) {
            for (std::size_t nu = 0; nu < sq(xi); ++nu) {
                for (std::size_t rho = 0; rho < sq(xo); ++rho) {
                    TermPattern t(4, 0);
                    t[yi] = i;
                    t[yo] = mu;
                    t[xi] = nu;
                    t[xo] = rho;
                    d_terms.push_back(term_index(t, dims));
                }
            }
        }
    }
    for (std::size_t i = 1; i < sq(xi); ++i) {
        for (std::size_t mu = 0; mu < sq(xo); ++mu) {
            TermPattern t(4, 0);
            t[xi] = i;
            t[xo] = mu;
            d_terms.push_back(term_index(t, dims));
        }
    }
    const auto c_ops = hermitian_support_basis(support_basis(w.matrix()));

    DarianoResult res;
    res.c_count = c_ops.size();
    res.d_count = d_terms.size();
    res.total = res.c_count + res.d_count;
    res.space_dim = term_count(dims);
    RealMatrix rows = RealMatrix::Zero(static_cast<Eigen::Index>(res.total), static_cast<Eigen::Index>(res.space_dim));
    for (std::size_t r = 0; r < c_ops.size(); ++r) {
        RealVector c = to_hs_vector(c_ops[r], dims).coefficients;
        rows.row(static_cast<Eigen::Index>(r)) = c.normalized().transpose();
    }
    for (std::size_t r = 0; r < d_terms.size(); ++r) {
        rows(static_cast<Eigen::Index>(c_ops.size() + r), static_cast<Eigen::Index>(d_terms[r])) = 1.0;
    }
    res.rank = real_rank(rows);
    res.independent = res.rank == res.total;
    return res;
}

NonReachabilityReport non_reachability_report() {
    NonReachabilityReport rep;
    const ProcessMatrix wocb = w_ocb();
    rep.wocb_rank = numerical_rank(wocb.matrix());
    const auto cert = is_extremal(wocb);
    rep.wocb_intersection_dim = cert.intersection_dim;
    rep.wocb_extremal = cert.extremal;

    // Rank-8 causally ordered witnesses: a maximally mixed input followed by
    // a dephasing channel, in each direction.
    const ComplexMatrix half = ComplexMatrix::Identity(2, 2) / 2.0;
    ComplexMatrix dephase = ComplexMatrix::Zero(4, 4);
    dephase(0, 0) = 1.0;
    dephase(3, 3) = 1.0;
    rep.witness_a_to_b = dariano_test(channel(Direction::a_to_b, half, dephase), Direction::a_to_b);
    rep.witness_b_to_a = dariano_test(channel(Direction::b_to_a, half, dephase), Direction::b_to_a);

    rep.space_dim = 256;
    rep.counted = 8 * 8 + rep.witness_a_to_b.d_count;
    const bool counting = rep.counted > rep.space_dim;
    auto witness_ok = [](const DarianoResult &d) { return d.c_count == 64 && d.d_count == 204 && !d.independent; };
    rep.passed = rep.wocb_rank == 8 && rep.wocb_extremal && counting && witness_ok(rep.witness_a_to_b) &&
                 witness_ok(rep.witness_b_to_a);
    rep.verdict = rep.passed ? "no causally ordered rank-8 extremal bipartite-qubit process exists; W_OCB is not "
                               "reachable from a causally ordered process by a reversible supermap"
                             : "chain incomplete";
    return rep;
}

std::string format_report(const NonReachabilityReport &r) {
    std::ostringstream out;
    out << "wocb_extremal=" << (r.wocb_extremal ? "true" : "false") << '\n';
    for (const auto *d : {&r.witness_a_to_b, &r.witness_b_to_a}) {
        out << (d == &r.witness_a_to_b ? "witness_A_to_B" : "witness_B_to_A") << " c_count=" << d->c_count
            << " d_count=" << d->d_count << " rank=" << d->rank << " space_dim=" << d->space_dim
            << " independent=" << (d->independent ? "true" : "false") << '\n';
    }
    out << "verdict=" << r.verdict << '\n';
    out << "wocb_rank=" << r.wocb_rank << " intersection_dim=" << r.wocb_intersection_dim
        << " dariano_card=" << r.counted << ' ' << (r.passed ? "PASS" : "FAIL") << '\n';
    return out.str();
}

}  // namespace pmx
