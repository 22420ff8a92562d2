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

#include "pmx/supermaps.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pmx {

namespace {

ComplexMatrix hermitian_part(const ComplexMatrix &m) {
    return (m + m.adjoint()) / 2.0;
}

ComplexMatrix projector_on(std::size_t d, Eigen::Index k) {
    const auto n = static_cast<Eigen::Index>(d);
    ComplexMatrix p = ComplexMatrix::Zero(n, n);
    p(k, k) = 1.0;
    return p;
}

}  // namespace

Supermap::Supermap(SpaceLayout in_layout, SpaceLayout out_layout, Action action, CjBuilder cj_builder, std::string name)
    : in_(std::move(in_layout)),
      out_(std::move(out_layout)),
      action_(std::move(action)),
      cj_builder_(std::move(cj_builder)),
      name_(std::move(name)),
      lazy_(std::make_shared<Lazy>()) {}

Supermap Supermap::from_cj(SpaceLayout in_layout, SpaceLayout out_layout, ComplexMatrix cj, std::string name) {
    const std::size_t d = in_layout.total_dim() * out_layout.total_dim();
    if (cj.rows() != cj.cols() || static_cast<std::size_t>(cj.rows()) != d) {
        throw std::invalid_argument("Supermap::from_cj: CJ dimension does not match the layouts");
    }
    Supermap s(std::move(in_layout), std::move(out_layout), nullptr, nullptr, std::move(name));
    std::call_once(s.lazy_->once, [&] { s.lazy_->cj = std::move(cj); });
    return s;
}

const ComplexMatrix &Supermap::cj() const {
    if (joint_dim() > kMaxCjDim) {
        throw SizeError("supermap '" + name_ + "': CJ dimension " + std::to_string(joint_dim()) + " exceeds " +
                        std::to_string(kMaxCjDim));
    }
    std::call_once(lazy_->once, [this] { lazy_->cj = cj_builder_(); });
    return lazy_->cj;
}

ComplexMatrix Supermap::apply_matrix(const ComplexMatrix &w) const {
    if (action_) {
        return action_(w);
    }
    return apply_via_cj(w);
}

ComplexMatrix Supermap::apply_via_cj(const ComplexMatrix &w) const {
    const auto d1 = static_cast<Eigen::Index>(in_.total_dim());
    const auto d2 = static_cast<Eigen::Index>(out_.total_dim());
    if (w.rows() != d1 || w.cols() != d1) {
        throw std::invalid_argument("Supermap::apply: input dimension mismatch");
    }
    const ComplexMatrix &c = cj();
    ComplexMatrix out = ComplexMatrix::Zero(d2, d2);
    for (Eigen::Index j = 0; j < d1; ++j) {
        for (Eigen::Index i = 0; i < d1; ++i) {
            if (w(i, j) != Complex(0.0)) {
                out += w(i, j) * c.block(i * d2, j * d2, d2, d2);
            }
        }
    }
    return out;
}

ProcessMatrix apply(const Supermap &s, const ProcessMatrix &w) {
    if (w.layout().dims() != s.in_layout().dims()) {
        throw std::invalid_argument("apply: process layout does not match the supermap input layout");
    }
    return ProcessMatrix(s.out_layout(), hermitian_part(s.apply_matrix(w.matrix())));
}

HierarchyLevel HierarchyLevel::process(SpaceLayout layout) {
    HierarchyLevel h;
    h.n_ = 1;
    h.dims_ = layout.dims();
    h.trace_norm_ = static_cast<double>(layout.output_dim());
    h.layout_ = std::make_shared<const SpaceLayout>(std::move(layout));
    return h;
}

HierarchyLevel HierarchyLevel::transformation(const HierarchyLevel &in, const HierarchyLevel &out) {
    if (in.n_ != out.n_) {
        throw std::invalid_argument("HierarchyLevel: both slots must be of the same order");
    }
    HierarchyLevel h;
    h.n_ = in.n_ + 1;
    h.dims_ = in.dims_;
    h.dims_.insert(h.dims_.end(), out.dims_.begin(), out.dims_.end());
    h.trace_norm_ = static_cast<double>(in.dim()) * out.trace_norm_ / in.trace_norm_;
    h.slot1_ = std::make_shared<const HierarchyLevel>(in);
    h.slot2_ = std::make_shared<const HierarchyLevel>(out);
    return h;
}

HierarchyLevel HierarchyLevel::uniform(int n, const SpaceLayout &base) {
    if (n < 1) {
        throw std::invalid_argument("HierarchyLevel: order must be at least 1");
    }
    if (n == 1) {
        return process(base);
    }
    HierarchyLevel lower = uniform(n - 1, base);
    return transformation(lower, lower);
}

std::size_t HierarchyLevel::dim() const {
    std::size_t d = 1;
    for (std::size_t k : dims_) {
        d *= k;
    }
    return d;
}

TermProjector hierarchy_projector(const HierarchyLevel &level) {
    if (level.n() == 1) {
        return TermProjector::valid_subspace(*level.layout());
    }
    TermProjector p1 = hierarchy_projector(*level.slot1());
    TermProjector p2 = hierarchy_projector(*level.slot2());
    TermProjector i1 = TermProjector::identity(level.slot1()->dims());
    TermProjector i2 = TermProjector::identity(level.slot2()->dims());
    return i1.tensor(i2) - p1.tensor(i2) + p1.tensor(p2);
}

ValidationReport validate_order_n(const ComplexMatrix &x, const HierarchyLevel &level) {
    if (x.rows() != x.cols() || static_cast<std::size_t>(x.rows()) != level.dim()) {
        throw std::invalid_argument("validate_order_n: matrix dimension does not match the level");
    }
    const double tol = tolerance();
    const double scale = std::max(1.0, max_norm(x));
    const double herm = max_norm(x - x.adjoint());
    if (herm > 1e-9 * scale) {
        ValidationReport r;
        r.checks.push_back({"positivity", false, herm, 1e-9 * scale, true});
        return r;
    }
    const ComplexMatrix h = hermitian_part(x);
    if (level.n() == 1) {
        return validate(ProcessMatrix(*level.layout(), h));
    }
    ValidationReport report;
    const double lmin = min_eigenvalue(h);
    report.checks.push_back({"positivity", lmin >= -tol * scale, std::max(0.0, -lmin), tol * scale, true});

    const HierarchyLevel &s1 = *level.slot1();
    const HierarchyLevel &s2 = *level.slot2();
    FactorSet second;
    for (std::size_t k = 0; k < s2.dims().size(); ++k) {
        second.push_back(s1.dims().size() + k);
    }
    const double c = s2.trace_norm() / s1.trace_norm();
    const auto d1 = static_cast<Eigen::Index>(s1.dim());
    ComplexMatrix dev = partial_trace(h, level.dims(), second) - c * ComplexMatrix::Identity(d1, d1);
    TermProjector p1 = hierarchy_projector(s1);
    const double tr_tol = tol * std::max(1.0, c);
    const double tr_res = max_norm(p1(dev));
    report.checks.push_back({"trace_rescaling", tr_res <= tr_tol, tr_res, tr_tol, true});
    const double strict = max_norm(dev);
    report.checks.push_back({"trace_rescaling_strict", strict <= tr_tol, strict, tr_tol, false});

    TermProjector p2 = hierarchy_projector(s2);
    TermProjector i2 = TermProjector::identity(s2.dims());
    // P^(n)(X) - X = -(P1 (x) 1 - P1 (x) P2)(X).
    const double sub_res = max_norm((p1.tensor(i2) - p1.tensor(p2))(h));
    report.checks.push_back({"subspace", sub_res <= tol * scale, sub_res, tol * scale, true});
    return report;
}

ComplexMatrix random_valid_order_n(const HierarchyLevel &level, std::mt19937_64 &rng) {
    if (level.n() == 1) {
        return random_valid_process(*level.layout(), rng).matrix();
    }
    const auto n = static_cast<Eigen::Index>(level.dim());
    std::normal_distribution<double> gauss;
    ComplexMatrix g(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            g(i, j) = Complex(gauss(rng), gauss(rng));
        }
    }
    // Drop the terms that would break trace rescaling: identity on slot 2
    // with an allowed slot-1 term (this includes the overall identity).
    const auto &s2dims = level.slot2()->dims();
    std::vector<double> e0(std::size_t{1} << s2dims.size(), 0.0);
    e0[0] = 1.0;
    TermProjector keep =
        hierarchy_projector(level) - hierarchy_projector(*level.slot1()).tensor(TermProjector(s2dims, e0));
    ComplexMatrix x = hermitian_part(keep(g + g.adjoint()));
    const double base = level.trace_norm() / static_cast<double>(n);
    ComplexMatrix w = base * ComplexMatrix::Identity(n, n);
    auto eig = eig_hermitian(x);
    const double spread = eig.values.size() ? eig.values.cwiseAbs().maxCoeff() : 0.0;
    if (spread > 0.0) {
        w += (0.5 * base / spread) * x;
    }
    return w;
}

ValidationReport validate_supermap(const Supermap &s) {
    auto level =
        HierarchyLevel::transformation(HierarchyLevel::process(s.in_layout()), HierarchyLevel::process(s.out_layout()));
    return validate_order_n(s.cj(), level);
}

Supermap identity_supermap(const SpaceLayout &layout) {
    const auto n = static_cast<Eigen::Index>(layout.total_dim());
    return unitary_supermap(layout, ComplexMatrix::Identity(n, n), "identity");
}

Supermap unitary_supermap(const SpaceLayout &layout, const ComplexMatrix &u, std::string name) {
    const auto n = static_cast<Eigen::Index>(layout.total_dim());
    if (u.rows() != n || u.cols() != n) {
        throw std::invalid_argument("unitary_supermap: unitary dimension does not match layout");
    }
    if (max_norm(u * u.adjoint() - ComplexMatrix::Identity(n, n)) > 1e-9) {
        throw std::invalid_argument("unitary_supermap: matrix is not unitary");
    }
    auto action = [u](const ComplexMatrix &w) -> ComplexMatrix { return u * w * u.adjoint(); };
    auto build = [u, n]() -> ComplexMatrix {
        ComplexVector v(n * n);
        for (Eigen::Index i = 0; i < n; ++i) {
            v.segment(i * n, n) = u.col(i);
        }
        return v * v.adjoint();
    };
    return Supermap(layout, layout, action, build, std::move(name));
}

Supermap constant_map(const SpaceLayout &in_layout, const ProcessMatrix &target) {
    const double d1 = static_cast<double>(in_layout.output_dim());
    const auto n1 = static_cast<Eigen::Index>(in_layout.total_dim());
    const ComplexMatrix t = target.matrix();
    auto action = [t, d1](const ComplexMatrix &w) -> ComplexMatrix { return (w.trace() / d1) * t; };
    auto build = [t, d1, n1]() -> ComplexMatrix { return tensor({ComplexMatrix::Identity(n1, n1), t}) / d1; };
    return Supermap(in_layout, target.layout(), action, build, "constant");
}

Supermap interpolation_map(const ProcessMatrix &target, double p) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument("interpolation_map: p must lie in [0, 1]");
    }
    const SpaceLayout &layout = target.layout();
    const double d1 = static_cast<double>(layout.output_dim());
    const auto n = static_cast<Eigen::Index>(layout.total_dim());
    const ComplexMatrix t = target.matrix();
    auto action = [t, d1, p](const ComplexMatrix &w) -> ComplexMatrix {
        return (1.0 - p) * w + (p * w.trace() / d1) * t;
    };
    auto build = [t, d1, p, n]() -> ComplexMatrix {
        ComplexVector one = identity_ket(static_cast<std::size_t>(n));
        return (1.0 - p) * (one * one.adjoint()) + (p / d1) * tensor({ComplexMatrix::Identity(n, n), t});
    };
    return Supermap(layout, layout, action, build, "interpolation");
}

ComplexMatrix c_swap_unitary() {
    const auto dims = SpaceLayout::switch_layout().dims();
    const ComplexMatrix id = ComplexMatrix::Identity(2, 2);
    const ComplexMatrix sw = swap_operator(2);
    const FactorSet control{5};
    std::vector<Block> swapped{{{0, 1}, sw}, {{2, 3}, sw}, {{4}, id}, {{5}, projector_on(2, 1)}};
    return embed(projector_on(2, 0), dims, control) + assemble(dims, swapped);
}

ComplexMatrix c_swap_generator() {
    const auto dims = SpaceLayout::switch_layout().dims();
    const ComplexMatrix sw = swap_operator(2);
    ComplexMatrix core = tensor({sw, sw}) - ComplexMatrix::Identity(16, 16);
    std::vector<Block> blocks{{{0, 1, 2, 3}, core}, {{4}, ComplexMatrix::Identity(2, 2)}, {{5}, projector_on(2, 1)}};
    return assemble(dims, blocks);
}

ComplexMatrix v_lambda_unitary(double lambda) {
    return unitary_from_generator(c_swap_generator(), lambda);
}

Supermap c_swap_v() {
    return unitary_supermap(SpaceLayout::switch_layout(), c_swap_unitary(), "c_swap");
}

Supermap v_lambda(double lambda) {
    return unitary_supermap(SpaceLayout::switch_layout(), v_lambda_unitary(lambda), "v_lambda");
}

Supermap instrument_reduction(const SpaceLayout &in_layout, std::string_view party, const ComplexMatrix &cj) {
    const FactorSet pf = in_layout.party_factors(party);
    const Party &x = in_layout.party(party);
    const auto dims = in_layout.dims();
    std::vector<std::size_t> local;
    std::size_t d_in = 1, d_loc = 1;
    for (FactorIndex f : x.inputs) {
        d_in *= dims[f];
    }
    for (FactorIndex f : pf) {
        local.push_back(dims[f]);
        d_loc *= dims[f];
    }
    if (cj.rows() != cj.cols() || static_cast<std::size_t>(cj.rows()) != d_loc) {
        throw std::invalid_argument("instrument_reduction: CJ dimension does not match the party");
    }
    FactorSet local_out;
    for (std::size_t k = x.inputs.size(); k < pf.size(); ++k) {
        local_out.push_back(k);
    }
    const auto di = static_cast<Eigen::Index>(d_in);
    if (max_norm(partial_trace(cj, local, local_out) - ComplexMatrix::Identity(di, di)) > 1e-9) {
        throw std::invalid_argument("instrument_reduction: map is not trace preserving");
    }
    if (min_eigenvalue(cj) < -1e-9 * std::max(1.0, max_norm(cj))) {
        throw std::invalid_argument("instrument_reduction: map is not completely positive");
    }
    SpaceLayout out_layout = in_layout.without_party(party);
    auto action = [dims, pf, cj](const ComplexMatrix &w) -> ComplexMatrix {
        return partial_trace(w * embed(cj, dims, pf), dims, pf);
    };
    const std::size_t d1 = in_layout.total_dim();
    const std::size_t d2 = out_layout.total_dim();
    auto build = [dims, pf, cj, d1, d2]() -> ComplexMatrix {
        FactorSplit split(dims, pf);
        const auto n = static_cast<Eigen::Index>(d1 * d2);
        ComplexMatrix c = ComplexMatrix::Zero(n, n);
        const auto nd2 = static_cast<Eigen::Index>(d2);
        for (std::size_t l = 0; l < split.rest.size(); ++l) {
            for (std::size_t xj = 0; xj < split.sub.size(); ++xj) {
                const auto col =
                    static_cast<Eigen::Index>(split.sub[xj] + split.rest[l]) * nd2 + static_cast<Eigen::Index>(l);
                for (std::size_t k = 0; k < split.rest.size(); ++k) {
                    for (std::size_t xi = 0; xi < split.sub.size(); ++xi) {
                        const auto row = static_cast<Eigen::Index>(split.sub[xi] + split.rest[k]) * nd2 +
                                         static_cast<Eigen::Index>(k);
                        c(row, col) = cj(static_cast<Eigen::Index>(xj), static_cast<Eigen::Index>(xi));
                    }
                }
            }
        }
        return c;
    };
    return Supermap(in_layout, std::move(out_layout), action, build, "instrument_reduction:" + std::string(party));
}

GlobalLoopProbe vlambda_global_loop(double lambda) {
    const auto layout = SpaceLayout::switch_layout();
    const auto &dims = layout.dims();
    const ComplexVector ket =
        tensor_vectors({causal_order_ket(ComplexVector::Unit(2, 0), Direction::a_to_b), ComplexVector::Unit(2, 1)});
    const ComplexVector moved = v_lambda_unitary(lambda) * ket;
    const auto hs = to_hs_vector(moved * moved.adjoint(), dims).coefficients;
    GlobalLoopProbe probe;
    for (Eigen::Index k = 0; k < hs.size(); ++k) {
        const auto t = term_pattern(static_cast<std::size_t>(k), dims);
        const bool loop = t[0] && t[1] && t[2] && t[3] && t[4] == 0 && t[5] == 0;
        if (!loop) {
            continue;
        }
        const double c = std::abs(hs(k));
        if (t[0] == t[1] && t[1] == t[2] && t[2] == t[3]) {
            probe.equal_index = std::max(probe.equal_index, c);
        }
        if (c > probe.coefficient) {
            probe.coefficient = c;
            probe.term = term_name(t, dims);
        }
    }
    return probe;
}

}  // namespace pmx
