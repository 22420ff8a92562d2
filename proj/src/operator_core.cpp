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

#include "pmx/operator_core.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <random>
#include <sstream>

namespace pmx {

namespace {

void check_factor_list(std::size_t n, std::span<const FactorIndex> factors) {
    std::vector<bool> seen(n, false);
    for (FactorIndex f : factors) {
        if (f >= n) {
            throw std::out_of_range("factor index " + std::to_string(f) + " out of range for " + std::to_string(n) +
                                    " factors");
        }
        if (seen[f]) {
            throw std::invalid_argument("factor index " + std::to_string(f) + " listed twice");
        }
        seen[f] = true;
    }
}

std::size_t product(std::span<const std::size_t> dims) {
    std::size_t p = 1;
    for (std::size_t d : dims) {
        p *= d;
    }
    return p;
}

void check_square(const ComplexMatrix &m, std::size_t expected, const char *what) {
    if (m.rows() != m.cols()) {
        throw std::invalid_argument(std::string(what) + ": matrix is not square");
    }
    if (static_cast<std::size_t>(m.rows()) != expected) {
        throw std::invalid_argument(std::string(what) + ": matrix dimension " + std::to_string(m.rows()) +
                                    " does not match layout dimension " + std::to_string(expected));
    }
}

// Offsets of every index over the listed factors (in listed order), given
// the per-factor strides of the full index.
std::vector<std::size_t> offsets(std::span<const std::size_t> dims, std::span<const std::size_t> strides,
                                 std::span<const FactorIndex> factors) {
    std::vector<std::size_t> out{0};
    for (FactorIndex f : factors) {
        std::vector<std::size_t> next;
        next.reserve(out.size() * dims[f]);
        for (std::size_t base : out) {
            for (std::size_t k = 0; k < dims[f]; ++k) {
                next.push_back(base + k * strides[f]);
            }
        }
        out = std::move(next);
    }
    return out;
}

}  // namespace

double tolerance() {
    static const double tol = [] {
        const char *env = std::getenv("PMX_TOL");
        if (env == nullptr || *env == '\0') {
            return 1e-9;
        }
        char *end = nullptr;
        double v = std::strtod(env, &end);
        if (end == env || *end != '\0' || !(v > 0) || !std::isfinite(v)) {
            return 1e-9;
        }
        return v;
    }();
    return tol;
}

SpaceLayout::SpaceLayout(std::vector<Factor> factors, std::vector<Party> parties)
    : factors_(std::move(factors)), parties_(std::move(parties)) {
    std::vector<int> owner(factors_.size(), 0);
    for (std::size_t i = 0; i < factors_.size(); ++i) {
        if (factors_[i].dim == 0) {
            throw std::invalid_argument("factor '" + factors_[i].label + "' has dimension 0");
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (factors_[j].label == factors_[i].label) {
                throw std::invalid_argument("duplicate factor label '" + factors_[i].label + "'");
            }
        }
    }
    for (std::size_t p = 0; p < parties_.size(); ++p) {
        for (std::size_t q = 0; q < p; ++q) {
            if (parties_[q].name == parties_[p].name) {
                throw std::invalid_argument("duplicate party name '" + parties_[p].name + "'");
            }
        }
        for (const FactorSet *set : {&parties_[p].inputs, &parties_[p].outputs}) {
            for (FactorIndex f : *set) {
                if (f >= factors_.size()) {
                    throw std::out_of_range("party '" + parties_[p].name + "' refers to factor " + std::to_string(f));
                }
                ++owner[f];
            }
        }
    }
    for (std::size_t i = 0; i < factors_.size(); ++i) {
        if (owner[i] != 1) {
            throw std::invalid_argument("factor '" + factors_[i].label + "' must belong to exactly one party role");
        }
    }
}

std::size_t SpaceLayout::dim(FactorIndex f) const {
    if (f >= factors_.size()) {
        throw std::out_of_range("factor index out of range");
    }
    return factors_[f].dim;
}

std::vector<std::size_t> SpaceLayout::dims() const {
    std::vector<std::size_t> out;
    out.reserve(factors_.size());
    for (const auto &f : factors_) {
        out.push_back(f.dim);
    }
    return out;
}

std::size_t SpaceLayout::total_dim() const {
    std::size_t p = 1;
    for (const auto &f : factors_) {
        p *= f.dim;
    }
    return p;
}

std::size_t SpaceLayout::output_dim() const {
    std::size_t p = 1;
    for (FactorIndex f : output_factors()) {
        p *= factors_[f].dim;
    }
    return p;
}

std::size_t SpaceLayout::party_index(std::string_view name) const {
    for (std::size_t p = 0; p < parties_.size(); ++p) {
        if (parties_[p].name == name) {
            return p;
        }
    }
    throw std::invalid_argument("no party named '" + std::string(name) + "'");
}

const Party &SpaceLayout::party(std::string_view name) const {
    return parties_[party_index(name)];
}

std::size_t SpaceLayout::party_of(FactorIndex f) const {
    for (std::size_t p = 0; p < parties_.size(); ++p) {
        const auto &party = parties_[p];
        if (std::find(party.inputs.begin(), party.inputs.end(), f) != party.inputs.end() ||
            std::find(party.outputs.begin(), party.outputs.end(), f) != party.outputs.end()) {
            return p;
        }
    }
    throw std::out_of_range("factor index out of range");
}

Role SpaceLayout::role_of(FactorIndex f) const {
    const auto &outs = parties_[party_of(f)].outputs;
    return std::find(outs.begin(), outs.end(), f) != outs.end() ? Role::output : Role::input;
}

std::size_t SpaceLayout::find_factor(std::string_view label) const {
    for (std::size_t i = 0; i < factors_.size(); ++i) {
        if (factors_[i].label == label) {
            return i;
        }
    }
    throw std::invalid_argument("no factor labelled '" + std::string(label) + "'");
}

FactorSet SpaceLayout::output_factors() const {
    FactorSet out;
    for (std::size_t i = 0; i < factors_.size(); ++i) {
        if (role_of(i) == Role::output) {
            out.push_back(i);
        }
    }
    return out;
}

FactorSet SpaceLayout::input_factors() const {
    FactorSet out;
    for (std::size_t i = 0; i < factors_.size(); ++i) {
        if (role_of(i) == Role::input) {
            out.push_back(i);
        }
    }
    return out;
}

FactorSet SpaceLayout::party_factors(std::string_view name) const {
    const auto &p = party(name);
    FactorSet out = p.inputs;
    out.insert(out.end(), p.outputs.begin(), p.outputs.end());
    return out;
}

SpaceLayout SpaceLayout::without_party(std::string_view name) const {
    std::size_t drop = party_index(name);
    std::vector<std::size_t> remap(factors_.size(), 0);
    std::vector<Factor> factors;
    for (std::size_t i = 0; i < factors_.size(); ++i) {
        if (party_of(i) != drop) {
            remap[i] = factors.size();
            factors.push_back(factors_[i]);
        }
    }
    std::vector<Party> parties;
    for (std::size_t p = 0; p < parties_.size(); ++p) {
        if (p == drop) {
            continue;
        }
        Party q{parties_[p].name, {}, {}};
        for (FactorIndex f : parties_[p].inputs) {
            q.inputs.push_back(remap[f]);
        }
        for (FactorIndex f : parties_[p].outputs) {
            q.outputs.push_back(remap[f]);
        }
        parties.push_back(std::move(q));
    }
    return SpaceLayout(std::move(factors), std::move(parties));
}

SpaceLayout SpaceLayout::bipartite(std::size_t a_in, std::size_t b_in, std::size_t a_out, std::size_t b_out) {
    return SpaceLayout({{"A_I", a_in}, {"B_I", b_in}, {"A_O", a_out}, {"B_O", b_out}},
                       {{"A", {0}, {2}}, {"B", {1}, {3}}});
}

SpaceLayout SpaceLayout::single_party(std::size_t in, std::size_t out, std::string name) {
    return SpaceLayout({{name + "_I", in}, {name + "_O", out}}, {{name, {0}, {1}}});
}

SpaceLayout SpaceLayout::switch_layout(std::size_t d) {
    return SpaceLayout({{"A_I", d}, {"B_I", d}, {"A_O", d}, {"B_O", d}, {"C_T", d}, {"C_C", 2}},
                       {{"A", {0}, {2}}, {"B", {1}, {3}}, {"C", {4, 5}, {}}});
}

SpaceLayout SpaceLayout::extended_switch_layout(std::size_t d) {
    return SpaceLayout({{"A_I", d}, {"B_I", d}, {"D_I", 2}, {"A_O", d}, {"B_O", d}, {"D_O", 2}, {"C_T", d}, {"C_C", 2}},
                       {{"A", {0}, {3}}, {"B", {1}, {4}}, {"D", {2}, {5}}, {"C", {6, 7}, {}}});
}

std::string to_string(const SpaceLayout &layout) {
    std::ostringstream out;
    for (std::size_t i = 0; i < layout.factor_count(); ++i) {
        if (i) {
            out << ' ';
        }
        out << layout.factors()[i].label << '(' << layout.factors()[i].dim << ')';
    }
    return out.str();
}

FactorSplit::FactorSplit(std::span<const std::size_t> dims, std::span<const FactorIndex> subset) {
    check_factor_list(dims.size(), subset);
    std::vector<std::size_t> strides(dims.size(), 1);
    for (std::size_t k = dims.size(); k-- > 1;) {
        strides[k - 1] = strides[k] * dims[k];
    }
    std::vector<bool> in_subset(dims.size(), false);
    for (FactorIndex f : subset) {
        in_subset[f] = true;
    }
    FactorSet complement;
    for (std::size_t k = 0; k < dims.size(); ++k) {
        if (!in_subset[k]) {
            complement.push_back(k);
        }
    }
    sub = offsets(dims, strides, subset);
    rest = offsets(dims, strides, complement);
}

ComplexMatrix tensor(std::span<const ComplexMatrix> blocks) {
    ComplexMatrix out = ComplexMatrix::Ones(1, 1);
    for (const auto &b : blocks) {
        if (b.rows() != b.cols()) {
            throw std::invalid_argument("tensor: block is not square");
        }
        ComplexMatrix next(out.rows() * b.rows(), out.cols() * b.cols());
        for (Eigen::Index i = 0; i < out.rows(); ++i) {
            for (Eigen::Index j = 0; j < out.cols(); ++j) {
                next.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = out(i, j) * b;
            }
        }
        out = std::move(next);
    }
    return out;
}

ComplexMatrix tensor(std::initializer_list<ComplexMatrix> blocks) {
    return tensor(std::span<const ComplexMatrix>(blocks.begin(), blocks.size()));
}

ComplexVector tensor_vectors(std::span<const ComplexVector> parts) {
    ComplexVector out = ComplexVector::Ones(1);
    for (const auto &v : parts) {
        ComplexVector next(out.size() * v.size());
        for (Eigen::Index i = 0; i < out.size(); ++i) {
            next.segment(i * v.size(), v.size()) = out(i) * v;
        }
        out = std::move(next);
    }
    return out;
}

ComplexVector tensor_vectors(std::initializer_list<ComplexVector> parts) {
    return tensor_vectors(std::span<const ComplexVector>(parts.begin(), parts.size()));
}

ComplexMatrix partial_trace(const ComplexMatrix &m, std::span<const std::size_t> dims,
                            std::span<const FactorIndex> factors) {
    check_square(m, product(dims), "partial_trace");
    FactorSplit split(dims, factors);
    const auto n = static_cast<Eigen::Index>(split.rest.size());
    ComplexMatrix out = ComplexMatrix::Zero(n, n);
    for (Eigen::Index c = 0; c < n; ++c) {
        for (std::size_t s : split.sub) {
            const auto col = static_cast<Eigen::Index>(s + split.rest[c]);
            for (Eigen::Index r = 0; r < n; ++r) {
                out(r, c) += m(static_cast<Eigen::Index>(s + split.rest[r]), col);
            }
        }
    }
    return out;
}

ComplexMatrix partial_trace(const ComplexMatrix &m, const SpaceLayout &layout, std::span<const FactorIndex> factors) {
    auto dims = layout.dims();
    return partial_trace(m, dims, factors);
}

ComplexMatrix partial_transpose(const ComplexMatrix &m, std::span<const std::size_t> dims,
                                std::span<const FactorIndex> factors) {
    check_square(m, product(dims), "partial_transpose");
    FactorSplit split(dims, factors);
    ComplexMatrix out(m.rows(), m.cols());
    for (std::size_t r2 : split.rest) {
        for (std::size_t s2 : split.sub) {
            for (std::size_t r1 : split.rest) {
                for (std::size_t s1 : split.sub) {
                    out(static_cast<Eigen::Index>(s2 + r1), static_cast<Eigen::Index>(s1 + r2)) =
                        m(static_cast<Eigen::Index>(s1 + r1), static_cast<Eigen::Index>(s2 + r2));
                }
            }
        }
    }
    return out;
}

ComplexMatrix partial_transpose(const ComplexMatrix &m, const SpaceLayout &layout,
                                std::span<const FactorIndex> factors) {
    auto dims = layout.dims();
    return partial_transpose(m, dims, factors);
}

ComplexMatrix permute_factors(const ComplexMatrix &m, std::span<const std::size_t> dims,
                              std::span<const FactorIndex> order) {
    check_square(m, product(dims), "permute_factors");
    if (order.size() != dims.size()) {
        throw std::invalid_argument("permute_factors: order must list every factor once");
    }
    FactorSplit split(dims, order);
    const auto n = static_cast<Eigen::Index>(split.sub.size());
    ComplexMatrix out(n, n);
    for (Eigen::Index c = 0; c < n; ++c) {
        for (Eigen::Index r = 0; r < n; ++r) {
            out(r, c) = m(static_cast<Eigen::Index>(split.sub[r]), static_cast<Eigen::Index>(split.sub[c]));
        }
    }
    return out;
}

ComplexMatrix assemble(std::span<const std::size_t> dims, std::span<const Block> blocks) {
    FactorSet order;
    std::vector<ComplexMatrix> ops;
    for (const auto &b : blocks) {
        std::size_t d = 1;
        for (FactorIndex f : b.factors) {
            if (f >= dims.size()) {
                throw std::out_of_range("assemble: factor index out of range");
            }
            d *= dims[f];
        }
        if (b.op.rows() != b.op.cols() || static_cast<std::size_t>(b.op.rows()) != d) {
            throw std::invalid_argument("assemble: block operator does not match its factors");
        }
        order.insert(order.end(), b.factors.begin(), b.factors.end());
        ops.push_back(b.op);
    }
    if (order.size() != dims.size()) {
        throw std::invalid_argument("assemble: blocks must cover every factor exactly once");
    }
    FactorSplit split(dims, order);
    ComplexMatrix t = tensor(ops);
    const auto n = t.rows();
    ComplexMatrix out(n, n);
    for (Eigen::Index c = 0; c < n; ++c) {
        for (Eigen::Index r = 0; r < n; ++r) {
            out(static_cast<Eigen::Index>(split.sub[r]), static_cast<Eigen::Index>(split.sub[c])) = t(r, c);
        }
    }
    return out;
}

ComplexMatrix embed(const ComplexMatrix &op, std::span<const std::size_t> dims, std::span<const FactorIndex> factors) {
    check_factor_list(dims.size(), factors);
    std::vector<Block> blocks{{FactorSet(factors.begin(), factors.end()), op}};
    std::vector<bool> used(dims.size(), false);
    for (FactorIndex f : factors) {
        used[f] = true;
    }
    for (std::size_t k = 0; k < dims.size(); ++k) {
        if (!used[k]) {
            const auto d = static_cast<Eigen::Index>(dims[k]);
            blocks.push_back({{k}, ComplexMatrix::Identity(d, d)});
        }
    }
    return assemble(dims, blocks);
}

ComplexVector assemble_vector(std::span<const std::size_t> dims, std::span<const VectorBlock> blocks) {
    FactorSet order;
    std::vector<ComplexVector> parts;
    for (const auto &b : blocks) {
        std::size_t d = 1;
        for (FactorIndex f : b.factors) {
            if (f >= dims.size()) {
                throw std::out_of_range("assemble_vector: factor index out of range");
            }
            d *= dims[f];
        }
        if (static_cast<std::size_t>(b.vec.size()) != d) {
            throw std::invalid_argument("assemble_vector: block vector does not match its factors");
        }
        order.insert(order.end(), b.factors.begin(), b.factors.end());
        parts.push_back(b.vec);
    }
    if (order.size() != dims.size()) {
        throw std::invalid_argument("assemble_vector: blocks must cover every factor exactly once");
    }
    FactorSplit split(dims, order);
    ComplexVector t = tensor_vectors(parts);
    ComplexVector out(t.size());
    for (Eigen::Index r = 0; r < t.size(); ++r) {
        out(static_cast<Eigen::Index>(split.sub[r])) = t(r);
    }
    return out;
}

ComplexVector identity_ket(std::size_t d) {
    const auto n = static_cast<Eigen::Index>(d);
    ComplexVector v = ComplexVector::Zero(n * n);
    for (Eigen::Index i = 0; i < n; ++i) {
        v(i * n + i) = 1.0;
    }
    return v;
}

ComplexMatrix swap_operator(std::size_t d) {
    const auto n = static_cast<Eigen::Index>(d);
    ComplexMatrix s = ComplexMatrix::Zero(n * n, n * n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            s(j * n + i, i * n + j) = 1.0;
        }
    }
    return s;
}

double max_norm(const ComplexMatrix &m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

bool is_hermitian(const ComplexMatrix &m, double tol) {
    if (m.rows() != m.cols()) {
        return false;
    }
    return max_norm(m - m.adjoint()) <= tol;
}

HermitianEigen eig_hermitian(const ComplexMatrix &m) {
    if (!is_hermitian(m, 1e-10 * std::max(1.0, max_norm(m)))) {
        throw std::invalid_argument("eig_hermitian: matrix is not Hermitian");
    }
    ComplexMatrix h = (m + m.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
    HermitianEigen out;
    out.values = solver.eigenvalues().reverse();
    out.vectors = solver.eigenvectors().rowwise().reverse();
    return out;
}

double min_eigenvalue(const ComplexMatrix &m) {
    if (!is_hermitian(m, 1e-10 * std::max(1.0, max_norm(m)))) {
        throw std::invalid_argument("min_eigenvalue: matrix is not Hermitian");
    }
    const auto n = m.rows();
    if (n == 0) {
        return 0.0;
    }
    if (n > 1024) {
        // Low-rank shortcut: project onto a random range, accept only if the
        // explicit residual shows the range captured all of m.
        const double fro = m.norm();
        std::mt19937_64 rng(0x5eedULL);
        std::normal_distribution<double> gauss;
        for (Eigen::Index k = 8; k < n / 4; k *= 2) {
            ComplexMatrix omega(n, k);
            for (Eigen::Index j = 0; j < k; ++j) {
                for (Eigen::Index i = 0; i < n; ++i) {
                    omega(i, j) = Complex(gauss(rng), gauss(rng));
                }
            }
            ComplexMatrix y = m * omega;
            Eigen::HouseholderQR<ComplexMatrix> qr(y);
            ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(n, k);
            ComplexMatrix b = q.adjoint() * m * q;
            ComplexMatrix qb = q * b;
            double resid2 = 0.0;
            const Eigen::Index chunk = 256;
            for (Eigen::Index c0 = 0; c0 < n; c0 += chunk) {
                const Eigen::Index w = std::min(chunk, n - c0);
                resid2 += (m.middleCols(c0, w) - qb * q.middleRows(c0, w).adjoint()).squaredNorm();
            }
            if (std::sqrt(resid2) <= 1e-12 * std::max(1.0, fro)) {
                b = (b + b.adjoint()).eval() / 2.0;
                Eigen::SelfAdjointEigenSolver<ComplexMatrix> small(b, Eigen::EigenvaluesOnly);
                return std::min(small.eigenvalues().minCoeff(), 0.0);
            }
        }
    }
    ComplexMatrix h = (m + m.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

std::size_t numerical_rank(const ComplexMatrix &m) {
    auto eig = eig_hermitian(m);
    if (eig.values.size() == 0) {
        return 0;
    }
    const double top = eig.values.cwiseAbs().maxCoeff();
    if (top == 0.0) {
        return 0;
    }
    return static_cast<std::size_t>((eig.values.array().abs() > 1e-9 * top).count());
}

ComplexMatrix unitary_from_generator(const ComplexMatrix &h, double lambda) {
    auto eig = eig_hermitian(h);
    ComplexVector phases(eig.values.size());
    for (Eigen::Index i = 0; i < phases.size(); ++i) {
        phases(i) = std::exp(Complex(0.0, -lambda * eig.values(i)));
    }
    return eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
}

RealMatrix real_kernel(const RealMatrix &rows) {
    const auto n = rows.cols();
    if (rows.rows() == 0) {
        return RealMatrix::Identity(n, n);
    }
    Eigen::BDCSVD<RealMatrix> svd(rows, Eigen::ComputeFullV);
    const auto &sv = svd.singularValues();
    const double top = sv.size() ? sv.maxCoeff() : 0.0;
    Eigen::Index rank = 0;
    if (top > 0.0) {
        rank = (sv.array() > 1e-9 * top).count();
    }
    return svd.matrixV().rightCols(n - rank);
}

RealMatrix real_kernel(std::span<const HermOpVector> rows, std::size_t n) {
    RealMatrix stacked(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(n));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (static_cast<std::size_t>(rows[r].coefficients.size()) != n) {
            throw std::invalid_argument("real_kernel: inconsistent row length");
        }
        stacked.row(static_cast<Eigen::Index>(r)) = rows[r].coefficients.transpose();
    }
    return real_kernel(stacked);
}

std::size_t real_rank(const RealMatrix &m) {
    if (m.size() == 0) {
        return 0;
    }
    Eigen::BDCSVD<RealMatrix> svd(m);
    const auto &sv = svd.singularValues();
    const double top = sv.maxCoeff();
    if (top == 0.0) {
        return 0;
    }
    return static_cast<std::size_t>((sv.array() > 1e-9 * top).count());
}

}  // namespace pmx
