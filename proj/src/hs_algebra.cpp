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

#include "pmx/hs_algebra.hpp"

#include <cmath>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <unordered_map>

namespace pmx {

namespace {

// (d^2 x d^2) maps between the pair (a, b) of matrix digits and the local
// basis index alpha. Forward: c_alpha = 1/2 sum_ab (s_alpha)_ba x_ab.
// Inverse: x_ab = sum_alpha c_alpha (s_alpha)_ab.
struct LocalTransform {
    std::size_t d = 1;
    std::vector<Complex> fwd;
    std::vector<Complex> inv;
};

const LocalTransform &local_transform(std::size_t d) {
    static std::mutex mu;
    static std::unordered_map<std::size_t, std::unique_ptr<LocalTransform>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto &slot = cache[d];
    if (!slot) {
        auto basis = build_su_basis(d);
        const std::size_t n = d * d;
        auto t = std::make_unique<LocalTransform>();
        t->d = d;
        t->fwd.assign(n * n, 0.0);
        t->inv.assign(n * n, 0.0);
        for (std::size_t alpha = 0; alpha < n; ++alpha) {
            const auto &s = basis.elements[alpha];
            for (std::size_t a = 0; a < d; ++a) {
                for (std::size_t b = 0; b < d; ++b) {
                    const auto ia = static_cast<Eigen::Index>(a);
                    const auto ib = static_cast<Eigen::Index>(b);
                    t->fwd[alpha * n + a * d + b] = 0.5 * s(ib, ia);
                    t->inv[(a * d + b) * n + alpha] = s(ia, ib);
                }
            }
        }
        slot = std::move(t);
    }
    return *slot;
}

void check_dims(const ComplexMatrix &m, std::span<const std::size_t> dims) {
    std::size_t n = 1;
    for (std::size_t d : dims) {
        n *= d;
    }
    if (m.rows() != m.cols() || static_cast<std::size_t>(m.rows()) != n) {
        throw std::invalid_argument("matrix dimension does not match factor dimensions");
    }
}

// Applies a local (d^2 x d^2) transform to the digit pair of factor k.
void transform_factor(ComplexMatrix &x, std::span<const std::size_t> dims, std::size_t k,
                      const std::vector<Complex> &t) {
    const std::size_t d = dims[k];
    if (d == 1) {
        x *= t[0];
        return;
    }
    const FactorIndex only[] = {k};
    FactorSplit split(dims, only);
    const std::size_t n = d * d;
    std::vector<Complex> v(n), w(n);
    std::vector<Eigen::Index> rows(n), cols(n);
    for (std::size_t a = 0; a < d; ++a) {
        for (std::size_t b = 0; b < d; ++b) {
            rows[a * d + b] = static_cast<Eigen::Index>(split.sub[a]);
            cols[a * d + b] = static_cast<Eigen::Index>(split.sub[b]);
        }
    }
    for (std::size_t rj : split.rest) {
        for (std::size_t ri : split.rest) {
            for (std::size_t q = 0; q < n; ++q) {
                v[q] = x(static_cast<Eigen::Index>(ri) + rows[q], static_cast<Eigen::Index>(rj) + cols[q]);
            }
            for (std::size_t p = 0; p < n; ++p) {
                Complex acc = 0.0;
                const Complex *row = &t[p * n];
                for (std::size_t q = 0; q < n; ++q) {
                    acc += row[q] * v[q];
                }
                w[p] = acc;
            }
            for (std::size_t q = 0; q < n; ++q) {
                x(static_cast<Eigen::Index>(ri) + rows[q], static_cast<Eigen::Index>(rj) + cols[q]) = w[q];
            }
        }
    }
}

void forward_all(ComplexMatrix &x, std::span<const std::size_t> dims) {
    for (std::size_t k = 0; k < dims.size(); ++k) {
        transform_factor(x, dims, k, local_transform(dims[k]).fwd);
    }
}

void inverse_all(ComplexMatrix &x, std::span<const std::size_t> dims) {
    for (std::size_t k = 0; k < dims.size(); ++k) {
        transform_factor(x, dims, k, local_transform(dims[k]).inv);
    }
}

// In-place split of factor k into its trivial part, stored at digit pair
// (0, 0), and a traceless remainder: the diagonal entries j >= 1 hold
// x_jj - tr/d and off-diagonal entries are unchanged. A term sits at a
// position whose digit pair is nonzero exactly when it is nontrivial on k.
void trivial_split(ComplexMatrix &x, std::span<const std::size_t> dims, std::size_t k, bool inverse) {
    const std::size_t d = dims[k];
    if (d == 1) {
        return;
    }
    const FactorIndex only[] = {k};
    FactorSplit split(dims, only);
    const auto n = static_cast<std::size_t>(x.rows());
    Complex *data = x.data();
    const double inv_d = 1.0 / static_cast<double>(d);
    for (std::size_t rj : split.rest) {
        for (std::size_t ri : split.rest) {
            auto at = [&](std::size_t j) -> Complex & { return data[ri + split.sub[j] + (rj + split.sub[j]) * n]; };
            if (!inverse) {
                Complex tr = 0.0;
                for (std::size_t j = 0; j < d; ++j) {
                    tr += at(j);
                }
                const Complex mean = tr * inv_d;
                at(0) = mean;
                for (std::size_t j = 1; j < d; ++j) {
                    at(j) -= mean;
                }
            } else {
                const Complex mean = at(0);
                Complex rest = 0.0;
                for (std::size_t j = 1; j < d; ++j) {
                    rest += at(j);
                    at(j) += mean;
                }
                at(0) = mean - rest;
            }
        }
    }
}

// Matrix position (row, col) holding the coefficient of term t after the
// forward transform.
std::pair<Eigen::Index, Eigen::Index> coefficient_position(const TermPattern &t, std::span<const std::size_t> dims) {
    std::size_t row = 0, col = 0;
    for (std::size_t k = 0; k < dims.size(); ++k) {
        row = row * dims[k] + t[k] / dims[k];
        col = col * dims[k] + t[k] % dims[k];
    }
    return {static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)};
}

void check_pattern(const TermPattern &t, std::span<const std::size_t> dims) {
    if (t.size() != dims.size()) {
        throw std::invalid_argument("term pattern length does not match factor count");
    }
    for (std::size_t k = 0; k < dims.size(); ++k) {
        if (t[k] >= dims[k] * dims[k]) {
            throw std::out_of_range("term pattern index out of range");
        }
    }
}

}  // namespace

SuBasis build_su_basis(std::size_t d) {
    if (d == 0) {
        throw std::invalid_argument("build_su_basis: d must be at least 1");
    }
    const auto n = static_cast<Eigen::Index>(d);
    SuBasis basis;
    basis.d = d;
    basis.elements.push_back(std::sqrt(2.0 / static_cast<double>(d)) * ComplexMatrix::Identity(n, n));
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index k = j + 1; k < n; ++k) {
            ComplexMatrix s = ComplexMatrix::Zero(n, n);
            s(j, k) = 1.0;
            s(k, j) = 1.0;
            basis.elements.push_back(s);
        }
    }
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index k = j + 1; k < n; ++k) {
            ComplexMatrix s = ComplexMatrix::Zero(n, n);
            s(j, k) = Complex(0.0, -1.0);
            s(k, j) = Complex(0.0, 1.0);
            basis.elements.push_back(s);
        }
    }
    for (Eigen::Index l = 1; l < n; ++l) {
        ComplexMatrix s = ComplexMatrix::Zero(n, n);
        const double scale = std::sqrt(2.0 / static_cast<double>(l * (l + 1)));
        for (Eigen::Index m = 0; m < l; ++m) {
            s(m, m) = scale;
        }
        s(l, l) = -scale * static_cast<double>(l);
        basis.elements.push_back(s);
    }
    return basis;
}

StructureTensors structure_constants(const SuBasis &basis) {
    const std::size_t n = basis.elements.size();
    StructureTensors out;
    out.n = n;
    out.f.assign(n * n * n, 0.0);
    out.dsym.assign(n * n * n, 0.0);
    for (std::size_t a = 1; a < n; ++a) {
        for (std::size_t b = 1; b < n; ++b) {
            ComplexMatrix ab = basis.elements[a] * basis.elements[b];
            ComplexMatrix ba = basis.elements[b] * basis.elements[a];
            ComplexMatrix comm = ab - ba;
            ComplexMatrix anti = ab + ba;
            for (std::size_t c = 1; c < n; ++c) {
                Complex tc = (comm * basis.elements[c]).trace();
                Complex ta = (anti * basis.elements[c]).trace();
                out.f[(a * n + b) * n + c] = (tc / Complex(0.0, 4.0)).real();
                out.dsym[(a * n + b) * n + c] = ta.real() / 4.0;
            }
        }
    }
    return out;
}

std::vector<Complex> triple_traces(const SuBasis &basis) {
    const std::size_t n = basis.elements.size();
    std::vector<Complex> out(n * n * n);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            ComplexMatrix ab = basis.elements[a] * basis.elements[b];
            for (std::size_t c = 0; c < n; ++c) {
                out[(a * n + b) * n + c] = (ab * basis.elements[c]).trace();
            }
        }
    }
    return out;
}

std::size_t term_count(std::span<const std::size_t> dims) {
    std::size_t n = 1;
    for (std::size_t d : dims) {
        n *= d * d;
    }
    return n;
}

std::size_t term_index(const TermPattern &t, std::span<const std::size_t> dims) {
    check_pattern(t, dims);
    std::size_t p = 0;
    for (std::size_t k = 0; k < dims.size(); ++k) {
        p = p * dims[k] * dims[k] + t[k];
    }
    return p;
}

TermPattern term_pattern(std::size_t index, std::span<const std::size_t> dims) {
    if (index >= term_count(dims)) {
        throw std::out_of_range("term index out of range");
    }
    TermPattern t(dims.size());
    for (std::size_t k = dims.size(); k-- > 0;) {
        const std::size_t n = dims[k] * dims[k];
        t[k] = index % n;
        index /= n;
    }
    return t;
}

unsigned long term_mask(const TermPattern &t) {
    unsigned long mask = 0;
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (t[k] != 0) {
            mask |= 1UL << k;
        }
    }
    return mask;
}

std::string term_name(const TermPattern &t, std::span<const std::size_t> dims) {
    check_pattern(t, dims);
    std::string out;
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (dims[k] == 2) {
            out += "0xyz"[t[k]];
        } else {
            out += '[' + std::to_string(t[k]) + ']';
        }
    }
    return out;
}

ComplexMatrix term_operator(const TermPattern &t, std::span<const std::size_t> dims) {
    check_pattern(t, dims);
    std::vector<ComplexMatrix> blocks;
    blocks.reserve(t.size());
    for (std::size_t k = 0; k < t.size(); ++k) {
        blocks.push_back(build_su_basis(dims[k]).elements[t[k]]);
    }
    return tensor(blocks);
}

HermOpVector to_hs_vector(const ComplexMatrix &m, std::span<const std::size_t> dims) {
    check_dims(m, dims);
    if (!is_hermitian(m, 1e-10 * std::max(1.0, max_norm(m)))) {
        throw std::invalid_argument("to_hs_vector: matrix is not Hermitian");
    }
    ComplexMatrix x = m;
    forward_all(x, dims);
    const std::size_t n = term_count(dims);
    HermOpVector out{RealVector(static_cast<Eigen::Index>(n))};
    for (std::size_t p = 0; p < n; ++p) {
        auto [r, c] = coefficient_position(term_pattern(p, dims), dims);
        out.coefficients(static_cast<Eigen::Index>(p)) = x(r, c).real();
    }
    return out;
}

ComplexMatrix from_hs_vector(const HermOpVector &v, std::span<const std::size_t> dims) {
    const std::size_t n = term_count(dims);
    if (static_cast<std::size_t>(v.coefficients.size()) != n) {
        throw std::invalid_argument("from_hs_vector: coefficient count does not match factor dimensions");
    }
    std::size_t dim = 1;
    for (std::size_t d : dims) {
        dim *= d;
    }
    const auto nd = static_cast<Eigen::Index>(dim);
    ComplexMatrix x = ComplexMatrix::Zero(nd, nd);
    for (std::size_t p = 0; p < n; ++p) {
        auto [r, c] = coefficient_position(term_pattern(p, dims), dims);
        x(r, c) = v.coefficients(static_cast<Eigen::Index>(p));
    }
    inverse_all(x, dims);
    return x;
}

TermCoefficients hs_decompose(const ComplexMatrix &m, const SpaceLayout &layout) {
    auto dims = layout.dims();
    auto v = to_hs_vector(m, dims);
    TermCoefficients out;
    for (Eigen::Index p = 0; p < v.coefficients.size(); ++p) {
        const double c = v.coefficients(p);
        if (std::abs(c) > 1e-12) {
            out.emplace(term_pattern(static_cast<std::size_t>(p), dims), c);
        }
    }
    return out;
}

ComplexMatrix hs_recompose(const TermCoefficients &coeffs, const SpaceLayout &layout) {
    auto dims = layout.dims();
    HermOpVector v{RealVector::Zero(static_cast<Eigen::Index>(term_count(dims)))};
    for (const auto &[t, c] : coeffs) {
        v.coefficients(static_cast<Eigen::Index>(term_index(t, dims))) += c;
    }
    return from_hs_vector(v, dims);
}

ComplexMatrix scale_terms(const ComplexMatrix &m, std::span<const std::size_t> dims, std::span<const double> weights) {
    check_dims(m, dims);
    if (dims.size() > 24) {
        throw SizeError("scale_terms: too many factors");
    }
    if (weights.size() != (std::size_t{1} << dims.size())) {
        throw std::invalid_argument("scale_terms: weight table must have 2^(factor count) entries");
    }
    // Bit k of rowmask[i] is set iff digit k of i is nonzero; a term is
    // nontrivial on factor k iff either its row or column digit is.
    const auto n = m.rows();
    std::vector<unsigned long> rowmask(static_cast<std::size_t>(n), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
        std::size_t rem = static_cast<std::size_t>(i);
        unsigned long mask = 0;
        for (std::size_t k = dims.size(); k-- > 0;) {
            if (rem % dims[k] != 0) {
                mask |= 1UL << k;
            }
            rem /= dims[k];
        }
        rowmask[static_cast<std::size_t>(i)] = mask;
    }
    ComplexMatrix x = m;
    for (std::size_t k = 0; k < dims.size(); ++k) {
        trivial_split(x, dims, k, false);
    }
    for (Eigen::Index c = 0; c < n; ++c) {
        const unsigned long cm = rowmask[static_cast<std::size_t>(c)];
        for (Eigen::Index r = 0; r < n; ++r) {
            x(r, c) *= weights[rowmask[static_cast<std::size_t>(r)] | cm];
        }
    }
    for (std::size_t k = 0; k < dims.size(); ++k) {
        trivial_split(x, dims, k, true);
    }
    return x;
}

}  // namespace pmx
