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

#include "pmx/rigidity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <sstream>

namespace pmx {

namespace {

struct Candidate {
    std::size_t a;
    Complex left;   // Tr(s_a s_b s_c)
    Complex right;  // Tr(s_b s_a s_c)
};

// For each local dimension, the nonzero triple traces around (b, c).
class TripleTable {
   public:
    explicit TripleTable(std::size_t d) : n_(d * d), cand_(n_ * n_) {
        auto tau = triple_traces(build_su_basis(d));
        for (std::size_t b = 0; b < n_; ++b) {
            for (std::size_t c = 0; c < n_; ++c) {
                for (std::size_t a = 0; a < n_; ++a) {
                    Complex l = tau[(a * n_ + b) * n_ + c];
                    Complex r = tau[(b * n_ + a) * n_ + c];
                    if (std::abs(l) > 1e-12 || std::abs(r) > 1e-12) {
                        cand_[b * n_ + c].push_back({a, l, r});
                    }
                }
            }
        }
    }

    const std::vector<Candidate> &at(std::size_t b, std::size_t c) const {
        return cand_[b * n_ + c];
    }

   private:
    std::size_t n_;
    std::vector<std::vector<Candidate>> cand_;
};

using SparseRow = std::vector<std::pair<std::size_t, double>>;

void expand(const std::vector<const std::vector<Candidate> *> &lists, std::span<const std::size_t> dims, std::size_t k,
            std::size_t index, Complex left, Complex right, std::map<std::size_t, double> &acc) {
    if (k == lists.size()) {
        const double v = (left - right).imag();
        if (index != 0 && std::abs(v) > 1e-12) {
            acc[index - 1] += v;
        }
        return;
    }
    for (const auto &c : *lists[k]) {
        expand(lists, dims, k + 1, index * dims[k] * dims[k] + c.a, left * c.left, right * c.right, acc);
    }
}

// Scale so the largest entry is 1 and the first nonzero entry is positive.
std::vector<long long> row_key(SparseRow &row) {
    double big = 0.0;
    for (const auto &e : row) {
        big = std::max(big, std::abs(e.second));
    }
    const double sign = row.front().second < 0 ? -1.0 : 1.0;
    std::vector<long long> key;
    for (auto &e : row) {
        e.second *= sign / big;
        key.push_back(static_cast<long long>(e.first));
        key.push_back(std::llround(e.second * 1e9));
    }
    return key;
}

std::vector<ProcessMatrix> spot_processes(const SpaceLayout &layout, std::mt19937_64 &rng) {
    std::vector<ProcessMatrix> out;
    if (layout == SpaceLayout::bipartite()) {
        const ComplexMatrix id2 = ComplexMatrix::Identity(2, 2);
        ComplexMatrix ket0 = ComplexMatrix::Zero(2, 2);
        ket0(0, 0) = 1.0;
        const ComplexVector one = identity_ket(2);
        out.push_back(w_ocb());
        out.push_back(channel(Direction::a_to_b, ket0, one * one.adjoint()));
        out.push_back(channel(Direction::b_to_a, id2 / 2.0, ComplexMatrix::Identity(4, 4) / 2.0));
        out.push_back(shared_state(ComplexMatrix::Identity(4, 4) / 4.0));
        return out;
    }
    for (int i = 0; i < 3; ++i) {
        out.push_back(random_valid_process(layout, rng));
    }
    return out;
}

}  // namespace

ConstraintSystem build_constraints(const SpaceLayout &layout) {
    if (layout.total_dim() > kMaxRigidityDim) {
        throw SizeError("build_constraints: total dimension " + std::to_string(layout.total_dim()) + " exceeds " +
                        std::to_string(kMaxRigidityDim));
    }
    ConstraintSystem sys;
    sys.layout = layout;
    const auto dims = layout.dims();
    const std::size_t nterms = term_count(dims);
    for (std::size_t p = 0; p < nterms; ++p) {
        TermPattern t = term_pattern(p, dims);
        (classify_term(t, layout) == TermClass::allowed ? sys.valid_terms : sys.forbidden_terms)
            .push_back(std::move(t));
    }
    sys.pair_count = sys.valid_terms.size() * sys.forbidden_terms.size();

    std::map<std::size_t, TripleTable> tables;
    for (std::size_t d : dims) {
        tables.try_emplace(d, d);
    }
    std::map<std::vector<long long>, SparseRow> distinct;
    std::vector<const std::vector<Candidate> *> lists(dims.size());
    for (const auto &t : sys.valid_terms) {
        for (const auto &f : sys.forbidden_terms) {
            for (std::size_t k = 0; k < dims.size(); ++k) {
                lists[k] = &tables.at(dims[k]).at(t[k], f[k]);
            }
            std::map<std::size_t, double> acc;
            expand(lists, dims, 0, 0, 1.0, 1.0, acc);
            SparseRow row;
            for (const auto &[c, v] : acc) {
                if (std::abs(v) > 1e-12) {
                    row.emplace_back(c, v);
                }
            }
            if (row.empty()) {
                continue;
            }
            auto key = row_key(row);
            distinct.try_emplace(std::move(key), std::move(row));
        }
    }
    sys.rows = RealMatrix::Zero(static_cast<Eigen::Index>(distinct.size()), static_cast<Eigen::Index>(nterms - 1));
    Eigen::Index r = 0;
    for (const auto &[key, row] : distinct) {
        for (const auto &[c, v] : row) {
            sys.rows(r, static_cast<Eigen::Index>(c)) = v;
        }
        ++r;
    }
    return sys;
}

RealMatrix generator_kernel(const ConstraintSystem &system) {
    return real_kernel(system.rows);
}

RealMatrix single_body_basis(const SpaceLayout &layout) {
    const auto dims = layout.dims();
    const std::size_t nterms = term_count(dims);
    std::vector<std::size_t> cols;
    for (std::size_t p = 1; p < nterms; ++p) {
        const unsigned long m = term_mask(term_pattern(p, dims));
        if ((m & (m - 1)) == 0) {
            cols.push_back(p - 1);
        }
    }
    RealMatrix s = RealMatrix::Zero(static_cast<Eigen::Index>(nterms - 1), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) {
        s(static_cast<Eigen::Index>(cols[j]), static_cast<Eigen::Index>(j)) = 1.0;
    }
    return s;
}

ComplexMatrix generator_operator(const RealVector &x, const SpaceLayout &layout) {
    const auto dims = layout.dims();
    const std::size_t nterms = term_count(dims);
    if (static_cast<std::size_t>(x.size()) != nterms - 1) {
        throw std::invalid_argument("generator_operator: coordinate count does not match layout");
    }
    HermOpVector v{RealVector::Zero(static_cast<Eigen::Index>(nterms))};
    v.coefficients.tail(static_cast<Eigen::Index>(nterms - 1)) = x;
    return from_hs_vector(v, dims);
}

bool RigidityReport::passed() const {
    return kernel_dim == single_body_dim && single_body_in_kernel <= 1e-8 && kernel_in_single_body <= 1e-8 &&
           soundness_residual <= 1e-9 && spot_failures == 0 && spot_checks > 0;
}

RigidityReport verify_rigidity(const SpaceLayout &layout, std::uint64_t seed) {
    RigidityReport rep;
    rep.layout = to_string(layout);
    ConstraintSystem sys = build_constraints(layout);
    rep.valid_terms = sys.valid_terms.size();
    rep.forbidden_terms = sys.forbidden_terms.size();
    rep.pair_count = sys.pair_count;
    rep.row_count = static_cast<std::size_t>(sys.rows.rows());

    RealMatrix k = generator_kernel(sys);
    RealMatrix s = single_body_basis(layout);
    rep.kernel_dim = static_cast<std::size_t>(k.cols());
    rep.single_body_dim = static_cast<std::size_t>(s.cols());
    auto max_abs = [](const RealMatrix &m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; };
    rep.single_body_in_kernel = max_abs(s - k * (k.transpose() * s));
    rep.kernel_in_single_body = max_abs(k - s * (s.transpose() * k));

    const auto dims = layout.dims();
    auto p = TermProjector::valid_subspace(layout);
    std::vector<ComplexMatrix> allowed;
    for (const auto &t : sys.valid_terms) {
        allowed.push_back(term_operator(t, dims));
    }
    for (Eigen::Index c = 0; c < k.cols(); ++c) {
        ComplexMatrix h = generator_operator(k.col(c), layout);
        for (const auto &t : allowed) {
            ComplexMatrix comm = h * t - t * h;
            rep.soundness_residual = std::max(rep.soundness_residual, max_norm(p(comm) - comm));
        }
    }

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    auto processes = spot_processes(layout, rng);
    for (int trial = 0; trial < 5 && k.cols() > 0; ++trial) {
        RealVector coeffs(k.cols());
        for (Eigen::Index i = 0; i < coeffs.size(); ++i) {
            coeffs(i) = gauss(rng);
        }
        RealVector x = k * coeffs.normalized();
        ComplexMatrix h = generator_operator(x, layout);
        for (double lambda : {0.3, 1.0}) {
            ComplexMatrix u = unitary_from_generator(h, lambda);
            for (const auto &w : processes) {
                ComplexMatrix m = u * w.matrix() * u.adjoint();
                ++rep.spot_checks;
                if (!validate(ProcessMatrix(layout, (m + m.adjoint()) / 2.0)).valid()) {
                    ++rep.spot_failures;
                }
            }
        }
    }
    return rep;
}

std::string format_report(const RigidityReport &r) {
    std::ostringstream out;
    char buf[64];
    out << "layout=" << r.layout << '\n';
    out << "valid_terms=" << r.valid_terms << " forbidden_terms=" << r.forbidden_terms << " pairs=" << r.pair_count
        << " distinct_rows=" << r.row_count << '\n';
    std::snprintf(buf, sizeof buf, "%.3e", std::max(r.single_body_in_kernel, r.kernel_in_single_body));
    out << "projection_residual=" << buf << '\n';
    std::snprintf(buf, sizeof buf, "%.3e", r.soundness_residual);
    out << "soundness_residual=" << buf << '\n';
    out << "spot_checks=" << r.spot_checks << " spot_failures=" << r.spot_failures << '\n';
    out << "kernel_dim=" << r.kernel_dim << " expected=" << r.single_body_dim << ' ' << (r.passed() ? "PASS" : "FAIL")
        << '\n';
    return out.str();
}

}  // namespace pmx
