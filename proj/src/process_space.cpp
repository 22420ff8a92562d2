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

#include "pmx/process_space.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace pmx {

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

ComplexMatrix pauli(char which) {
    ComplexMatrix s = ComplexMatrix::Zero(2, 2);
    switch (which) {
        case 'x':
            s(0, 1) = 1.0;
            s(1, 0) = 1.0;
            break;
        case 'y':
            s(0, 1) = Complex(0.0, -1.0);
            s(1, 0) = Complex(0.0, 1.0);
            break;
        case 'z':
            s(0, 0) = 1.0;
            s(1, 1) = -1.0;
            break;
        default:
            s = ComplexMatrix::Identity(2, 2);
    }
    return s;
}

unsigned long factor_bits(const FactorSet &fs) {
    unsigned long m = 0;
    for (FactorIndex f : fs) {
        m |= 1UL << f;
    }
    return m;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

}  // namespace

TermClass classify_mask(unsigned long mask, const SpaceLayout &layout) {
    bool touches_output = false;
    bool every_touched_party_on_output = true;
    for (const auto &party : layout.parties()) {
        const unsigned long in = factor_bits(party.inputs);
        const unsigned long out = factor_bits(party.outputs);
        const bool on_out = (mask & out) != 0;
        const bool touched = (mask & (in | out)) != 0;
        touches_output = touches_output || on_out;
        if (touched && !on_out) {
            every_touched_party_on_output = false;
        }
    }
    return touches_output && every_touched_party_on_output ? TermClass::forbidden : TermClass::allowed;
}

TermClass classify_term(const TermPattern &t, const SpaceLayout &layout) {
    auto dims = layout.dims();
    if (t.size() != dims.size()) {
        throw std::invalid_argument("classify_term: pattern length does not match factor count");
    }
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (t[k] >= dims[k] * dims[k]) {
            throw std::out_of_range("classify_term: pattern index out of range");
        }
    }
    return classify_mask(term_mask(t), layout);
}

TermProjector::TermProjector(std::vector<std::size_t> dims, std::vector<double> weights)
    : dims_(std::move(dims)), weights_(std::move(weights)) {
    if (dims_.size() > 24) {
        throw SizeError("TermProjector: too many factors");
    }
    if (weights_.size() != (std::size_t{1} << dims_.size())) {
        throw std::invalid_argument("TermProjector: weight table must have 2^(factor count) entries");
    }
}

TermProjector TermProjector::identity(std::vector<std::size_t> dims) {
    const std::size_t n = std::size_t{1} << dims.size();
    return TermProjector(std::move(dims), std::vector<double>(n, 1.0));
}

TermProjector TermProjector::valid_subspace(const SpaceLayout &layout) {
    if (layout.factor_count() > 24) {
        throw SizeError("valid_subspace: too many factors");
    }
    const std::size_t n = std::size_t{1} << layout.factor_count();
    std::vector<double> w(n);
    for (std::size_t m = 0; m < n; ++m) {
        w[m] = classify_mask(m, layout) == TermClass::allowed ? 1.0 : 0.0;
    }
    return TermProjector(layout.dims(), std::move(w));
}

std::size_t TermProjector::dim() const {
    std::size_t n = 1;
    for (std::size_t d : dims_) {
        n *= d;
    }
    return n;
}

ComplexMatrix TermProjector::apply(const ComplexMatrix &m) const {
    if (std::all_of(weights_.begin(), weights_.end(), [](double w) { return w == 1.0; })) {
        if (m.rows() != m.cols() || static_cast<std::size_t>(m.rows()) != dim()) {
            throw std::invalid_argument("TermProjector: matrix dimension mismatch");
        }
        return m;
    }
    return scale_terms(m, dims_, weights_);
}

TermProjector TermProjector::tensor(const TermProjector &other) const {
    std::vector<std::size_t> dims = dims_;
    dims.insert(dims.end(), other.dims_.begin(), other.dims_.end());
    if (dims.size() > 24) {
        throw SizeError("TermProjector: too many factors");
    }
    const std::size_t n1 = dims_.size();
    const std::size_t low = (std::size_t{1} << n1) - 1;
    std::vector<double> w(std::size_t{1} << dims.size());
    for (std::size_t m = 0; m < w.size(); ++m) {
        w[m] = weights_[m & low] * other.weights_[m >> n1];
    }
    return TermProjector(std::move(dims), std::move(w));
}

TermProjector TermProjector::operator+(const TermProjector &o) const {
    if (dims_ != o.dims_) {
        throw std::invalid_argument("TermProjector: dimension mismatch");
    }
    std::vector<double> w(weights_.size());
    for (std::size_t m = 0; m < w.size(); ++m) {
        w[m] = weights_[m] + o.weights_[m];
    }
    return TermProjector(dims_, std::move(w));
}

TermProjector TermProjector::operator-(const TermProjector &o) const {
    if (dims_ != o.dims_) {
        throw std::invalid_argument("TermProjector: dimension mismatch");
    }
    std::vector<double> w(weights_.size());
    for (std::size_t m = 0; m < w.size(); ++m) {
        w[m] = weights_[m] - o.weights_[m];
    }
    return TermProjector(dims_, std::move(w));
}

ProcessMatrix::ProcessMatrix(SpaceLayout layout, ComplexMatrix matrix)
    : layout_(std::move(layout)), matrix_(std::move(matrix)) {
    if (matrix_.rows() != matrix_.cols() || static_cast<std::size_t>(matrix_.rows()) != layout_.total_dim()) {
        throw std::invalid_argument("ProcessMatrix: matrix dimension does not match layout");
    }
    if (!is_hermitian(matrix_, 1e-9 * std::max(1.0, max_norm(matrix_)))) {
        throw std::invalid_argument("ProcessMatrix: matrix is not Hermitian");
    }
}

bool ValidationReport::valid() const {
    return std::all_of(checks.begin(), checks.end(), [](const ConditionCheck &c) { return c.passed || !c.required; });
}

const ConditionCheck &ValidationReport::check(std::string_view name) const {
    for (const auto &c : checks) {
        if (c.name == name) {
            return c;
        }
    }
    throw std::out_of_range("no check named '" + std::string(name) + "'");
}

std::vector<std::string> ValidationReport::failed() const {
    std::vector<std::string> out;
    for (const auto &c : checks) {
        if (!c.passed && c.required) {
            out.push_back(c.name);
        }
    }
    return out;
}

std::string format_report(const ValidationReport &report) {
    std::ostringstream out;
    for (const auto &c : report.checks) {
        out << c.name << " residual=" << fmt(c.residual) << " tolerance=" << fmt(c.tolerance) << ' '
            << (c.passed ? "PASS" : "FAIL");
        if (!c.required) {
            out << " (info)";
        }
        out << '\n';
    }
    out << "verdict=" << (report.valid() ? "valid" : "invalid") << '\n';
    return out.str();
}

ProcessMatrix project_valid(const ProcessMatrix &w) {
    auto p = TermProjector::valid_subspace(w.layout());
    ComplexMatrix m = p(w.matrix());
    m = (m + m.adjoint()).eval() / 2.0;
    return ProcessMatrix(w.layout(), std::move(m));
}

ValidationReport validate(const ProcessMatrix &w) {
    const double tol = tolerance();
    const ComplexMatrix &m = w.matrix();
    const double tr = m.trace().real();
    const double d_o = static_cast<double>(w.layout().output_dim());
    ValidationReport report;

    const double lmin = min_eigenvalue(m);
    const double pos_tol = tol * std::max(std::abs(tr), 1.0);
    report.checks.push_back({"positivity", lmin >= -pos_tol, std::max(0.0, -lmin), pos_tol, true});

    const double tr_res = std::abs(tr - d_o);
    const double tr_tol = tol * std::max(1.0, d_o);
    report.checks.push_back({"trace", tr_res <= tr_tol, tr_res, tr_tol, true});

    auto p = TermProjector::valid_subspace(w.layout());
    const double sub_res = max_norm(p(m) - m);
    const double sub_tol = tol * std::max(1.0, max_norm(m));
    report.checks.push_back({"subspace", sub_res <= sub_tol, sub_res, sub_tol, true});
    return report;
}

ValidationReport validate_instrument(const Instrument &inst, const SpaceLayout &layout) {
    const double tol = tolerance();
    const Party &party = layout.party(inst.party);
    auto dims = layout.dims();
    std::vector<std::size_t> local;
    for (FactorIndex f : party.inputs) {
        local.push_back(dims[f]);
    }
    const std::size_t n_in = party.inputs.size();
    for (FactorIndex f : party.outputs) {
        local.push_back(dims[f]);
    }
    std::size_t dim = 1, d_in = 1;
    for (std::size_t k = 0; k < local.size(); ++k) {
        dim *= local[k];
        if (k < n_in) {
            d_in *= local[k];
        }
    }
    ValidationReport report;
    if (inst.cj_elements.empty()) {
        report.checks.push_back({"elements", false, 1.0, 0.0, true});
        return report;
    }
    const auto nd = static_cast<Eigen::Index>(dim);
    ComplexMatrix sum = ComplexMatrix::Zero(nd, nd);
    double worst = 0.0;
    for (const auto &c : inst.cj_elements) {
        if (c.rows() != nd || c.cols() != nd) {
            throw std::invalid_argument("instrument element dimension does not match party '" + inst.party + "'");
        }
        worst = std::max(worst, -min_eigenvalue(c));
        sum += c;
    }
    report.checks.push_back(
        {"positivity", worst <= tol * std::max(1.0, max_norm(sum)), std::max(0.0, worst), tol, true});
    FactorSet outs;
    for (std::size_t k = n_in; k < local.size(); ++k) {
        outs.push_back(k);
    }
    const auto di = static_cast<Eigen::Index>(d_in);
    const double tp = max_norm(partial_trace(sum, local, outs) - ComplexMatrix::Identity(di, di));
    report.checks.push_back({"trace_preserving", tp <= tol, tp, tol, true});
    return report;
}

double ProbabilityTable::at(std::span<const std::size_t> outcome) const {
    if (outcome.size() != shape.size()) {
        throw std::invalid_argument("ProbabilityTable: outcome has wrong length");
    }
    std::size_t idx = 0;
    for (std::size_t k = 0; k < shape.size(); ++k) {
        if (outcome[k] >= shape[k]) {
            throw std::out_of_range("ProbabilityTable: outcome out of range");
        }
        idx = idx * shape[k] + outcome[k];
    }
    return p[idx];
}

double ProbabilityTable::total() const {
    double s = 0.0;
    for (double v : p) {
        s += v;
    }
    return s;
}

ProbabilityTable born_probabilities(const ProcessMatrix &w, std::span<const Instrument> instruments) {
    const SpaceLayout &layout = w.layout();
    const auto &parties = layout.parties();
    if (instruments.size() != parties.size()) {
        throw std::invalid_argument("born_probabilities: need exactly one instrument per party");
    }
    std::vector<const Instrument *> ordered(parties.size(), nullptr);
    for (const auto &inst : instruments) {
        const std::size_t p = layout.party_index(inst.party);
        if (ordered[p] != nullptr) {
            throw std::invalid_argument("born_probabilities: two instruments for party '" + inst.party + "'");
        }
        if (inst.cj_elements.empty()) {
            throw std::invalid_argument("born_probabilities: instrument for '" + inst.party + "' has no elements");
        }
        ordered[p] = &inst;
    }
    auto dims = layout.dims();
    ProbabilityTable table;
    std::size_t combos = 1;
    for (std::size_t p = 0; p < parties.size(); ++p) {
        table.parties.push_back(parties[p].name);
        table.shape.push_back(ordered[p]->cj_elements.size());
        combos *= ordered[p]->cj_elements.size();
        std::size_t d = 1;
        for (FactorIndex f : layout.party_factors(parties[p].name)) {
            d *= dims[f];
        }
        for (const auto &c : ordered[p]->cj_elements) {
            if (static_cast<std::size_t>(c.rows()) != d || c.rows() != c.cols()) {
                throw std::invalid_argument("born_probabilities: element size does not match party '" +
                                            parties[p].name + "'");
            }
        }
    }
    if (!validate(w).valid()) {
        table.warnings.push_back("process matrix fails validation; probabilities may be meaningless");
    }
    const ComplexMatrix wt = w.matrix().transpose();
    std::vector<std::size_t> idx(parties.size(), 0);
    table.p.reserve(combos);
    for (std::size_t c = 0; c < combos; ++c) {
        std::vector<Block> blocks;
        for (std::size_t p = 0; p < parties.size(); ++p) {
            blocks.push_back({layout.party_factors(parties[p].name), ordered[p]->cj_elements[idx[p]]});
        }
        ComplexMatrix x = assemble(dims, blocks);
        table.p.push_back(wt.cwiseProduct(x).sum().real());
        for (std::size_t p = parties.size(); p-- > 0;) {
            if (++idx[p] < table.shape[p]) {
                break;
            }
            idx[p] = 0;
        }
    }
    return table;
}

ComplexMatrix cj_of_map(const ComplexMatrix &superop, std::size_t d_in, std::size_t d_out) {
    const auto di = static_cast<Eigen::Index>(d_in);
    const auto dout = static_cast<Eigen::Index>(d_out);
    if (superop.rows() != dout * dout || superop.cols() != di * di) {
        throw std::invalid_argument("cj_of_map: superoperator shape does not match dimensions");
    }
    ComplexMatrix c(di * dout, di * dout);
    for (Eigen::Index i = 0; i < di; ++i) {
        for (Eigen::Index j = 0; j < di; ++j) {
            for (Eigen::Index k = 0; k < dout; ++k) {
                for (Eigen::Index l = 0; l < dout; ++l) {
                    c(i * dout + k, j * dout + l) = superop(k * dout + l, i * di + j);
                }
            }
        }
    }
    return c;
}

ComplexMatrix cj_of_kraus(std::span<const ComplexMatrix> kraus) {
    if (kraus.empty()) {
        throw std::invalid_argument("cj_of_kraus: no Kraus operators");
    }
    const auto dout = kraus[0].rows();
    const auto di = kraus[0].cols();
    ComplexMatrix c = ComplexMatrix::Zero(di * dout, di * dout);
    for (const auto &k : kraus) {
        if (k.rows() != dout || k.cols() != di) {
            throw std::invalid_argument("cj_of_kraus: Kraus operators differ in shape");
        }
        ComplexVector v(di * dout);
        for (Eigen::Index i = 0; i < di; ++i) {
            for (Eigen::Index o = 0; o < dout; ++o) {
                v(i * dout + o) = k(o, i);
            }
        }
        c += v * v.adjoint();
    }
    return c;
}

ComplexMatrix cj_of_unitary(const ComplexMatrix &u) {
    if (u.rows() != u.cols()) {
        throw std::invalid_argument("cj_of_unitary: matrix is not square");
    }
    return cj_of_kraus(std::span<const ComplexMatrix>(&u, 1));
}

std::string to_string(CausalFlags f) {
    switch (f) {
        case CausalFlags::no_signalling:
            return "no_signalling";
        case CausalFlags::a_to_b:
            return "A_to_B";
        case CausalFlags::b_to_a:
            return "B_to_A";
        case CausalFlags::neither:
            break;
    }
    return "neither";
}

ProcessMatrix shared_state(const ComplexMatrix &rho, const SpaceLayout &layout) {
    auto dims = layout.dims();
    FactorSet ins = layout.input_factors();
    std::size_t d_in = 1;
    for (FactorIndex f : ins) {
        d_in *= dims[f];
    }
    if (rho.rows() != rho.cols() || static_cast<std::size_t>(rho.rows()) != d_in) {
        throw std::invalid_argument("shared_state: state dimension does not match the layout inputs");
    }
    return ProcessMatrix(layout, embed(rho, dims, ins));
}

ProcessMatrix channel_with_memory(const ComplexMatrix &core, Direction direction) {
    SpaceLayout layout = SpaceLayout::bipartite();
    if (core.rows() != 8 || core.cols() != 8) {
        throw std::invalid_argument("channel_with_memory: core must act on three qubits");
    }
    auto dims = layout.dims();
    FactorSet order = direction == Direction::a_to_b ? FactorSet{0, 2, 1} : FactorSet{1, 3, 0};
    return ProcessMatrix(layout, embed(core, dims, order));
}

ProcessMatrix channel(Direction direction, const ComplexMatrix &rho, const ComplexMatrix &channel_cj) {
    if (rho.rows() != 2 || channel_cj.rows() != 4) {
        throw std::invalid_argument("channel: expected a qubit state and a qubit-channel CJ operator");
    }
    return channel_with_memory(tensor({rho, channel_cj}), direction);
}

ProcessMatrix w_ocb() {
    const ComplexMatrix id = pauli('0');
    ComplexMatrix m = tensor({id, id, id, id});
    m += kInvSqrt2 * (tensor({id, pauli('z'), pauli('z'), id}) + tensor({pauli('z'), pauli('x'), id, pauli('z')}));
    return ProcessMatrix(SpaceLayout::bipartite(), m / 4.0);
}

ProcessMatrix w_ll() {
    return pure_process(SpaceLayout::single_party(), identity_ket(2));
}

ProcessMatrix pure_process(const SpaceLayout &layout, const ComplexVector &v) {
    if (static_cast<std::size_t>(v.size()) != layout.total_dim()) {
        throw std::invalid_argument("pure_process: vector length does not match layout");
    }
    return ProcessMatrix(layout, v * v.adjoint());
}

ComplexVector causal_order_ket(const ComplexVector &psi, Direction direction) {
    const std::size_t d = static_cast<std::size_t>(psi.size());
    if (d == 0) {
        throw std::invalid_argument("causal_order_ket: empty target state");
    }
    const std::vector<std::size_t> dims(5, d);
    // Factors: 0 A_I, 1 B_I, 2 A_O, 3 B_O, 4 C_T.
    std::vector<VectorBlock> blocks;
    if (direction == Direction::a_to_b) {
        blocks = {{{0}, psi}, {{2, 1}, identity_ket(d)}, {{3, 4}, identity_ket(d)}};
    } else {
        blocks = {{{1}, psi}, {{3, 0}, identity_ket(d)}, {{2, 4}, identity_ket(d)}};
    }
    return assemble_vector(dims, blocks);
}

ProcessMatrix fixed_order_with_control(const ComplexVector &psi, Direction direction, const ComplexVector &control) {
    if (control.size() != 2) {
        throw std::invalid_argument("fixed_order_with_control: control must be a qubit vector");
    }
    ComplexVector v = tensor_vectors({causal_order_ket(psi, direction), control});
    return pure_process(SpaceLayout::switch_layout(static_cast<std::size_t>(psi.size())), v);
}

ProcessMatrix quantum_switch(const ComplexVector &psi) {
    const ComplexVector zero = ComplexVector::Unit(2, 0);
    const ComplexVector one = ComplexVector::Unit(2, 1);
    ComplexVector v = kInvSqrt2 * (tensor_vectors({causal_order_ket(psi, Direction::a_to_b), zero}) +
                                   tensor_vectors({causal_order_ket(psi, Direction::b_to_a), one}));
    return pure_process(SpaceLayout::switch_layout(static_cast<std::size_t>(psi.size())), v);
}

ProcessMatrix extended_switch(const ComplexVector &psi) {
    const std::size_t d = static_cast<std::size_t>(psi.size());
    const ComplexVector zero = ComplexVector::Unit(2, 0);
    const ComplexVector one = ComplexVector::Unit(2, 1);
    SpaceLayout layout = SpaceLayout::extended_switch_layout(d);
    auto dims = layout.dims();
    // Layout: 0 A_I, 1 B_I, 2 D_I, 3 A_O, 4 B_O, 5 D_O, 6 C_T, 7 C_C.
    const FactorSet branch{0, 1, 3, 4, 6};
    std::vector<VectorBlock> ab{
        {branch, causal_order_ket(psi, Direction::a_to_b)}, {{2}, zero}, {{5}, zero}, {{7}, zero}};
    std::vector<VectorBlock> ba{
        {branch, causal_order_ket(psi, Direction::b_to_a)}, {{2}, zero}, {{5}, one}, {{7}, one}};
    ComplexVector v = assemble_vector(dims, ab) + assemble_vector(dims, ba);
    return pure_process(layout, v);
}

CausalFlags causal_order_flags(const ProcessMatrix &w, std::string_view a, std::string_view b) {
    SpaceLayout layout = w.layout();
    ComplexMatrix m = w.matrix();
    (void)layout.party(a);
    (void)layout.party(b);
    if (a == b) {
        throw std::invalid_argument("causal_order_flags: parties must differ");
    }
    std::vector<std::string> others;
    for (const auto &p : layout.parties()) {
        if (p.name != a && p.name != b) {
            if (!p.outputs.empty()) {
                throw std::invalid_argument("causal_order_flags: party '" + p.name +
                                            "' has outputs; only two signalling parties are supported");
            }
            others.push_back(p.name);
        }
    }
    for (const auto &name : others) {
        m = partial_trace(m, layout, layout.party_factors(name));
        layout = layout.without_party(name);
    }
    auto dims = layout.dims();
    auto v = to_hs_vector(m, dims);
    const double top = v.coefficients.cwiseAbs().maxCoeff();
    const double thr = tolerance() * std::max(1.0, top);
    const unsigned long a_out = factor_bits(layout.party(a).outputs);
    const unsigned long b_out = factor_bits(layout.party(b).outputs);
    bool a_signals = false, b_signals = false;
    for (Eigen::Index p = 0; p < v.coefficients.size(); ++p) {
        if (std::abs(v.coefficients(p)) <= thr) {
            continue;
        }
        const unsigned long mask = term_mask(term_pattern(static_cast<std::size_t>(p), dims));
        a_signals = a_signals || (mask & a_out) != 0;
        b_signals = b_signals || (mask & b_out) != 0;
    }
    if (!a_signals && !b_signals) {
        return CausalFlags::no_signalling;
    }
    if (a_signals && b_signals) {
        return CausalFlags::neither;
    }
    return a_signals ? CausalFlags::a_to_b : CausalFlags::b_to_a;
}

double process_overlap(const ProcessMatrix &w1, const ProcessMatrix &w2) {
    if (w1.layout().dims() != w2.layout().dims()) {
        throw std::invalid_argument("process_overlap: layouts differ");
    }
    const double num = w1.matrix().cwiseProduct(w2.matrix().transpose()).sum().real();
    const double den = w1.matrix().trace().real() * w2.matrix().trace().real();
    if (den <= 0.0) {
        throw std::invalid_argument("process_overlap: processes must have positive trace");
    }
    return std::sqrt(std::max(0.0, num / den));
}

ProcessMatrix random_valid_process(const SpaceLayout &layout, std::mt19937_64 &rng) {
    const auto n = static_cast<Eigen::Index>(layout.total_dim());
    std::normal_distribution<double> gauss;
    ComplexMatrix g(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            g(i, j) = Complex(gauss(rng), gauss(rng));
        }
    }
    auto p = TermProjector::valid_subspace(layout);
    ComplexMatrix x = p(g + g.adjoint());
    x = (x + x.adjoint()).eval() / 2.0;
    x -= (x.trace() / static_cast<double>(n)) * ComplexMatrix::Identity(n, n);
    const double base = static_cast<double>(layout.output_dim()) / static_cast<double>(n);
    ComplexMatrix w = base * ComplexMatrix::Identity(n, n);
    auto eig = eig_hermitian(x);
    const double spread = eig.values.size() ? eig.values.cwiseAbs().maxCoeff() : 0.0;
    if (spread > 0.0) {
        w += (0.5 * base / spread) * x;
    }
    return ProcessMatrix(layout, w);
}

}  // namespace pmx
