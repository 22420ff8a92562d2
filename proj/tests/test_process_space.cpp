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

#include "oracles.hpp"
#include "pmx/hs_algebra.hpp"
#include "pmx/process_space.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace pmx {
namespace {

using testing::pauli;
using testing::pauli_string;

ComplexMatrix ketbra(std::size_t d, std::size_t i, std::size_t j) {
    ComplexMatrix m = ComplexMatrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 1.0;
    return m;
}

ComplexMatrix identity_channel_cj() {
    ComplexVector one = identity_ket(2);
    return one * one.adjoint();
}

TEST(Classify, PaperTaxonomy) {
    const auto l = SpaceLayout::bipartite();
    for (std::size_t a = 0; a < 4; ++a) {
        for (std::size_t i = 1; i < 4; ++i) {
            for (std::size_t j = 1; j < 4; ++j) {
                EXPECT_EQ(classify_term({a, i, j, 0}, l), TermClass::allowed);  // A -> B channel
                EXPECT_EQ(classify_term({i, a, 0, j}, l), TermClass::allowed);  // B -> A channel
                for (std::size_t k = 1; k < 4; ++k) {
                    EXPECT_EQ(classify_term({i, j, k, a ? a : 1}, l), TermClass::forbidden);  // global loop
                }
                EXPECT_EQ(classify_term({0, 0, i, a}, l), TermClass::forbidden);  // post-selection
                EXPECT_EQ(classify_term({i, 0, j, a}, l), TermClass::forbidden);  // local loop in A
            }
        }
        for (std::size_t b = 0; b < 4; ++b) {
            EXPECT_EQ(classify_term({a, b, 0, 0}, l), TermClass::allowed);  // shared state
        }
    }
    EXPECT_EQ(classify_term({0, 0, 0, 0}, l), TermClass::allowed);
}

TEST(Classify, BipartiteQubitCounts) {
    const auto l = SpaceLayout::bipartite();
    const auto dims = l.dims();
    std::size_t allowed = 0, forbidden = 0;
    for (std::size_t k = 0; k < term_count(dims); ++k) {
        (classify_term(term_pattern(k, dims), l) == TermClass::allowed ? allowed : forbidden)++;
    }
    EXPECT_EQ(allowed, 88u);
    EXPECT_EQ(forbidden, 168u);
}

TEST(Classify, PartyWithoutOutputNeverForbids) {
    const auto l = SpaceLayout::switch_layout();
    EXPECT_EQ(classify_term({0, 0, 0, 0, 3, 2}, l), TermClass::allowed);
    EXPECT_EQ(classify_term({0, 0, 1, 0, 3, 0}, l), TermClass::allowed);
    EXPECT_EQ(classify_term({0, 0, 1, 0, 0, 0}, l), TermClass::forbidden);
}

TEST(Projector, MatchesClosedFormOnEveryBasisTerm) {
    const auto l = SpaceLayout::bipartite();
    const auto dims = l.dims();
    const auto p = TermProjector::valid_subspace(l);
    for (std::size_t k = 0; k < 256; ++k) {
        const auto t = term_pattern(k, dims);
        ComplexMatrix s = pauli_string(t);
        ComplexMatrix oracle = testing::closed_form_projector(s, dims);
        // The closed form is diagonal in this basis with 0/1 eigenvalues.
        const double c = (oracle * s).trace().real() / 16.0;
        EXPECT_TRUE(std::abs(c) < 1e-12 || std::abs(c - 1.0) < 1e-12) << term_name(t, dims);
        EXPECT_LE(max_norm(oracle - c * s), 1e-12);
        EXPECT_LE(max_norm(p(s) - oracle), 1e-12) << term_name(t, dims);
        EXPECT_EQ(p.weight(t), c > 0.5 ? 1.0 : 0.0);
    }
}

TEST(Projector, ClosedFormAgreesOnRandomOperators) {
    std::mt19937_64 rng(31);
    const auto l = SpaceLayout::bipartite();
    const auto p = TermProjector::valid_subspace(l);
    for (int trial = 0; trial < 5; ++trial) {
        ComplexMatrix m = testing::random_complex(16, 16, rng);
        EXPECT_LE(max_norm(p(m) - testing::closed_form_projector(m, l.dims())), 1e-12);
    }
}

TEST(Projector, IdempotentOnFullBasis) {
    const auto l = SpaceLayout::bipartite();
    const auto p = TermProjector::valid_subspace(l);
    for (std::size_t r = 0; r < 16; ++r) {
        for (std::size_t c = 0; c < 16; ++c) {
            ComplexMatrix e = ketbra(16, r, c);
            ComplexMatrix once = p(e);
            EXPECT_LE(max_norm(p(once) - once), 1e-10);
        }
    }
}

TEST(ProjectValid, PaperExamples) {
    const ProcessMatrix w = w_ocb();
    EXPECT_LE(max_norm(project_valid(w).matrix() - w.matrix()), 1e-15);
    const auto l = SpaceLayout::bipartite();
    ProcessMatrix loop(l, pauli_string({1, 2, 3, 1}));
    EXPECT_LE(max_norm(project_valid(loop).matrix()), 1e-15);
    ProcessMatrix c(l, 0.3 * ComplexMatrix::Identity(16, 16));
    EXPECT_LE(max_norm(project_valid(c).matrix() - c.matrix()), 1e-15);
}

TEST(Validate, Wocb) {
    auto r = validate(w_ocb());
    EXPECT_TRUE(r.valid());
    for (const auto &c : r.checks) {
        EXPECT_LE(c.residual, 1e-9) << c.name;
    }
    EXPECT_EQ(r.checks.size(), 3u);
}

TEST(Validate, SwitchIsValid) {
    EXPECT_TRUE(validate(quantum_switch()).valid());
    ComplexVector plus = ComplexVector::Ones(2) / std::sqrt(2.0);
    EXPECT_TRUE(validate(quantum_switch(plus)).valid());
}

TEST(Validate, LocalLoopFailsOnlySubspace) {
    auto r = validate(w_ll());
    EXPECT_FALSE(r.valid());
    EXPECT_TRUE(r.check("positivity").passed);
    EXPECT_TRUE(r.check("trace").passed);
    EXPECT_FALSE(r.check("subspace").passed);
    EXPECT_EQ(r.failed(), std::vector<std::string>{"subspace"});
    EXPECT_THROW(r.check("nope"), std::out_of_range);
}

TEST(Validate, TraceAndPositivityFailures) {
    const auto l = SpaceLayout::bipartite();
    auto r = validate(ProcessMatrix(l, ComplexMatrix::Identity(16, 16) / 2.0));
    EXPECT_FALSE(r.check("trace").passed);
    EXPECT_TRUE(r.check("subspace").passed);
    ComplexMatrix m = w_ocb().matrix();
    m += 0.2 * pauli_string({3, 3, 0, 0});
    auto r2 = validate(ProcessMatrix(l, m));
    EXPECT_FALSE(r2.check("positivity").passed);
    EXPECT_TRUE(r2.check("subspace").passed);
}

TEST(Validate, ReportFormatting) {
    const std::string text = format_report(validate(w_ll()));
    EXPECT_NE(text.find("subspace residual=1.000e+00"), std::string::npos);
    EXPECT_NE(text.find("FAIL"), std::string::npos);
    EXPECT_NE(text.find("verdict=invalid"), std::string::npos);
}

TEST(ProcessMatrix, RejectsMismatchAndNonHermitian) {
    const auto l = SpaceLayout::single_party();
    EXPECT_THROW(ProcessMatrix(l, ComplexMatrix::Identity(3, 3)), std::invalid_argument);
    ComplexMatrix m = ComplexMatrix::Identity(4, 4);
    m(0, 1) = 1.0;
    EXPECT_THROW(ProcessMatrix(l, m), std::invalid_argument);
}

TEST(Born, DepolarizingGivesCertainty) {
    std::mt19937_64 rng(32);
    for (const ProcessMatrix &w :
         {w_ocb(), quantum_switch(), random_valid_process(SpaceLayout::bipartite(3, 2, 2, 2), rng)}) {
        std::vector<Instrument> inst;
        for (const auto &p : w.layout().parties()) {
            std::size_t din = 1, dout = 1;
            for (auto f : p.inputs) {
                din *= w.layout().dim(f);
            }
            for (auto f : p.outputs) {
                dout *= w.layout().dim(f);
            }
            const auto n = static_cast<Eigen::Index>(din * dout);
            inst.push_back({p.name, {ComplexMatrix::Identity(n, n) / static_cast<double>(dout)}});
        }
        auto t = born_probabilities(w, inst);
        ASSERT_EQ(t.p.size(), 1u);
        EXPECT_NEAR(t.p[0], 1.0, 1e-12);
        EXPECT_TRUE(t.warnings.empty());
    }
}

TEST(Born, GrandfatherParadoxProbabilitiesVanish) {
    Instrument flip{"A", {tensor({ketbra(2, 0, 0), ketbra(2, 1, 1)}), tensor({ketbra(2, 1, 1), ketbra(2, 0, 0)})}};
    EXPECT_TRUE(validate_instrument(flip, SpaceLayout::single_party()).valid());
    std::vector<Instrument> inst{flip};
    auto t = born_probabilities(w_ll(), inst);
    ASSERT_EQ(t.p.size(), 2u);
    EXPECT_LE(std::abs(t.p[0]), 1e-12);
    EXPECT_LE(std::abs(t.p[1]), 1e-12);
    EXPECT_FALSE(t.warnings.empty());
}

TEST(Born, SharedStateMatchesDirectContraction) {
    std::mt19937_64 rng(33);
    ComplexMatrix rho = testing::random_density(4, rng);
    ProcessMatrix w = shared_state(rho);
    // POVMs from random unitaries; the output is replaced by a fixed state.
    auto povm = [&](std::size_t d) {
        ComplexMatrix u = testing::random_unitary(d, rng);
        std::vector<ComplexMatrix> e;
        for (std::size_t k = 0; k < d; ++k) {
            e.push_back(u.col(static_cast<Eigen::Index>(k)) * u.col(static_cast<Eigen::Index>(k)).adjoint());
        }
        return e;
    };
    auto ea = povm(2), eb = povm(2);
    const ComplexMatrix omega = testing::random_density(2, rng);
    Instrument ia{"A", {}}, ib{"B", {}};
    for (const auto &e : ea) {
        ia.cj_elements.push_back(tensor({e, omega}));
    }
    for (const auto &e : eb) {
        ib.cj_elements.push_back(tensor({e, omega}));
    }
    std::vector<Instrument> inst{ib, ia};
    auto t = born_probabilities(w, inst);
    EXPECT_EQ(t.parties, (std::vector<std::string>{"A", "B"}));
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 2; ++j) {
            const double oracle = (rho * testing::kron(ea[i], eb[j])).trace().real();
            const std::size_t idx[] = {i, j};
            EXPECT_NEAR(t.at(idx), oracle, 1e-12);
        }
    }
    EXPECT_NEAR(t.total(), 1.0, 1e-12);
}

TEST(Born, RejectsMissingOrDuplicateParties) {
    Instrument a{"A", {ComplexMatrix::Identity(4, 4) / 2.0}};
    std::vector<Instrument> only_a{a};
    EXPECT_THROW(born_probabilities(w_ocb(), only_a), std::invalid_argument);
    std::vector<Instrument> twice{a, a};
    EXPECT_THROW(born_probabilities(w_ocb(), twice), std::invalid_argument);
}

TEST(Instrument, ValidationCatchesNonTracePreserving) {
    const auto l = SpaceLayout::single_party();
    Instrument bad{"A", {ComplexMatrix::Identity(4, 4)}};
    auto r = validate_instrument(bad, l);
    EXPECT_FALSE(r.check("trace_preserving").passed);
    EXPECT_TRUE(r.check("positivity").passed);
    Instrument neg{"A", {ComplexMatrix::Identity(4, 4) / 2.0 + 0.6 * pauli_string({3, 3})}};
    EXPECT_FALSE(validate_instrument(neg, l).check("positivity").passed);
    std::mt19937_64 rng(34);
    EXPECT_TRUE(validate_instrument(testing::random_instrument(l, "A", 3, rng), l).valid());
}

TEST(ChoiJamiolkowski, IdentityMap) {
    ComplexMatrix c = cj_of_unitary(ComplexMatrix::Identity(2, 2));
    EXPECT_LE(max_norm(c - identity_channel_cj()), 1e-15);
    EXPECT_NEAR(c.trace().real(), 2.0, 1e-15);
    EXPECT_LE(max_norm(cj_of_map(ComplexMatrix::Identity(4, 4), 2, 2) - c), 1e-15);
}

TEST(ChoiJamiolkowski, PauliXConjugation) {
    ComplexMatrix x = pauli(1);
    ComplexMatrix oracle = testing::kron(pauli(0), x) * identity_channel_cj() * testing::kron(pauli(0), x);
    EXPECT_LE(max_norm(cj_of_unitary(x) - oracle), 1e-15);
    std::vector<ComplexMatrix> k{x};
    EXPECT_LE(max_norm(cj_of_kraus(k) - oracle), 1e-15);
}

TEST(ChoiJamiolkowski, FullyDepolarizing) {
    std::vector<ComplexMatrix> k;
    for (std::size_t i = 0; i < 4; ++i) {
        k.push_back(pauli(i) / 2.0);
    }
    EXPECT_LE(max_norm(cj_of_kraus(k) - ComplexMatrix::Identity(4, 4) / 2.0), 1e-15);
}

TEST(ChoiJamiolkowski, MapAndKrausRoutesAgree) {
    std::mt19937_64 rng(35);
    auto kraus = testing::random_kraus(2, 3, 3, rng);
    // Row-major vectorization: vec(K X K^dag) = (K (x) conj(K)) vec(X).
    ComplexMatrix superop = ComplexMatrix::Zero(9, 4);
    for (const auto &k : kraus) {
        superop += testing::kron(k, k.conjugate());
    }
    EXPECT_LE(max_norm(cj_of_map(superop, 2, 3) - cj_of_kraus(kraus)), 1e-13);
    ComplexMatrix c = cj_of_kraus(kraus);
    EXPECT_LE(max_norm(partial_trace(c, std::vector<std::size_t>{2, 3}, FactorSet{1}) - ComplexMatrix::Identity(2, 2)),
              1e-12);
}

TEST(Constructors, MaximallyMixedSharedState) {
    ProcessMatrix w = shared_state(ComplexMatrix::Identity(4, 4) / 4.0);
    EXPECT_TRUE(validate(w).valid());
    EXPECT_EQ(causal_order_flags(w), CausalFlags::no_signalling);
    EXPECT_LE(max_norm(w.matrix() - ComplexMatrix::Identity(16, 16) / 4.0), 1e-15);
}

TEST(Constructors, SwitchTraceAndRank) {
    ProcessMatrix s = quantum_switch();
    ASSERT_EQ(s.dim(), 64u);
    Complex tr = 0.0;
    for (Eigen::Index i = 0; i < 64; ++i) {
        tr += s.matrix()(i, i);
    }
    EXPECT_NEAR(tr.real(), 4.0, 1e-9);
    EXPECT_EQ(numerical_rank(s.matrix()), 1u);
}

TEST(Constructors, SwitchIsSuperpositionOfOrders) {
    // |S> = (|ABC>|0> + |BAC>|1>) / sqrt 2; A first wires psi -> A_I, A_O -> B_I,
    // B_O -> C_T and B first wires psi -> B_I, B_O -> A_I, A_O -> C_T.
    ComplexVector psi(2);
    psi << 0.6, Complex(0.0, 0.8);
    auto idx = [](std::size_t ai, std::size_t bi, std::size_t ao, std::size_t bo, std::size_t ct, std::size_t cc) {
        return static_cast<Eigen::Index>(((((ai * 2 + bi) * 2 + ao) * 2 + bo) * 2 + ct) * 2 + cc);
    };
    ComplexVector s = ComplexVector::Zero(64);
    for (std::size_t x = 0; x < 2; ++x) {
        for (std::size_t k = 0; k < 2; ++k) {
            for (std::size_t m = 0; m < 2; ++m) {
                s(idx(x, k, k, m, m, 0)) += psi(static_cast<Eigen::Index>(x));
                s(idx(k, x, m, k, m, 1)) += psi(static_cast<Eigen::Index>(x));
            }
        }
    }
    s /= std::sqrt(2.0);
    EXPECT_LE(max_norm(quantum_switch(psi).matrix() - s * s.adjoint()), 1e-14);
}

TEST(Constructors, WocbRankAndSpectrum) {
    ProcessMatrix w = w_ocb();
    EXPECT_EQ(numerical_rank(w.matrix()), 8u);
    auto e = eig_hermitian(w.matrix());
    for (Eigen::Index k = 0; k < 16; ++k) {
        EXPECT_NEAR(e.values(k), k < 8 ? 0.5 : 0.0, 1e-9);
    }
}

TEST(Constructors, ChannelsAndFlags) {
    const ComplexMatrix rho = ComplexMatrix::Identity(2, 2) / 2.0;
    ProcessMatrix ab = channel(Direction::a_to_b, rho, identity_channel_cj());
    ProcessMatrix ba = channel(Direction::b_to_a, rho, identity_channel_cj());
    EXPECT_TRUE(validate(ab).valid());
    EXPECT_TRUE(validate(ba).valid());
    EXPECT_EQ(causal_order_flags(ab), CausalFlags::a_to_b);
    EXPECT_EQ(causal_order_flags(ba), CausalFlags::b_to_a);
    EXPECT_EQ(causal_order_flags(w_ocb()), CausalFlags::neither);
    std::mt19937_64 rng(36);
    EXPECT_EQ(causal_order_flags(shared_state(testing::random_density(4, rng))), CausalFlags::no_signalling);
    EXPECT_EQ(to_string(CausalFlags::a_to_b), "A_to_B");
    EXPECT_EQ(to_string(CausalFlags::neither), "neither");
}

TEST(Constructors, ChannelWithMemoryFlags) {
    // Classically controlled channel: identity if A_I = |0>, bit flip if |1>.
    std::vector<ComplexMatrix> flip{pauli(1)};
    ComplexMatrix core =
        0.3 * tensor({ketbra(2, 0, 0), identity_channel_cj()}) + 0.7 * tensor({ketbra(2, 1, 1), cj_of_kraus(flip)});
    for (Direction d : {Direction::a_to_b, Direction::b_to_a}) {
        ProcessMatrix w = channel_with_memory(core, d);
        EXPECT_TRUE(validate(w).valid());
        EXPECT_EQ(causal_order_flags(w), d == Direction::a_to_b ? CausalFlags::a_to_b : CausalFlags::b_to_a);
        // Memory shows up as a term nontrivial on the sender's input.
        auto c = hs_decompose(w.matrix(), w.layout());
        const TermPattern memory = d == Direction::a_to_b ? TermPattern{3, 1, 1, 0} : TermPattern{1, 3, 0, 1};
        EXPECT_TRUE(c.count(memory)) << term_name(memory, w.layout().dims());
    }
}

TEST(Constructors, ExtendedSwitchIsValid) {
    ProcessMatrix e = extended_switch();
    EXPECT_EQ(e.dim(), 256u);
    EXPECT_TRUE(validate(e).valid());
    EXPECT_EQ(numerical_rank(e.matrix()), 1u);
}

TEST(Constructors, RandomValidProcessesAreValid) {
    std::mt19937_64 rng(38);
    for (const auto &l : {SpaceLayout::bipartite(), SpaceLayout::single_party(3, 2), SpaceLayout::switch_layout()}) {
        for (int k = 0; k < 3; ++k) {
            EXPECT_TRUE(validate(random_valid_process(l, rng)).valid()) << to_string(l);
        }
    }
}

TEST(Overlap, SelfOverlapIsOne) {
    EXPECT_NEAR(process_overlap(quantum_switch(), quantum_switch()), 1.0, 1e-12);
    EXPECT_LT(process_overlap(w_ocb(), shared_state(ComplexMatrix::Identity(4, 4) / 4.0)), 1.0);
}

TEST(Soundness, TripartiteProjectionConservesProbability) {
    // Random Hermitian operators pushed through the term-rule projector and
    // rescaled to trace d_O give sum p = 1 for trace-preserving instruments.
    std::mt19937_64 rng(39);
    const auto l = SpaceLayout::switch_layout();
    const auto p = TermProjector::valid_subspace(l);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        ComplexMatrix h = p(testing::random_hermitian(l.total_dim(), rng));
        h *= static_cast<double>(l.output_dim()) / h.trace().real();
        ProcessMatrix w(l, h);
        auto inst = testing::random_instruments(l, 2, rng);
        worst = std::max(worst, std::abs(born_probabilities(w, inst).total() - 1.0));
    }
    EXPECT_LE(worst, 1e-9);
}

TEST(Soundness, ForbiddenTermBreaksNormalization) {
    // A single forbidden term added to a valid process changes sum p for some
    // trace-preserving instrument choice.
    std::mt19937_64 rng(40);
    const auto l = SpaceLayout::switch_layout();
    ComplexMatrix h = quantum_switch().matrix() + 0.05 * pauli_string({0, 0, 3, 0, 0, 0});
    ProcessMatrix w(l, h);
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        auto inst = testing::random_instruments(l, 2, rng);
        worst = std::max(worst, std::abs(born_probabilities(w, inst).total() - 1.0));
    }
    EXPECT_GT(worst, 1e-6);
}

}  // namespace
}  // namespace pmx
