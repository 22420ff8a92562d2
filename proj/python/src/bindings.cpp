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
#include "pmx/pmx_file.hpp"
#include "pmx/process_space.hpp"
#include "pmx/rigidity.hpp"
#include "pmx/supermaps.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace pmx;

namespace {

py::dict report_dict(const ValidationReport &r) {
    py::list checks;
    for (const auto &c : r.checks) {
        py::dict d;
        d["name"] = c.name;
        d["passed"] = c.passed;
        d["residual"] = c.residual;
        d["tolerance"] = c.tolerance;
        d["required"] = c.required;
        checks.append(d);
    }
    py::dict out;
    out["valid"] = r.valid();
    out["checks"] = checks;
    out["text"] = format_report(r);
    return out;
}

Direction parse_direction(const std::string &s) {
    if (s == "a_to_b") {
        return Direction::a_to_b;
    }
    if (s == "b_to_a") {
        return Direction::b_to_a;
    }
    throw std::invalid_argument("direction must be 'a_to_b' or 'b_to_a'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Process matrices, supermaps and their validity checks.";

    py::register_exception<SizeError>(m, "SizeError", PyExc_ValueError);
    py::register_exception<PmxFormatError>(m, "PmxFormatError", PyExc_ValueError);

    py::class_<SpaceLayout>(m, "SpaceLayout")
        .def_static("bipartite", &SpaceLayout::bipartite, py::arg("a_in") = 2, py::arg("b_in") = 2,
                    py::arg("a_out") = 2, py::arg("b_out") = 2)
        .def_static("single_party", &SpaceLayout::single_party, py::arg("d_in") = 2, py::arg("d_out") = 2,
                    py::arg("name") = "A")
        .def_static("switch_layout", &SpaceLayout::switch_layout, py::arg("d") = 2)
        .def_static("extended_switch_layout", &SpaceLayout::extended_switch_layout, py::arg("d") = 2)
        .def_property_readonly("dims", &SpaceLayout::dims)
        .def_property_readonly("labels",
                               [](const SpaceLayout &l) {
                                   std::vector<std::string> out;
                                   for (const auto &f : l.factors()) {
                                       out.push_back(f.label);
                                   }
                                   return out;
                               })
        .def_property_readonly("parties",
                               [](const SpaceLayout &l) {
                                   std::vector<std::string> out;
                                   for (const auto &p : l.parties()) {
                                       out.push_back(p.name);
                                   }
                                   return out;
                               })
        .def_property_readonly("total_dim", &SpaceLayout::total_dim)
        .def_property_readonly("output_dim", &SpaceLayout::output_dim)
        .def("__eq__", [](const SpaceLayout &a, const SpaceLayout &b) { return a == b; })
        .def("__str__", [](const SpaceLayout &l) { return to_string(l); })
        .def("__repr__", [](const SpaceLayout &l) { return "SpaceLayout(" + to_string(l) + ")"; });

    py::class_<ProcessMatrix>(m, "ProcessMatrix")
        .def(py::init<SpaceLayout, ComplexMatrix>(), py::arg("layout"), py::arg("matrix"))
        .def_property_readonly("layout", &ProcessMatrix::layout)
        .def_property_readonly("matrix", &ProcessMatrix::matrix)
        .def_property_readonly("dim", &ProcessMatrix::dim);

    m.def("tolerance", &tolerance);
    m.def("validate", [](const ProcessMatrix &w) { return report_dict(validate(w)); });
    m.def("project_valid", &project_valid);
    m.def("hs_decompose", [](const ProcessMatrix &w) {
        py::dict out;
        for (const auto &[t, c] : hs_decompose(w.matrix(), w.layout())) {
            out[py::str(term_name(t, w.layout().dims()))] = c;
        }
        return out;
    });

    m.def("w_ocb", &w_ocb);
    m.def("w_ll", &w_ll);
    m.def("quantum_switch", &quantum_switch, py::arg("psi") = ComplexVector::Unit(2, 0));
    m.def("extended_switch", &extended_switch, py::arg("psi") = ComplexVector::Unit(2, 0));
    m.def("shared_state", &shared_state, py::arg("rho"), py::arg("layout") = SpaceLayout::bipartite());
    m.def(
        "channel",
        [](const std::string &dir, const ComplexMatrix &rho, const ComplexMatrix &cj) {
            return channel(parse_direction(dir), rho, cj);
        },
        py::arg("direction"), py::arg("rho"), py::arg("channel_cj"));
    m.def("cj_of_unitary", &cj_of_unitary);
    m.def("cj_of_kraus", [](const std::vector<ComplexMatrix> &k) { return cj_of_kraus(k); });

    m.def(
        "born_probabilities",
        [](const ProcessMatrix &w, const std::vector<std::pair<std::string, std::vector<ComplexMatrix>>> &inst) {
            std::vector<Instrument> list;
            for (const auto &[party, elements] : inst) {
                list.push_back({party, elements});
            }
            const auto t = born_probabilities(w, list);
            py::dict out;
            out["parties"] = t.parties;
            out["shape"] = t.shape;
            out["p"] = t.p;
            out["warnings"] = t.warnings;
            return out;
        },
        py::arg("w"), py::arg("instruments"),
        "Instruments are (party, [CJ elements]) pairs; p is row-major over outcomes.");
    m.def(
        "causal_order_flags",
        [](const ProcessMatrix &w, const std::string &a, const std::string &b) {
            return to_string(causal_order_flags(w, a, b));
        },
        py::arg("w"), py::arg("a") = "A", py::arg("b") = "B");
    m.def("process_overlap", &process_overlap);

    m.def("to_pmx_string", &to_pmx_string);
    m.def("from_pmx_string", &from_pmx_string);
    m.def("write_pmx", &write_pmx);
    m.def("read_pmx", &read_pmx);

    py::class_<Supermap>(m, "Supermap")
        .def_property_readonly("name", &Supermap::name)
        .def_property_readonly("in_layout", &Supermap::in_layout)
        .def_property_readonly("out_layout", &Supermap::out_layout)
        .def_property_readonly("cj", &Supermap::cj)
        .def("__call__", [](const Supermap &s, const ProcessMatrix &w) { return apply(s, w); });
    m.def("validate_supermap", [](const Supermap &s) { return report_dict(validate_supermap(s)); });
    m.def("identity_supermap", &identity_supermap);
    m.def("unitary_supermap", &unitary_supermap, py::arg("layout"), py::arg("u"), py::arg("name") = "unitary");
    m.def("c_swap_v", &c_swap_v);
    m.def("v_lambda", &v_lambda);
    m.def("instrument_reduction", [](const SpaceLayout &l, const std::string &party, const ComplexMatrix &cj) {
        return instrument_reduction(l, party, cj);
    });

    m.def(
        "verify_rigidity",
        [](const SpaceLayout &l, std::uint64_t seed) {
            const auto r = verify_rigidity(l, seed);
            py::dict out;
            out["passed"] = r.passed();
            out["kernel_dim"] = r.kernel_dim;
            out["single_body_dim"] = r.single_body_dim;
            out["text"] = format_report(r);
            return out;
        },
        py::arg("layout"), py::arg("seed") = 42);
    m.def("support_intersection_dim", &support_intersection_dim);
    m.def("is_extremal", [](const ProcessMatrix &w) { return is_extremal(w).extremal; });
    m.def("non_reachability_report", [] {
        const auto r = non_reachability_report();
        py::dict out;
        out["passed"] = r.passed;
        out["wocb_rank"] = r.wocb_rank;
        out["wocb_intersection_dim"] = r.wocb_intersection_dim;
        out["counted"] = r.counted;
        out["text"] = format_report(r);
        return out;
    });
}
