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

#include "pmx/pmx_file.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace pmx {

using nlohmann::json;

namespace {

json layout_factors(const SpaceLayout &layout) {
    json factors = json::array();
    for (std::size_t f = 0; f < layout.factor_count(); ++f) {
        json entry;
        entry["label"] = layout.factors()[f].label;
        entry["dim"] = layout.factors()[f].dim;
        entry["party"] = layout.parties()[layout.party_of(f)].name;
        entry["role"] = layout.role_of(f) == Role::input ? "input" : "output";
        factors.push_back(std::move(entry));
    }
    return factors;
}

const json &field(const json &obj, const char *name) {
    if (!obj.is_object() || !obj.contains(name)) {
        throw PmxFormatError(std::string("missing field '") + name + "'");
    }
    return obj.at(name);
}

std::size_t positive_int(const json &v, const char *what) {
    if (!v.is_number_integer() || v.get<long long>() < 1) {
        throw PmxFormatError(std::string(what) + " must be a positive integer");
    }
    return v.get<std::size_t>();
}

}  // namespace

std::string to_pmx_string(const ProcessMatrix &w) {
    json doc;
    doc["format_version"] = "1";
    doc["factors"] = layout_factors(w.layout());
    const auto n = static_cast<Eigen::Index>(w.dim());
    json entries = json::array();
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < n; ++c) {
            const Complex z = w.matrix()(r, c);
            entries.push_back(json::array({z.real(), z.imag()}));
        }
    }
    doc["matrix"] = {{"dim", w.dim()}, {"entries", std::move(entries)}};
    return doc.dump() + "\n";
}

ProcessMatrix from_pmx_string(const std::string &text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error &e) {
        throw PmxFormatError(std::string("invalid JSON: ") + e.what());
    }
    const json &version = field(doc, "format_version");
    if (!version.is_string() || version.get<std::string>() != "1") {
        throw PmxFormatError("unsupported format_version");
    }
    const json &factors = field(doc, "factors");
    if (!factors.is_array()) {
        throw PmxFormatError("'factors' must be an array");
    }
    std::vector<Factor> fs;
    std::vector<Party> parties;
    for (const json &f : factors) {
        const json &label = field(f, "label");
        const json &party = field(f, "party");
        const json &role = field(f, "role");
        if (!label.is_string() || !party.is_string() || !role.is_string()) {
            throw PmxFormatError("factor label, party and role must be strings");
        }
        const std::size_t dim = positive_int(field(f, "dim"), "factor dim");
        const std::string r = role.get<std::string>();
        if (r != "input" && r != "output") {
            throw PmxFormatError("factor role must be 'input' or 'output'");
        }
        const std::string pname = party.get<std::string>();
        auto it = std::find_if(parties.begin(), parties.end(), [&](const Party &p) { return p.name == pname; });
        if (it == parties.end()) {
            parties.push_back({pname, {}, {}});
            it = parties.end() - 1;
        }
        (r == "input" ? it->inputs : it->outputs).push_back(fs.size());
        fs.push_back({label.get<std::string>(), dim});
    }
    SpaceLayout layout;
    try {
        layout = SpaceLayout(std::move(fs), std::move(parties));
    } catch (const std::exception &e) {
        throw PmxFormatError(std::string("invalid layout: ") + e.what());
    }
    const json &matrix = field(doc, "matrix");
    const std::size_t dim = positive_int(field(matrix, "dim"), "matrix dim");
    if (dim != layout.total_dim()) {
        throw PmxFormatError("matrix dim does not equal the product of factor dims");
    }
    const json &entries = field(matrix, "entries");
    if (!entries.is_array() || entries.size() != dim * dim) {
        throw PmxFormatError("matrix entries must hold dim^2 [re, im] pairs");
    }
    const auto n = static_cast<Eigen::Index>(dim);
    ComplexMatrix m(n, n);
    std::size_t k = 0;
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < n; ++c, ++k) {
            const json &e = entries[k];
            if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
                throw PmxFormatError("matrix entry " + std::to_string(k) + " is not a [re, im] pair");
            }
            const double re = e[0].get<double>(), im = e[1].get<double>();
            if (!std::isfinite(re) || !std::isfinite(im)) {
                throw PmxFormatError("matrix entry " + std::to_string(k) + " is not finite");
            }
            m(r, c) = Complex(re, im);
        }
    }
    if (max_norm(m - m.adjoint()) > 1e-9 * std::max(1.0, max_norm(m))) {
        throw PmxFormatError("matrix is not Hermitian within 1e-9");
    }
    return ProcessMatrix(std::move(layout), std::move(m));
}

void write_pmx(const std::string &path, const ProcessMatrix &w) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw PmxFormatError("cannot open '" + path + "' for writing");
    }
    out << to_pmx_string(w);
    if (!out) {
        throw PmxFormatError("failed writing '" + path + "'");
    }
}

ProcessMatrix read_pmx(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw PmxFormatError("cannot open '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_pmx_string(buf.str());
}

}  // namespace pmx
