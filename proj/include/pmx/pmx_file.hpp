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

#include "pmx/process_space.hpp"

#include <stdexcept>
#include <string>

namespace pmx {

/// Malformed or unreadable PMX document.
class PmxFormatError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// JSON document, format_version "1": factors {label, dim, party, role} and
/// the matrix as a flat row-major list of [re, im] pairs. Numbers are
/// written in shortest round-trip decimal form, so a reload is bit-exact
/// and the bytes are deterministic.
std::string to_pmx_string(const ProcessMatrix &w);
/// Parties appear in order of first mention. Throws PmxFormatError on any
/// structural problem or if the matrix is not Hermitian to 1e-9.
ProcessMatrix from_pmx_string(const std::string &text);

void write_pmx(const std::string &path, const ProcessMatrix &w);
ProcessMatrix read_pmx(const std::string &path);

}  // namespace pmx
