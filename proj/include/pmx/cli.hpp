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

#include <iosfwd>
#include <string>
#include <vector>

namespace pmx {

/// Entry point of the `pmx` tool. Exit codes: 0 success (or valid), 1
/// invalid or failed verification, 2 usage, I/O or format error.
int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

/// Parses "a,b,c" where each item is "re" or "re:im".
ComplexVector parse_state_vector(const std::string &text);
/// A decimal number or a multiple of pi such as "pi/4", "-3pi/2", "0.5pi".
double parse_angle(const std::string &text);
std::vector<double> parse_angle_list(const std::string &text);

/// Builds one of the named processes: state, channel, wocb, wll, switch,
/// extended-switch. An empty psi selects the default |0> (|00> for state).
/// Throws std::invalid_argument for unknown names or bad parameters.
ProcessMatrix build_named(const std::string &name, const ComplexVector &psi, Direction direction);

/// The reduced switch family: D applies the rotation by lambda to the
/// extended switch and is traced out.
ProcessMatrix reduced_extended_switch(double lambda);

}  // namespace pmx
