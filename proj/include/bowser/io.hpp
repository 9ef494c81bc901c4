// Copyright 2026 The Bowser Routing Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Plain-text instance and plan formats. The grammar is documented in
// README.md; writers are canonical so that equal objects serialize to equal
// bytes.

#ifndef BOWSER_IO_HPP_
#define BOWSER_IO_HPP_

#include <string>
#include <string_view>

#include "bowser/core.hpp"

namespace bowser {

Instance ParseInstance(std::string_view text);
std::string FormatInstance(const Instance& inst);
Instance LoadInstance(const std::string& path);
void SaveInstance(const Instance& inst, const std::string& path);

Plan ParsePlan(std::string_view text);
std::string FormatPlan(const Plan& plan);
Plan LoadPlan(const std::string& path);
void SavePlan(const Plan& plan, const std::string& path);

// Two-column route table ("period", "transit") for human inspection.
std::string FormatRouteTable(const Plan& plan);

std::string ReadFile(const std::string& path);
void WriteFile(const std::string& path, const std::string& contents);

}  // namespace bowser

#endif  // BOWSER_IO_HPP_
