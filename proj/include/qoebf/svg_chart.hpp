// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The qoebf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Self-contained SVG line charts with auto-scaled axes.

#include <string>
#include <vector>

namespace qoebf::svg {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> error;  // half-width of a vertical bar; empty for none
};

struct ChartLabels {
  std::string title;
  std::string x_axis;
  std::string y_axis;
};

/// Non-finite points are skipped. Output depends only on the inputs.
std::string line_chart(const ChartLabels& labels, const std::vector<Series>& series);

/// Escapes &, <, >, " and ' for text nodes and attributes.
std::string escape(const std::string& text);

}  // namespace qoebf::svg
