// Copyright 2026 The qrd Authors
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


// Prints one PASS/FAIL line per acceptance criterion followed by the measured
// quantities. Exit status is nonzero when any criterion fails.
//
//   acceptance [--only 1,3,5] [--workers N]

#include <cstdlib>
#include <iostream>
#include <string>

#include "qrd/acceptance.hpp"

int main(int argc, char** argv) {
  qrd::acceptance::Options opt;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--only" && i + 1 < argc) {
      std::string list = argv[++i];
      std::size_t pos = 0;
      while (pos < list.size()) {
        const std::size_t comma = list.find(',', pos);
        opt.only.insert(std::stoi(list.substr(pos, comma - pos)));
        pos = comma == std::string::npos ? list.size() : comma + 1;
      }
    } else if (a == "--workers" && i + 1 < argc) {
      opt.workers = static_cast<unsigned>(std::stoul(argv[++i]));
    } else {
      std::cerr << "usage: acceptance [--only 1,3,5] [--workers N]\n";
      return 2;
    }
  }
  const auto results = qrd::acceptance::run(opt, [](const qrd::acceptance::CriterionResult& r) {
    std::cout << qrd::acceptance::format(r) << std::endl;
  });
  std::size_t passed = 0;
  for (const auto& r : results) passed += r.pass ? 1 : 0;
  std::cout << passed << "/" << results.size() << " criteria passed" << std::endl;
  return passed == results.size() ? EXIT_SUCCESS : EXIT_FAILURE;
}
