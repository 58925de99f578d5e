// Copyright 2026 The kdist Authors
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

#include <iostream>

#include "commands.hpp"
#include "kdist/errors.hpp"
#include "kdist/version.hpp"

int main(int argc, char** argv) {
  using namespace kdist::cli;
  CLI::App app{"kdist: simulation and verification toolkit for quantum-walk k-distinctness"};
  app.set_version_flag("--version", std::string("kdist ") + kdist::kVersion);
  app.require_subcommand(1);

  Common common;
  app.add_option("--seed", common.seed, "64-bit seed for all randomness")->capture_default_str();
  app.add_option("--out", common.out, "output path, '-' for stdout")->capture_default_str();
  app.add_option("--format", common.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();

  int rc = kExitOk;
  register_walk(app, common, rc);
  register_verify(app, common, rc);
  register_distinct(app, common, rc);
  register_store_bench(app, common, rc);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  } catch (const kdist::Error& e) {
    std::cerr << "kdist: " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "kdist: unexpected error: " << e.what() << '\n';
    return kExitError;
  }
  return rc;
}
