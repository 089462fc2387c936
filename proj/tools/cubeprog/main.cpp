// Copyright (C) 2026 The cubeprog Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstring>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "commands.hpp"
#include "cubeprog/error.hpp"

using namespace cubeprog;
using namespace cubeprog::cli;

namespace {

int exitCodeFor(const Error& e) {
  const char* k = e.kind();
  auto is = [k](const char* name) { return std::strcmp(k, name) == 0; };
  if (is("ConfigError")) return kExitConfig;
  if (is("VersionMismatch")) return kExitVersion;
  if (is("IoError") || is("FormatError") || is("InvalidScene") || is("ReferenceError"))
    return kExitIo;
  return kExitGeneric;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cubeprog: cube-world perception, program synthesis and execution"};
  app.require_subcommand(1);

  std::string configPath;
  std::optional<std::uint64_t> seed;
  std::string outDir = ".";
  for (const auto& [name, help] : commandHelp()) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", configPath, "JSON run config")->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "Master seed (overrides the config)");
    sub->add_option("--out", outDir, "Output directory (created if missing)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    RunConfig config;
    if (!configPath.empty()) {
      const fs::path p = fs::absolute(configPath);
      config = parseRunConfig(readJsonFile(p), p.parent_path());
    }
    if (seed) config.seed = *seed;
    config.outDir = outDir;
    std::error_code ec;
    fs::create_directories(config.outDir, ec);
    if (ec) throw IoError("cannot create " + outDir + ": " + ec.message());
    return commands().at(name)(config, std::cout);
  } catch (const Error& e) {
    std::cerr << "cubeprog " << name << ": " << e.kind() << ": " << e.what() << '\n';
    return exitCodeFor(e);
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "cubeprog " << name << ": malformed input: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "cubeprog " << name << ": " << e.what() << '\n';
    return kExitGeneric;
  }
}
