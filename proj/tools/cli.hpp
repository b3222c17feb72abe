// Copyright the mxfem authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef MXFEM_TOOLS_CLI_HPP
#define MXFEM_TOOLS_CLI_HPP

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "mxfem/experiments.hpp"

namespace mxfem::cli
{

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitNumeric = 2;
inline constexpr int kExitUsage = 64;

struct KeySpec
{
  std::string name;
  std::string type;  // int | float | bool | string | int list | float list
  std::string help;
};

// Every recognized config key.
const std::vector<KeySpec> &config_keys();

// Flat key -> raw value map ("section.key" names, string quotes removed).
using RawConfig = std::map<std::string, std::string>;

// Parses the TOML subset used by config files: [section] headers,
// `key = value` lines, '#' comments; values are numbers, booleans, quoted
// strings or flat arrays. Throws ParseError with the line number, and for
// keys outside config_keys().
RawConfig parse_config(const std::string &text);

// Applies a `key=value` override. Throws ArgumentError for unknown keys or
// malformed pairs.
void apply_override(RawConfig &raw, const std::string &pair);

struct CliConfig
{
  std::string subcommand;
  std::string config_path;
  std::vector<std::string> overrides;
  std::filesystem::path output_dir = ".";
  int verbosity = 0;
};

struct ResolvedConfig
{
  StudyConfig study;
  std::filesystem::path output_dir;
  int threads = 0;  // 0 keeps the runtime default
};

// Typed configuration from raw values. Throws ArgumentError for bad values.
ResolvedConfig resolve_config(const RawConfig &raw, const std::filesystem::path &output_dir);

// Path of `relative` inside `dir`. Throws ArgumentError for absolute paths or
// paths that leave the directory.
std::filesystem::path output_path(const std::filesystem::path &dir, const std::string &relative);

// Runs the command line (args[0] is the program name) and returns the exit
// code. The last line written to `out` is the status line.
int dispatch(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace mxfem::cli

#endif  // MXFEM_TOOLS_CLI_HPP
