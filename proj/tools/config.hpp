#pragma once

#include "qplab/serialize.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qplab::cli {

using io::Json;

enum class ParamType { real, integer, text };

struct ParamDef {
  std::string name;  // config key; the flag is --name with '_' -> '-'
  ParamType type;
  Json def;
  std::string help;
};

struct CommandDef {
  std::string name;
  std::string help;
  std::vector<ParamDef> params;  // shared parameters included
};

const std::vector<CommandDef>& command_defs();
const CommandDef& command_def(const std::string& name);
std::string flag_name(const std::string& key);

// One experiment: the command plus every parameter it takes, defaults filled in.
struct ExperimentConfig {
  std::string command;
  Json values = Json::object();

  double real(const std::string& key) const;
  long long integer(const std::string& key) const;
  std::string text(const std::string& key) const;

  Json to_json() const;
  // Unknown keys and ill-typed values are validation errors naming the field path.
  static ExperimentConfig from_json(const Json& j, const std::string& command);
  static ExperimentConfig defaults(const std::string& command);

  // later sources override earlier ones
  void set(const std::string& key, const Json& value);
  void set_raw(const std::string& key, const std::string& raw);
};

}  // namespace qplab::cli
