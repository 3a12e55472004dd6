#include "commands.hpp"
#include "config.hpp"

#include "qplab/error.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <map>
#include <memory>

using namespace qplab;
using namespace qplab::cli;

namespace {

struct Sub {
  CLI::App* app = nullptr;
  const CommandDef* def = nullptr;
  std::string config_path;
  std::map<std::string, std::string> raw;
};

Json read_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::validation, "cli", "--config: cannot open " + path);
  try {
    return Json::parse(f);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::validation, "cli", "--config: " + std::string(e.what()));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qplab: numerical lab for quasiperiodic SL(2,R) cocycles"};
  app.require_subcommand(1);
  std::vector<std::unique_ptr<Sub>> subs;
  for (const auto& d : command_defs()) {
    auto s = std::make_unique<Sub>();
    s->def = &d;
    s->app = app.add_subcommand(d.name, d.help);
    s->app->add_option("--config", s->config_path, "JSON config; flags override it");
    for (const auto& p : d.params) {
      std::string help = p.help + " [default: " + (p.def.is_string() ? p.def.get<std::string>() : p.def.dump()) + "]";
      s->app->add_option(flag_name(p.name), s->raw[p.name], help);
    }
    subs.push_back(std::move(s));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  for (const auto& s : subs) {
    if (!s->app->parsed()) continue;
    try {
      auto cfg = s->config_path.empty() ? ExperimentConfig::defaults(s->def->name)
                                        : ExperimentConfig::from_json(read_config(s->config_path), s->def->name);
      for (const auto& p : s->def->params)
        if (s->app->count(flag_name(p.name)) > 0) cfg.set_raw(p.name, s->raw[p.name]);
      auto res = run(cfg);
      for (const auto& a : res.artifacts) std::cout << a << '\n';
      if (!res.note.empty()) std::cerr << (res.exit_code == 2 ? "refused: " : "note: ") << res.note << '\n';
      return res.exit_code;
    } catch (const Error& e) {
      std::cerr << "error [" << e.module() << "/" << to_string(e.code()) << "]: " << e.what() << '\n';
      return e.soft() ? 2 : 1;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return 1;
    }
  }
  return 1;
}
