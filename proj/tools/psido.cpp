#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "psido/commands.hpp"
#include "psido/errors.hpp"

namespace {

int report_error(const std::string& category, const std::string& message, int code) {
  const nlohmann::json diag = {{"error", {{"category", category}, {"message", message}, {"exit_code", code}}}};
  std::cerr << diag.dump() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"psido: pseudo-differential operators on compact Lie groups"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::string ladder;
  app.add_option("--config", config_path, "JSON run configuration");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "seed for randomized suites");
  app.add_option("--ladder", ladder, "comma list of window cutoffs");

  struct Entry {
    const char* name;
    const char* help;
    psido::CommandResult (*run)(const psido::RunConfig&);
  };
  const Entry entries[] = {
      {"spectrum", "singular values and Schatten ladders", psido::cmd_spectrum},
      {"quantize", "apply Op(sigma) to a function and export the matrix", psido::cmd_quantize},
      {"verify", "run the configured criteria", psido::cmd_verify},
      {"atypical", "reproduce the dyadic non-elliptic example", psido::cmd_atypical},
      {"series", "lemma-series sweeps", psido::cmd_series},
  };
  for (const auto& e : entries) app.add_subcommand(e.name, e.help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return report_error("config", e.what(), psido::exit_config);
  }

  try {
    psido::RunConfig config = config_path.empty() ? psido::parse_config(nlohmann::json::object())
                                                  : psido::load_config(config_path);
    if (!out_dir.empty()) config.output = out_dir;
    if (seed) config.seed = *seed;
    if (!ladder.empty()) config.ladder = psido::parse_ladder(ladder);

    for (const auto& e : entries) {
      if (!app.got_subcommand(e.name)) continue;
      const auto result = e.run(config);
      for (const auto& f : result.files) std::cout << f.string() << '\n';
      return result.exit_code;
    }
  } catch (const psido::Error& e) {
    const bool config_error = e.category() == psido::Error::Category::config;
    return report_error(config_error ? "config" : "numerical", e.what(),
                        config_error ? psido::exit_config : psido::exit_numerical);
  } catch (const std::filesystem::filesystem_error& e) {
    return report_error("config", e.what(), psido::exit_config);
  } catch (const std::exception& e) {
    return report_error("numerical", e.what(), psido::exit_numerical);
  }
  return psido::exit_config;
}
