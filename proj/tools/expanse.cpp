#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "expanse/config.hpp"
#include "expanse/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"expanse: numerical checks of expansivity, shadowing and entropy for flows"};
  std::string task, config_path, out_dir;
  long long seed = -1;
  std::vector<std::string> overrides;
  app.add_option("task", task, "check | falsify | equicontinuity | ball-inclusion | constants | "
                               "shadow | entropy | hstar | xdelta")
      ->required();
  app.add_option("--config", config_path, "JSON experiment config")->required();
  app.add_option("--out", out_dir, "output directory (overrides output.dir)");
  app.add_option("--seed", seed, "random seed (overrides sampling.seed)")->check(CLI::NonNegativeNumber);
  app.add_option("--override", overrides, "key=value, dotted keys, repeatable");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : expanse::kExitError;
  }

  try {
    expanse::Json cfg = expanse::resolve_config(expanse::load_config(config_path));
    for (const auto& o : overrides) expanse::apply_override(cfg, o);
    if (seed >= 0) cfg["sampling"]["seed"] = seed;
    if (!out_dir.empty()) cfg["output"]["dir"] = out_dir;
    std::vector<std::filesystem::path> written;
    const int rc = expanse::run_task(task, cfg, &written);
    if (!written.empty())
      std::cout << written.front().string() << " (" << written.size() << " files written)\n";
    return rc;
  } catch (const std::exception& e) {
    std::cerr << "expanse: " << e.what() << "\n";
    return expanse::kExitError;
  }
}
