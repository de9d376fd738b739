// spa-tool: command-line front end over the C API.
//
//   spa-tool generate --out data/clean --samples 200 --photons 1e6 --seed 7
//   spa-tool noise    --dataset data/clean --out data/noisy --snr 35,30,25,20,15,10,5,0
//   spa-tool unmix    --dataset data/noisy/snr_30 --out pred/lu
//   spa-tool eval     --dataset data/noisy/snr_30 --predictions pred/lu --out reports/lu
//   spa-tool export   --dataset data/clean --out png/
//
// Exit codes: 0 success, 2 configuration error, 3 data error, 1 otherwise.

#include <CLI11.hpp>

#include <cstdio>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "spa/spa.h"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

int exit_code_for(spa_status status) {
  switch (status) {
    case SPA_OK: return 0;
    case SPA_ERR_CONFIG:
    case SPA_ERR_INVALID_ARGUMENT:
    case SPA_ERR_RANGE: return kExitConfig;
    case SPA_ERR_PARSE:
    case SPA_ERR_IO:
    case SPA_ERR_VERSION:
    case SPA_ERR_TRUNCATED:
    case SPA_ERR_CHECKSUM:
    case SPA_ERR_MISSING_ENTRY:
    case SPA_ERR_MISMATCH: return kExitData;
    case SPA_ERR_INTERNAL: return 1;
  }
  return 1;
}

using OptionsPtr = std::unique_ptr<spa_options, decltype(&spa_options_destroy)>;

/// Flag values collected by CLI11; unset flags leave config-file values alone.
struct Flags {
  std::string config;
  std::vector<std::string> sets;
  std::map<std::string, std::string> values;
};

int run(const std::string& name, const Flags& flags, spa_status (*command)(const spa_options*)) {
  spa_options* raw = nullptr;
  if (spa_options_create(&raw) != SPA_OK) return 1;
  OptionsPtr opts(raw, spa_options_destroy);

  auto report = [&](spa_status status) {
    std::fprintf(stderr, "spa-tool %s: %s: %s\n", name.c_str(), spa_status_name(status), spa_last_error());
    return exit_code_for(status);
  };

  if (!flags.config.empty()) {
    if (auto s = spa_options_load_file(opts.get(), flags.config.c_str()); s != SPA_OK) return report(s);
  }
  for (const auto& [key, value] : flags.values) {
    if (auto s = spa_options_set(opts.get(), key.c_str(), value.c_str()); s != SPA_OK) return report(s);
  }
  for (const auto& kv : flags.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "spa-tool %s: --set expects key=value, got '%s'\n", name.c_str(), kv.c_str());
      return kExitConfig;
    }
    const std::string key = kv.substr(0, eq);
    const std::string value = kv.substr(eq + 1);
    if (auto s = spa_options_set(opts.get(), key.c_str(), value.c_str()); s != SPA_OK) return report(s);
  }
  if (auto s = command(opts.get()); s != SPA_OK) return report(s);
  return 0;
}

/// Registers `--flag` and forwards its value to option `key` when given.
void forward(CLI::App* sub, Flags& flags, const std::string& flag, const std::string& key, const std::string& help) {
  sub->add_option_function<std::string>(
      flag, [&flags, key](const std::string& v) { flags.values[key] = v; }, help);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectroscopic photoacoustic simulation and oximetry toolkit"};
  app.set_version_flag("--version", std::string(spa_version()));
  app.require_subcommand(1);

  struct Command {
    const char* name;
    const char* help;
    spa_status (*fn)(const spa_options*);
  };
  const Command commands[] = {
      {"generate", "Simulate phantoms and write a clean dataset", spa_cmd_generate},
      {"noise", "Derive noisy datasets at the given SNR levels", spa_cmd_noise},
      {"unmix", "Linear-unmixing sO2 predictions", spa_cmd_unmix},
      {"eval", "Score predictions against a dataset", spa_cmd_eval},
      {"export", "Dump images as PGM, CSV or raw float32", spa_cmd_export},
      {"augment", "Rotation/shift/flip augmentation of a split", spa_cmd_augment},
  };

  std::map<std::string, Flags> flags;
  std::map<CLI::App*, const Command*> dispatch;
  for (const auto& cmd : commands) {
    Flags& f = flags[cmd.name];
    CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
    sub->add_option("--config", f.config, "Key-value config file (flags override it)")->check(CLI::ExistingFile);
    sub->add_option("--set", f.sets, "Extra option as key=value (repeatable)");
    forward(sub, f, "--seed", "seed", "Global seed (u64)");
    forward(sub, f, "--out", "out", "Output directory");
    const std::string name = cmd.name;
    if (name == "generate") {
      forward(sub, f, "--samples", "samples", "Number of samples");
      forward(sub, f, "--photons", "photons", "Photon packets per wavelength");
      forward(sub, f, "--threads", "threads", "Worker threads (0 = all cores)");
      forward(sub, f, "--spectrum", "spectrum", "Hemoglobin spectrum CSV");
    }
    if (name != "generate") forward(sub, f, "--dataset", "dataset", "Input dataset directory");
    if (name == "noise") forward(sub, f, "--snr", "snr", "Comma-separated SNR levels in dB");
    if (name == "unmix") {
      forward(sub, f, "--spectrum", "spectrum", "Hemoglobin spectrum CSV");
      forward(sub, f, "--mask", "mask", "Mask source: gt or file");
      forward(sub, f, "--mask-predictions", "mask_predictions", "Prediction dir whose seg channel is the mask");
    }
    if (name == "eval" || name == "export") {
      forward(sub, f, "--predictions", "predictions", "Prediction directory (contains pred/)");
    }
    if (name == "eval") forward(sub, f, "--seg-loss", "seg_loss", "dice, mse or auto");
    if (name == "export") forward(sub, f, "--format", "format", "Comma list of pgm, csv, f32 or all");
    if (name == "augment") forward(sub, f, "--copies", "copies", "Augmented copies per sample");
    if (name != "generate" && name != "noise") forward(sub, f, "--split", "split", "train, val, test or all");
    dispatch[sub] = &cmd;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  for (const auto& [sub, cmd] : dispatch) {
    if (sub->parsed()) return run(cmd->name, flags[cmd->name], cmd->fn);
  }
  return kExitConfig;
}
