#pragma once

#include "chromophores.hpp"
#include "mc_transport.hpp"
#include "metrics.hpp"
#include "options.hpp"
#include "phantom.hpp"

namespace spa::commands {

/// Typed views of the option keys shared by several commands.
PhantomConfig phantom_config_from(const Options& opts);
TransportConfig transport_config_from(const Options& opts);
BeamSpec beam_from(const Options& opts);
/// `spectrum = <csv>` or the built-in table at `hb_g_per_l` (default 150).
ChromophoreSpectrum spectrum_from(const Options& opts);

/// Each run_* validates its keys, performs the command and writes `run.log`
/// with the resolved configuration into its output directory.
void run_generate(const Options& opts);
void run_noise(const Options& opts);
void run_unmix(const Options& opts);
EvalReport run_eval(const Options& opts);
void run_export(const Options& opts);
void run_augment(const Options& opts);

}  // namespace spa::commands
