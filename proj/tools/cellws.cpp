// cellws: command-line front end for the segmentation toolchain.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "cellws/app/commands.hpp"
#include "cellws/app/config.hpp"
#include "cellws/raster_io.hpp"

namespace app = cellws::app;
namespace fs = std::filesystem;

namespace {

struct Common {
  std::string config;
  std::string seq;
  int workers = 1;
  std::optional<std::uint64_t> seed;
  std::string out;
};

void add_common(CLI::App* cmd, Common& c, bool needs_config = true) {
  auto* opt = cmd->add_option("--config", c.config, "Dataset config file");
  if (needs_config) opt->required();
  cmd->add_option("--seq", c.seq, "Restrict to one sequence id");
  cmd->add_option("--workers", c.workers, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", c.seed, "Override the config seed");
  cmd->add_option("--out", c.out, "Output directory");
}

app::RunOptions options(const Common& c, app::Diagnostics& diag) {
  app::RunOptions o;
  if (!c.seq.empty()) o.seq = c.seq;
  o.workers = c.workers;
  o.seed = c.seed;
  o.out = c.out;
  o.diag = &diag;
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"Marker-controlled watershed cell segmentation toolchain"};
  cli.require_subcommand(1);
  app::Diagnostics diag(std::cerr);

  Common c;
  app::SynthSpec synth;
  std::string synth_out;
  auto* synth_cmd = cli.add_subcommand("synth", "Write the synthetic ellipse dataset");
  synth_cmd->add_option("--out", synth_out, "Dataset directory")->required();
  synth_cmd->add_option("--frames", synth.frames, "Number of frames");
  synth_cmd->add_option("--width", synth.width);
  synth_cmd->add_option("--height", synth.height);
  synth_cmd->add_option("--seed", synth.seed);
  synth_cmd->add_option("--seq", synth.sequence, "Sequence id");

  std::string preset_name;
  auto* preset_cmd = cli.add_subcommand("preset", "Print a built-in config preset");
  preset_cmd->add_option("name", preset_name, "dic-hela, fluo-sim, phc-psc or synthetic")->required();

  auto* prepare_cmd = cli.add_subcommand("prepare", "Normalized images, reference outputs and weight maps");
  add_common(prepare_cmd, c);

  app::OraclePredictorSpec oracle_override;
  auto* oracle_cmd = cli.add_subcommand("oracle-predict", "Blurred-reference stand-in predictions");
  add_common(oracle_cmd, c);
  auto* sigma_opt = oracle_cmd->add_option("--sigma", oracle_override.sigma, "Blur sigma in pixels");
  auto* noise_opt = oracle_cmd->add_option("--noise", oracle_override.noise, "Uniform noise amplitude");
  auto* k_opt = oracle_cmd->add_option("--k", oracle_override.k, "Marker erosion ratio");

  std::string pred_dir;
  auto* calibrate_cmd = cli.add_subcommand("calibrate", "Choose t_c (and d_inf) and write them into the config");
  add_common(calibrate_cmd, c);
  calibrate_cmd->add_option("--pred", pred_dir, "Prediction directory (default <root>/pred)");

  auto* segment_cmd = cli.add_subcommand("segment", "Segment every frame into <out>/<seq>_RES");
  add_common(segment_cmd, c);
  segment_cmd->add_option("--pred", pred_dir, "Prediction directory (default <root>/pred)");

  std::string results_dir;
  auto* evaluate_cmd = cli.add_subcommand("evaluate", "SEG, DET and OP_CSB against the annotations");
  add_common(evaluate_cmd, c);
  evaluate_cmd->add_option("--results", results_dir, "Directory holding <seq>_RES (default <root>)");

  std::string experiment_name;
  auto* experiment_cmd = cli.add_subcommand("experiment", "Comparison tables on the oracle predictor");
  add_common(experiment_cmd, c);
  experiment_cmd->add_option("name", experiment_name, "augmentation, segfunction or markertype")->required();

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return cli.exit(e);
    diag.error("cli", e.what());
    return 1;
  }

  std::string cmd_name = cli.get_subcommands().front()->get_name();
  try {
    if (*synth_cmd) {
      app::cmd_synth(synth_out, synth, options(c, diag));
      return 0;
    }
    if (*preset_cmd) {
      std::cout << app::preset_text(preset_name);
      return 0;
    }

    app::DatasetConfig config = app::load_config(c.config);
    const app::RunOptions opt = options(c, diag);
    const fs::path pred = pred_dir.empty() ? config.root / "pred" : fs::path(pred_dir);
    if (*prepare_cmd) {
      app::cmd_prepare(config, opt);
    } else if (*oracle_cmd) {
      if (*sigma_opt) config.oracle.sigma = oracle_override.sigma;
      if (*noise_opt) config.oracle.noise = oracle_override.noise;
      if (*k_opt) config.oracle.k = oracle_override.k;
      app::cmd_oracle_predict(config, opt);
    } else if (*calibrate_cmd) {
      app::cmd_calibrate(config, pred, opt);
    } else if (*segment_cmd) {
      app::cmd_segment(config, pred, opt);
    } else if (*evaluate_cmd) {
      const app::EvalSummary s =
          app::cmd_evaluate(config, results_dir.empty() ? config.root : fs::path(results_dir), opt);
      std::cout << app::eval_to_csv(s);
    } else if (*experiment_cmd) {
      std::cout << app::cmd_experiment(experiment_name, config, opt);
    }
    return 0;
  } catch (const app::UsageError& e) {
    diag.error(cmd_name, e.what());
    return 1;
  } catch (const app::DataError& e) {
    diag.error(cmd_name, e.what());
    return 2;
  } catch (const cellws::IoError& e) {
    diag.error(cmd_name, e.what());
    return 2;
  } catch (const std::exception& e) {
    diag.error(cmd_name, e.what());
    return 2;
  }
}
