#include <CLI11.hpp>
#include <iostream>

#include "sbl/csv.hpp"
#include "sbl/experiments.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  bool seed_given = false;
  bool verify = false;
};

void attach(CLI::App* sub, CommonOpts* opts) {
  sub->add_option("--config", opts->config_path, "flat key = value config file");
  sub->add_option("--out", opts->out_dir, "output directory")->capture_default_str();
  sub->add_option("--seed", opts->seed, "override the config seed")
      ->each([opts](const std::string&) { opts->seed_given = true; });
  sub->add_flag("--verify", opts->verify,
                "re-check the manifest hashes in --out instead of running");
}

int run(CommonOpts& opts, int (*cmd)(sbl::ExperimentConfig&, const std::string&)) {
  if (opts.verify) {
    const auto bad = sbl::verify_manifest(opts.out_dir + "/manifest.txt");
    if (bad.empty()) {
      std::cout << "manifest verified: all hashes match\n";
      return 0;
    }
    for (const auto& p : bad) std::cerr << "hash mismatch: " << p << "\n";
    return 1;
  }
  sbl::ExperimentConfig cfg = opts.config_path.empty()
                                  ? sbl::ExperimentConfig()
                                  : sbl::ExperimentConfig::from_file(opts.config_path);
  if (opts.seed_given) cfg.set("seed", std::to_string(opts.seed));
  return cmd(cfg, opts.out_dir);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "sbl: frequency-bias experiments for 2-layer ReLU training on spherical data.\n"
      "Every run writes CSVs, SVG plots, the fully-resolved config, and a content-hash\n"
      "manifest into --out. CSV columns: spectrum.csv (ell,mu | ell,mu_closed,mu_numeric);\n"
      "rule.csv (x,y[,z],c); exactness.csv (ell,max_moment_error); gamma.csv\n"
      "(ell,gamma_estimate); trace.csv (epoch,loss,freq_loss_ell1,...); frequency-loss\n"
      "reports (epoch,ell,value); rainbow.csv (s,ell,final_freq_loss,eta); denoise.csv\n"
      "(noise,s,seed,clean_error). Exit codes: 0 ok, 1 numeric failure, 2 I/O or config\n"
      "error."};
  app.require_subcommand(1);

  struct Entry {
    const char* name;
    const char* help;
    int (*cmd)(sbl::ExperimentConfig&, const std::string&);
    CommonOpts opts;
  };
  std::vector<Entry> entries = {
      {"spectrum", "kernel eigenvalues mu_ell (keys: d, ell_max, method=closed|numeric|dense|both)",
       sbl::cmd_spectrum, {}},
      {"quad",
       "design positive quadrature weights (keys: nodes_file | n_base,n_arc1,n_arc2; degree; "
       "gamma_degrees)",
       sbl::cmd_quad, {}},
      {"train",
       "single S^1 training run (keys: loss=quadrature|mse|sobolev, s, ell_max, m, epochs, eta, "
       "band, seed, ...)",
       sbl::cmd_train, {}},
      {"fig1",
       "three-arc frequency-bias study: nodes plot, frequency losses under both losses, "
       "iteration scaling",
       sbl::cmd_fig1, {}},
      {"fig2", "Sobolev-loss rainbow over s (keys: s_grid, ell_max, m, epochs, seed)",
       sbl::cmd_fig2, {}},
      {"fig3",
       "S^2 frequency losses for s in {-1, 0, 2.5} (keys: nodes_file, max_nodes, degree, m, "
       "epochs_grid)",
       sbl::cmd_fig3, {}},
      {"image-demo", "synthetic image denoising under the spectral-mask loss (keys: s_grid, "
                     "epochs, n_images, seeds)",
       sbl::cmd_image_demo, {}},
  };
  for (auto& e : entries) attach(app.add_subcommand(e.name, e.help), &e.opts);

  CLI11_PARSE(app, argc, argv);

  for (auto& e : entries) {
    if (!app.get_subcommand(e.name)->parsed()) continue;
    try {
      return run(e.opts, e.cmd);
    } catch (const sbl::IoError& err) {
      std::cerr << "I/O error: " << err.what() << "\n";
      return 2;
    } catch (const sbl::ConfigError& err) {
      std::cerr << "config error: " << err.what() << "\n";
      return 2;
    } catch (const std::exception& err) {
      std::cerr << "error: " << err.what() << "\n";
      return 1;
    }
  }
  return 2;
}
