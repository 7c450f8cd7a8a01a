#pragma once

#include <string>

#include "sbl/config.hpp"
#include "sbl/diagnostics.hpp"
#include "sbl/sobolev.hpp"
#include "sbl/trainer.hpp"

namespace sbl {

// ---- shared experiment drivers (also used by the acceptance suite) ----

// 0.9 / (2 lambda_max(H P)): the spectral step-size rule used when a config
// says `eta = auto`. Pass the kernel the dynamics actually see — for a
// width-m run that is the empirical H(0), whose noise directions the
// Sobolev weights amplify beyond anything in H^inf.
double auto_eta(const KernelMatrix& h, const LossOperator& p, double safety = 0.9);

// Per-epoch S^1 frequency losses |N_hat(l) - g_hat(l)| for l = 0..cap while
// training on the rule's nodes. eta <= 0 selects the spectral rule on the
// initial empirical kernel.
struct FrequencyRun {
  TrainingTrace trace;
  std::vector<int> epochs;  // recorded epochs
  Matrix freq;              // one row per recorded epoch, columns l = 0..cap
  double eta = 0.0;
};

FrequencyRun train_s1_frequencies(const QuadratureRule& rule, const HarmonicExpansion& target,
                                  const LossOperator& p, int m, int epochs, double eta,
                                  std::uint64_t seed, int cap, int record_stride,
                                  double kappa = 1.0);

// Same on S^2, tracking |N_hat_{l,p} - g_hat_{l,p}| for the given (l, p)
// pairs via quadrature projection.
FrequencyRun train_s2_frequencies(const QuadratureRule& rule, const HarmonicExpansion& target,
                                  const LossOperator& p, int m, int epochs, double eta,
                                  std::uint64_t seed, const std::vector<HarmonicIndex>& track,
                                  int record_stride, double kappa = 1.0);

// First recorded epoch at which the column drops to <= fraction of its
// initial value; -1 when censored (never crosses within the run).
int epochs_to_fraction(const FrequencyRun& run, int column, double fraction);

// Epochs for the training loss to fall below an absolute threshold; -1 when
// censored.
int epochs_to_loss_threshold(const TrainingTrace& trace, double threshold);

// Synthetic image-denoising demo: trains a dense ReLU autoencoder on smooth
// blob images contaminated with low- or high-frequency noise under the
// spectral mask loss, and returns the mean squared reconstruction error
// against the clean references.
double image_demo_clean_error(double s, bool high_frequency_noise, std::uint64_t seed,
                              int epochs = 800, int n_images = 32, int image_size = 16,
                              double step = 0.1);

SpherePointSet subsample_stride(const SpherePointSet& pts, int max_points);

// ---- CLI subcommands ----
// Each writes CSV/SVG outputs plus config_resolved.txt and manifest.txt into
// out_dir and returns the process exit code (0 ok, 1 numeric, 2 I/O-config).
int cmd_spectrum(ExperimentConfig& cfg, const std::string& out_dir);
int cmd_quad(ExperimentConfig& cfg, const std::string& out_dir);
int cmd_train(ExperimentConfig& cfg, const std::string& out_dir);
int cmd_fig1(ExperimentConfig& cfg, const std::string& out_dir);
int cmd_fig2(ExperimentConfig& cfg, const std::string& out_dir);
int cmd_fig3(ExperimentConfig& cfg, const std::string& out_dir);
int cmd_image_demo(ExperimentConfig& cfg, const std::string& out_dir);

}  // namespace sbl
