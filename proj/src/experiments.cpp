#include "sbl/experiments.hpp"

#include <chrono>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "sbl/csv.hpp"
#include "sbl/rng.hpp"
#include "sbl/svg.hpp"

namespace sbl {
namespace {

namespace fs = std::filesystem;

// Output bookkeeping shared by every subcommand: collects written files and
// finalizes the resolved config + manifest pair.
class RunContext {
 public:
  explicit RunContext(std::string out_dir) : dir_(std::move(out_dir)), start_(clock_::now()) {
    fs::create_directories(dir_);
  }

  std::string path(const std::string& name) {
    const std::string p = (fs::path(dir_) / name).string();
    outputs_.push_back(p);
    return p;
  }

  void add_input(const std::string& p) { manifest_.add_input(p); }

  void finish(const ExperimentConfig& cfg) {
    cfg.finalize();
    const std::string resolved = (fs::path(dir_) / "config_resolved.txt").string();
    cfg.write_resolved(resolved);
    manifest_.set_config_hash(cfg.content_hash());
    manifest_.add_output(resolved);
    for (const auto& p : outputs_) manifest_.add_output(p);
    manifest_.set_wall_seconds(std::chrono::duration<double>(clock_::now() - start_).count());
    manifest_.write((fs::path(dir_) / "manifest.txt").string());
  }

 private:
  using clock_ = std::chrono::steady_clock;
  std::string dir_;
  RunManifest manifest_;
  std::vector<std::string> outputs_;
  clock_::time_point start_;
};

HarmonicExpansion sine_band_target(int band) {
  HarmonicExpansion g(2, band);
  for (int l = 1; l <= band; ++l) g.coef(l, 1) = std::sqrt(M_PI);
  return g;
}

HarmonicExpansion even_zonal_target(int top_degree) {
  HarmonicExpansion g(3, top_degree);
  for (int l = 2; l <= top_degree; l += 2) g.coef(l, 1) = 1.0;
  return g;
}

QuadratureRule rule_from_config(ExperimentConfig& cfg, RunContext& ctx, int def_base = 100,
                                int def_arc1 = 40, int def_arc2 = 1000, int def_degree = 55) {
  const std::string nodes_file = cfg.get_string("nodes_file", "");
  const int degree = cfg.get_int("degree", def_degree);
  if (!nodes_file.empty()) {
    ctx.add_input(nodes_file);
    const SpherePointSet pts = load_nodes_csv(nodes_file);
    return design_weights(pts, degree);
  }
  const int n_base = cfg.get_int("n_base", def_base);
  const int n_arc1 = cfg.get_int("n_arc1", def_arc1);
  const int n_arc2 = cfg.get_int("n_arc2", def_arc2);
  int collisions = 0;
  const SpherePointSet pts = three_arc_nodes(n_base, n_arc1, n_arc2, &collisions);
  if (collisions > 0)
    std::cerr << "three-arc grid: " << collisions << " duplicate angle(s) perturbed\n";
  return design_weights(pts, degree);
}

LossOperator loss_from_config(ExperimentConfig& cfg, const QuadratureRule& rule) {
  const std::string kind = cfg.get_string("loss", "quadrature");
  if (kind == "quadrature") return LossOperator::diagonal(rule.weights());
  if (kind == "mse") return LossOperator::scaled_identity(rule.size(), 1.0 / rule.size());
  if (kind == "sobolev") {
    const double s = cfg.get_double("s", 1.0);
    const int ell_max = cfg.get_int("ell_max", 30);
    return build_p_sobolev(rule, s, ell_max);
  }
  throw ConfigError("loss must be one of quadrature|mse|sobolev, got " + kind);
}

// <= 0 means "auto": the drivers resolve it against the initial empirical
// kernel of the run.
double eta_from_config(ExperimentConfig& cfg) {
  const std::string eta = cfg.get_string("eta", "auto");
  if (eta == "auto") return -1.0;
  try {
    return std::stod(eta);
  } catch (const std::exception&) {
    throw ConfigError("eta must be a number or 'auto', got " + eta);
  }
}

void write_frequency_csv(const FrequencyRun& run, const std::vector<int>& ells,
                         const std::string& path) {
  CsvTable t;
  t.columns = {"epoch", "ell", "value"};
  for (std::size_t r = 0; r < run.epochs.size(); ++r)
    for (int l : ells)
      t.rows.push_back({static_cast<double>(run.epochs[r]), static_cast<double>(l),
                        run.freq(static_cast<Eigen::Index>(r), l)});
  save_table_csv(t, path);
}

void write_trace_csv(const FrequencyRun& run, const std::string& path) {
  CsvTable t;
  t.columns = {"epoch", "loss"};
  for (int l = 1; l < run.freq.cols(); ++l) t.columns.push_back("freq_loss_ell" + std::to_string(l));
  for (std::size_t r = 0; r < run.epochs.size(); ++r) {
    std::vector<double> row = {static_cast<double>(run.epochs[r]),
                               run.trace.records[r].loss};
    for (int l = 1; l < run.freq.cols(); ++l) row.push_back(run.freq(static_cast<Eigen::Index>(r), l));
    t.rows.push_back(std::move(row));
  }
  save_table_csv(t, path);
}

// ---------------- image demo internals ----------------

Matrix blob_image(int size, Rng& rng) {
  Matrix img = Matrix::Zero(size, size);
  for (int b = 0; b < 3; ++b) {
    const double amp = 0.5 + 0.5 * rng.uniform();
    const double sigma = 1.5 + 1.5 * rng.uniform();
    const double cx = (size - 1) * rng.uniform();
    const double cy = (size - 1) * rng.uniform();
    for (int i = 0; i < size; ++i)
      for (int j = 0; j < size; ++j) {
        const double d2 = (i - cx) * (i - cx) + (j - cy) * (j - cy);
        img(i, j) += amp * std::exp(-d2 / (2.0 * sigma * sigma));
      }
  }
  // Mean-centered: keeps the signal spectrally separated from the
  // DC-and-neighborhood band the low-frequency noise occupies.
  img.array() -= img.mean();
  return img;
}

Matrix band_noise(int size, bool high_frequency, double rms, Rng& rng) {
  Matrix noise = Matrix::Zero(size, size);
  const int modes = 6;
  for (int k = 0; k < modes; ++k) {
    int f1, f2;
    if (high_frequency) {
      // Frequencies near Nyquist in at least one axis.
      f1 = 6 + static_cast<int>(rng.raw() % 3);
      f2 = static_cast<int>(rng.raw() % (size / 2));
      if (rng.raw() & 1) std::swap(f1, f2);
    } else {
      // At and next to DC, below the centered blobs' spectral mass.
      f1 = static_cast<int>(rng.raw() % 2);
      f2 = static_cast<int>(rng.raw() % 2);
    }
    const double phase1 = 2.0 * M_PI * rng.uniform();
    const double phase2 = 2.0 * M_PI * rng.uniform();
    const double amp = 0.5 + rng.uniform();
    for (int i = 0; i < size; ++i)
      for (int j = 0; j < size; ++j)
        noise(i, j) += amp * std::cos(2.0 * M_PI * f1 * i / size + phase1) *
                       std::cos(2.0 * M_PI * f2 * j / size + phase2);
  }
  const double cur = std::sqrt(noise.squaredNorm() / (size * size));
  if (cur > 0) noise *= rms / cur;
  return noise;
}

struct DenseAutoencoder {
  Matrix w1, w2;
  Vector b1, b2;

  static DenseAutoencoder init(int in, int hidden, Rng& rng) {
    DenseAutoencoder ae;
    ae.w1.resize(hidden, in);
    ae.w2.resize(in, hidden);
    for (int i = 0; i < hidden; ++i)
      for (int j = 0; j < in; ++j) ae.w1(i, j) = rng.normal() / std::sqrt(static_cast<double>(in));
    for (int i = 0; i < in; ++i)
      for (int j = 0; j < hidden; ++j)
        ae.w2(i, j) = rng.normal() / std::sqrt(static_cast<double>(hidden));
    ae.b1 = Vector::Zero(hidden);
    ae.b2 = Vector::Zero(in);
    return ae;
  }

  Matrix forward(const Matrix& x, Matrix* hidden_out = nullptr) const {
    Matrix h = ((w1 * x).colwise() + b1).cwiseMax(0.0);
    Matrix out = (w2 * h).colwise() + b2;
    if (hidden_out) *hidden_out = std::move(h);
    return out;
  }
};

}  // namespace

double auto_eta(const KernelMatrix& h, const LossOperator& p, double safety) {
  return safety / (2.0 * lambda_max_hp(h, p));
}

namespace {

// Spectral step size, additionally capped so the first step moves each
// neuron by at most move_cap * kappa: amplified losses can be stable for the
// linearized dynamics yet push the weights outside the regime where that
// linearization holds.
double resolve_eta(const TwoLayerReluNet& net, const QuadratureRule& rule, const Vector& y,
                   const LossOperator& p, double kappa, double move_cap = 0.05) {
  const double spectral = auto_eta(build_h_empirical(net, rule.nodes()), p);
  const NetGradient g = gradient(net, y, rule.nodes(), p);
  const double per_neuron =
      std::sqrt((g.dW.rowwise().squaredNorm().mean() + g.db.array().square().mean()));
  if (per_neuron <= 0.0) return spectral;
  return std::min(spectral, move_cap * kappa / per_neuron);
}

}  // namespace

FrequencyRun train_s1_frequencies(const QuadratureRule& rule, const HarmonicExpansion& target,
                                  const LossOperator& p, int m, int epochs, double eta,
                                  std::uint64_t seed, int cap, int record_stride, double kappa) {
  const Vector y = target.eval_batch(rule.nodes());
  const Eigen::VectorXcd gf = fourier_of_expansion(target, cap);
  const int grid_n = std::max(100, 2 * cap + 2);
  Vector th(grid_n);
  for (int j = 0; j < grid_n; ++j) th(j) = 2.0 * M_PI * j / grid_n;
  const SpherePointSet grid = SpherePointSet::from_angles(th);

  TwoLayerReluNet net = init_net(m, 2, kappa, seed, InitScheme::Antithetic);
  if (eta <= 0.0) eta = resolve_eta(net, rule, y, p, kappa);
  TrainConfig cfg;
  cfg.eta = eta;
  cfg.epochs = epochs;
  cfg.kappa = kappa;
  cfg.seed = seed;
  cfg.record_stride = record_stride;
  cfg.record_residuals = false;

  std::vector<TrainObserver> obs;
  obs.push_back([&](int, const TwoLayerReluNet& nn, const Vector&) {
    return frequency_loss_s1_from_samples(forward_batch(nn, grid), gf);
  });
  FrequencyRun run;
  run.trace = train(net, y, rule.nodes(), p, cfg, obs);
  run.eta = eta;
  const int rows = static_cast<int>(run.trace.records.size());
  run.freq.resize(rows, cap + 1);
  for (int r = 0; r < rows; ++r) {
    run.epochs.push_back(run.trace.records[static_cast<std::size_t>(r)].epoch);
    run.freq.row(r) = run.trace.records[static_cast<std::size_t>(r)].observed.transpose();
  }
  return run;
}

FrequencyRun train_s2_frequencies(const QuadratureRule& rule, const HarmonicExpansion& target,
                                  const LossOperator& p, int m, int epochs, double eta,
                                  std::uint64_t seed, const std::vector<HarmonicIndex>& track,
                                  int record_stride, double kappa) {
  const Vector y = target.eval_batch(rule.nodes());
  // Projection rows for the tracked coefficients only.
  Matrix proj(static_cast<Eigen::Index>(track.size()), rule.size());
  Vector ghat(static_cast<Eigen::Index>(track.size()));
  for (std::size_t t = 0; t < track.size(); ++t) {
    proj.row(static_cast<Eigen::Index>(t)) =
        (eval_harmonic_batch(3, track[t], rule.nodes()).cwiseProduct(rule.weights())).transpose();
    ghat(static_cast<Eigen::Index>(t)) =
        (track[t].degree <= target.max_degree()) ? target.coef(track[t].degree, track[t].order)
                                                 : 0.0;
  }

  TwoLayerReluNet net = init_net(m, 3, kappa, seed, InitScheme::Antithetic);
  if (eta <= 0.0) eta = resolve_eta(net, rule, y, p, kappa);
  TrainConfig cfg;
  cfg.eta = eta;
  cfg.epochs = epochs;
  cfg.kappa = kappa;
  cfg.seed = seed;
  cfg.record_stride = record_stride;
  cfg.record_residuals = false;

  std::vector<TrainObserver> obs;
  obs.push_back([&](int, const TwoLayerReluNet&, const Vector& z) {
    // u = y - z at the nodes; project the net output.
    const Vector nhat = proj * (y - z);
    return (nhat - ghat).cwiseAbs().eval();
  });
  FrequencyRun run;
  run.trace = train(net, y, rule.nodes(), p, cfg, obs);
  run.eta = eta;
  const int rows = static_cast<int>(run.trace.records.size());
  run.freq.resize(rows, static_cast<Eigen::Index>(track.size()));
  for (int r = 0; r < rows; ++r) {
    run.epochs.push_back(run.trace.records[static_cast<std::size_t>(r)].epoch);
    run.freq.row(r) = run.trace.records[static_cast<std::size_t>(r)].observed.transpose();
  }
  return run;
}

int epochs_to_fraction(const FrequencyRun& run, int column, double fraction) {
  const double start = run.freq(0, column);
  for (std::size_t r = 0; r < run.epochs.size(); ++r)
    if (run.freq(static_cast<Eigen::Index>(r), column) <= fraction * start)
      return run.epochs[r];
  return -1;
}

int epochs_to_loss_threshold(const TrainingTrace& trace, double threshold) {
  for (const auto& rec : trace.records)
    if (rec.loss < threshold) return rec.epoch;
  return -1;
}

SpherePointSet subsample_stride(const SpherePointSet& pts, int max_points) {
  if (pts.size() <= max_points) return pts;
  const int stride = (pts.size() + max_points - 1) / max_points;
  std::vector<int> idx;
  for (int i = 0; i < pts.size(); i += stride) idx.push_back(i);
  Matrix sub(static_cast<Eigen::Index>(idx.size()), pts.dim());
  for (std::size_t k = 0; k < idx.size(); ++k)
    sub.row(static_cast<Eigen::Index>(k)) = pts.matrix().row(idx[k]);
  return SpherePointSet(std::move(sub));
}

double image_demo_clean_error(double s, bool high_frequency_noise, std::uint64_t seed, int epochs,
                              int n_images, int image_size, double step) {
  Rng rng(seed);
  const int npx = image_size * image_size;
  std::vector<Matrix> clean, noisy;
  for (int i = 0; i < n_images; ++i) {
    clean.push_back(blob_image(image_size, rng));
    noisy.push_back(clean.back() + band_noise(image_size, high_frequency_noise, high_frequency_noise ? 0.25 : 0.35, rng));
  }
  Matrix x(npx, n_images);
  for (int i = 0; i < n_images; ++i)
    x.col(i) = Eigen::Map<const Vector>(noisy[static_cast<std::size_t>(i)].data(), npx);

  const ImageSobolevMask mask = build_image_mask(image_size, image_size, s);
  DenseAutoencoder ae = DenseAutoencoder::init(npx, 64, rng);

  // The masked loss scales gradients by up to mask_max^2; normalize the step
  // so one setting is stable across the s grid.
  const double mask_max = mask.mask.maxCoeff();
  const double step_eff = step / (mask_max * mask_max);

  for (int e = 0; e < epochs; ++e) {
    Matrix hidden;
    const Matrix out = ae.forward(x, &hidden);
    Matrix gout(npx, n_images);
    for (int i = 0; i < n_images; ++i) {
      const Matrix pred = Eigen::Map<const Matrix>(out.col(i).data(), image_size, image_size);
      const Matrix g = image_sobolev_loss_grad(pred, noisy[static_cast<std::size_t>(i)], mask);
      gout.col(i) = Eigen::Map<const Vector>(g.data(), npx) / n_images;
    }
    const Matrix dw2 = gout * hidden.transpose();
    const Vector db2 = gout.rowwise().sum();
    Matrix gh = ae.w2.transpose() * gout;
    gh = (hidden.array() > 0.0).select(gh, 0.0);
    const Matrix dw1 = gh * x.transpose();
    const Vector db1 = gh.rowwise().sum();
    ae.w2 -= step_eff * dw2;
    ae.b2 -= step_eff * db2;
    ae.w1 -= step_eff * dw1;
    ae.b1 -= step_eff * db1;
  }

  const Matrix out = ae.forward(x);
  double err = 0.0;
  for (int i = 0; i < n_images; ++i) {
    const Matrix rec = Eigen::Map<const Matrix>(out.col(i).data(), image_size, image_size);
    err += (rec - clean[static_cast<std::size_t>(i)]).squaredNorm();
  }
  return err / n_images;
}

// ---------------- subcommands ----------------

int cmd_spectrum(ExperimentConfig& cfg, const std::string& out_dir) {
  RunContext ctx(out_dir);
  const int d = cfg.get_int("d", 3);
  const int ell_max = cfg.get_int("ell_max", 20);
  const std::string method = cfg.get_string("method", d % 2 == 1 ? "closed" : "numeric");

  CsvTable t;
  Vector mu;
  if (method == "both") {
    const KernelSpectrum a = kernel_spectrum(d, ell_max, SpectrumMethod::ClosedForm);
    const KernelSpectrum b = kernel_spectrum(d, ell_max, SpectrumMethod::FunkHecke1d);
    t.columns = {"ell", "mu_closed", "mu_numeric"};
    for (int l = 0; l <= ell_max; ++l) t.rows.push_back({static_cast<double>(l), a.mu(l), b.mu(l)});
    mu = b.values();
  } else {
    SpectrumMethod sm;
    if (method == "closed")
      sm = SpectrumMethod::ClosedForm;
    else if (method == "numeric")
      sm = SpectrumMethod::FunkHecke1d;
    else if (method == "dense")
      sm = SpectrumMethod::DenseSphere;
    else
      throw ConfigError("method must be closed|numeric|dense|both, got " + method);
    const KernelSpectrum spec = kernel_spectrum(d, ell_max, sm);
    t.columns = {"ell", "mu"};
    for (int l = 0; l <= ell_max; ++l) t.rows.push_back({static_cast<double>(l), spec.mu(l)});
    mu = spec.values();
  }
  save_table_csv(t, ctx.path("spectrum.csv"));

  SvgPlot plot("kernel eigenvalues, d = " + std::to_string(d), "ell", "mu");
  plot.set_log_x(true);
  plot.set_log_y(true);
  Vector ls(ell_max), ms(ell_max), ref(ell_max);
  for (int l = 1; l <= ell_max; ++l) {
    ls(l - 1) = l;
    ms(l - 1) = mu(l);
    ref(l - 1) = mu(std::min(5, ell_max)) * std::pow(static_cast<double>(l) / std::min(5, ell_max),
                                                     -static_cast<double>(d));
  }
  plot.add_line(ls, ms, "mu", "rgb(30,60,245)", 2.0);
  plot.add_line(ls, ref, "ell^-d reference", "black", 1.0, true);
  plot.write(ctx.path("spectrum.svg"));
  ctx.finish(cfg);
  return 0;
}

int cmd_quad(ExperimentConfig& cfg, const std::string& out_dir) {
  RunContext ctx(out_dir);
  const QuadratureRule rule = rule_from_config(cfg, ctx);
  const std::vector<double> gamma_req = cfg.get_list("gamma_degrees", {});
  const int gamma_trials = cfg.get_int("gamma_trials", 32);
  const std::uint64_t seed = cfg.get_u64("seed", 7);

  save_rule_csv(rule, ctx.path("rule.csv"));

  std::vector<int> gdeg;
  for (double g : gamma_req) gdeg.push_back(static_cast<int>(g));
  const ExactnessReport rep = exactness_report(rule, rule.certified_degree(), gdeg, gamma_trials, seed);

  CsvTable moments;
  moments.columns = {"ell", "max_moment_error"};
  for (int l = 0; l < rep.max_moment_error.size(); ++l)
    moments.rows.push_back({static_cast<double>(l), rep.max_moment_error(l)});
  save_table_csv(moments, ctx.path("exactness.csv"));

  if (!gdeg.empty()) {
    CsvTable gt;
    gt.columns = {"ell", "gamma_estimate"};
    for (std::size_t i = 0; i < gdeg.size(); ++i)
      gt.rows.push_back({static_cast<double>(gdeg[i]), rep.gamma(static_cast<Eigen::Index>(i))});
    save_table_csv(gt, ctx.path("gamma.csv"));
  }

  if (rule.dim() == 2) {
    SvgPlot plot("quadrature nodes and weights", "cos theta", "sin theta");
    plot.add_scatter(rule.nodes().matrix().col(0), rule.nodes().matrix().col(1), "nodes",
                     "rgb(30,60,245)", 1.5);
    plot.write(ctx.path("nodes.svg"));
  }
  ctx.finish(cfg);
  return 0;
}

int cmd_train(ExperimentConfig& cfg, const std::string& out_dir) {
  RunContext ctx(out_dir);
  const QuadratureRule rule = rule_from_config(cfg, ctx);
  if (rule.dim() != 2) throw ConfigError("train: S^1 node sets only (use fig3 for S^2)");
  const LossOperator p = loss_from_config(cfg, rule);
  const double eta = eta_from_config(cfg);
  const int m = cfg.get_int("m", 1 << 14);
  const int epochs = cfg.get_int("epochs", 1000);
  const int band = cfg.get_int("band", 9);
  const int cap = cfg.get_int("freq_cap", 30);
  const int stride = cfg.get_int("record_stride", 10);
  const double kappa = cfg.get_double("kappa", 1.0);
  const std::uint64_t seed = cfg.get_u64("seed", 1);

  const FrequencyRun run = train_s1_frequencies(rule, sine_band_target(band), p, m, epochs, eta,
                                                seed, cap, stride, kappa);
  cfg.note_resolved("eta_used", format_full(run.eta));
  save_rule_csv(rule, ctx.path("rule.csv"));
  write_trace_csv(run, ctx.path("trace.csv"));
  ctx.finish(cfg);
  return 0;
}

int cmd_fig1(ExperimentConfig& cfg, const std::string& out_dir) {
  RunContext ctx(out_dir);
  const QuadratureRule rule = rule_from_config(cfg, ctx);
  const int m = cfg.get_int("m", 1 << 14);
  const int epochs = cfg.get_int("epochs", 600);
  const int stride = cfg.get_int("record_stride", 2);
  const double kappa = cfg.get_double("kappa", 1.0);
  const std::uint64_t seed = cfg.get_u64("seed", 1);
  const int sweep_m = cfg.get_int("sweep_m", 1 << 13);
  const int sweep_max_epochs = cfg.get_int("sweep_max_epochs", 20000);
  const double sweep_threshold = cfg.get_double("sweep_threshold", 1e-3);

  const HarmonicExpansion target = sine_band_target(9);
  const LossOperator p_mse = LossOperator::scaled_identity(rule.size(), 1.0 / rule.size());
  const LossOperator p_quad = LossOperator::diagonal(rule.weights());

  save_rule_csv(rule, ctx.path("rule.csv"));
  {
    SvgPlot plot("three-arc training nodes", "cos theta", "sin theta");
    plot.add_scatter(rule.nodes().matrix().col(0), rule.nodes().matrix().col(1), "",
                     "rgb(30,60,245)", 1.5);
    plot.write(ctx.path("nodes.svg"));
  }

  // Panel 2: frequency losses under both losses, each with its own step size.
  const double eta = eta_from_config(cfg);
  const FrequencyRun run_mse =
      train_s1_frequencies(rule, target, p_mse, m, epochs, eta, seed, 30, stride, kappa);
  const FrequencyRun run_quad =
      train_s1_frequencies(rule, target, p_quad, m, epochs, eta, seed, 30, stride, kappa);
  cfg.note_resolved("eta_used_mse", format_full(run_mse.eta));
  cfg.note_resolved("eta_used_quadrature", format_full(run_quad.eta));
  const std::vector<int> ells = {1, 5, 9};
  write_frequency_csv(run_mse, ells, ctx.path("freq_loss_mse.csv"));
  write_frequency_csv(run_quad, ells, ctx.path("freq_loss_quadrature.csv"));
  {
    SvgPlot plot("frequency losses (solid: quadrature loss, dashed: mse)", "epoch", "loss");
    plot.set_log_y(true);
    Vector ep(run_quad.epochs.size());
    for (std::size_t i = 0; i < run_quad.epochs.size(); ++i)
      ep(static_cast<Eigen::Index>(i)) = run_quad.epochs[i];
    for (std::size_t k = 0; k < ells.size(); ++k) {
      const std::string color = SvgPlot::rainbow_color(static_cast<int>(k), 3);
      plot.add_line(ep, run_quad.freq.col(ells[k]), "ell=" + std::to_string(ells[k]), color, 2.0);
      plot.add_line(ep, run_mse.freq.col(ells[k]), "", color, 1.2, true);
    }
    plot.write(ctx.path("freq_loss.svg"));
  }

  // Panel 3: iterations to reach the loss threshold per single frequency.
  CsvTable iters;
  iters.columns = {"ell", "iterations"};
  std::vector<std::pair<double, double>> pts;
  for (int l = 3; l <= 10; ++l) {
    HarmonicExpansion gl(2, l);
    gl.coef(l, 1) = std::sqrt(M_PI);
    try {
      const FrequencyRun r = train_s1_frequencies(rule, gl, p_quad, sweep_m, sweep_max_epochs,
                                                  eta, seed + l, l, 1, kappa);
      const int k = epochs_to_loss_threshold(r.trace, sweep_threshold);
      iters.rows.push_back({static_cast<double>(l), static_cast<double>(k)});
      if (k > 0) pts.emplace_back(l, k);
    } catch (const DivergenceError& e) {
      std::cerr << "fig1 sweep ell=" << l << " diverged at epoch " << e.trace.epochs_run << "\n";
      iters.rows.push_back({static_cast<double>(l), -1.0});
    }
  }
  save_table_csv(iters, ctx.path("iterations.csv"));
  if (pts.size() >= 3) {
    const SlopeFit fit = fit_iteration_scaling(pts);
    cfg.note_resolved("scaling_slope", format_full(fit.slope));
    SvgPlot plot("iterations to loss < threshold", "ell", "iterations");
    plot.set_log_x(true);
    plot.set_log_y(true);
    Vector lx(pts.size()), ly(pts.size()), ref(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      lx(static_cast<Eigen::Index>(i)) = pts[i].first;
      ly(static_cast<Eigen::Index>(i)) = pts[i].second;
      ref(static_cast<Eigen::Index>(i)) =
          pts[0].second * std::pow(pts[i].first / pts[0].first, 2.0);
    }
    plot.add_scatter(lx, ly, "measured", "rgb(30,60,245)", 3.0);
    plot.add_line(lx, ref, "ell^2 reference", "black", 1.0, true);
    plot.write(ctx.path("scaling.svg"));
  }
  ctx.finish(cfg);
  return 0;
}

int cmd_fig2(ExperimentConfig& cfg, const std::string& out_dir) {
  RunContext ctx(out_dir);
  // Desk-scale default: the equispaced 61-node grid designed at degree 30.
  // A certified-SPD P_s at ell_max = 30 needs n <= 61, and the omega weights
  // amplify the top-degree factors, which sit at the node set's aliasing
  // edge: any nonuniformity there leaks into the amplified modes and buries
  // the clean rates. jittered/three_arc layouts stay available for studying
  // exactly that effect.
  const int ell_max = cfg.get_int("ell_max", 30);
  const QuadratureRule rule = [&]() {
    const std::string kind = cfg.get_string("nodes", "uniform");
    if (kind == "uniform" || kind == "jittered") {
      const int n = cfg.get_int("n", 2 * ell_max + 1);
      const double jitter = kind == "uniform" ? 0.0 : cfg.get_double("jitter", 0.1);
      const int degree = cfg.get_int("degree", ell_max);
      return design_weights(jittered_circle_nodes(n, jitter, cfg.get_u64("node_seed", 17)),
                            degree);
    }
    if (kind == "three_arc") return rule_from_config(cfg, ctx, 27, 6, 8, 18);
    throw ConfigError("fig2: nodes must be uniform|jittered|three_arc, got " + kind);
  }();
  const int m = cfg.get_int("m", 1 << 13);
  const int epochs = cfg.get_int("epochs", 3000);
  const double kappa = cfg.get_double("kappa", 1.0);
  const std::uint64_t seed = cfg.get_u64("seed", 1);
  std::vector<double> s_grid = cfg.get_list("s_grid", {-1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0, 2.5,
                                                       3.0, 3.5, 4.0});

  const HarmonicExpansion target = sine_band_target(9);
  const double eta = eta_from_config(cfg);
  save_rule_csv(rule, ctx.path("rule.csv"));

  CsvTable rainbow;
  rainbow.columns = {"s", "ell", "final_freq_loss", "eta"};
  for (double s : s_grid) {
    try {
      const LossOperator ps = build_p_sobolev(rule, s, ell_max);
      const FrequencyRun run = train_s1_frequencies(rule, target, ps, m, epochs, eta, seed, 30,
                                                    std::max(1, epochs / 50), kappa);
      for (int l = 1; l <= 9; ++l)
        rainbow.rows.push_back({s, static_cast<double>(l),
                                run.freq(run.freq.rows() - 1, l), run.eta});
    } catch (const std::exception& e) {
      std::cerr << "fig2 s=" << s << " failed: " << e.what() << "\n";
    }
  }
  save_table_csv(rainbow, ctx.path("rainbow.csv"));

  SvgPlot plot("final frequency loss after " + std::to_string(epochs) + " epochs", "s",
               "frequency loss");
  plot.set_log_y(true);
  for (int l = 1; l <= 9; ++l) {
    std::vector<double> xs, ys;
    for (const auto& row : rainbow.rows)
      if (static_cast<int>(row[1]) == l) {
        xs.push_back(row[0]);
        ys.push_back(row[2]);
      }
    Vector x(static_cast<Eigen::Index>(xs.size())), y(static_cast<Eigen::Index>(ys.size()));
    for (std::size_t i = 0; i < xs.size(); ++i) {
      x(static_cast<Eigen::Index>(i)) = xs[i];
      y(static_cast<Eigen::Index>(i)) = ys[i];
    }
    plot.add_line(x, y, "ell=" + std::to_string(l), SvgPlot::rainbow_color(l - 1, 9), 2.0);
  }
  plot.write(ctx.path("rainbow.svg"));
  ctx.finish(cfg);
  return 0;
}

int cmd_fig3(ExperimentConfig& cfg, const std::string& out_dir) {
  RunContext ctx(out_dir);
  // The desk default is the shipped 861-node Gauss product rule (exact on
  // Pi^3_40): the only <= 900-node family whose products cover the tracked
  // band exactly. A nodes_file can be given instead; its weights are then
  // designed at `degree` and the run inherits that rule's error budget.
  const std::string rule_file = cfg.get_string("rule_file", "assets/s2_gauss_product_861_rule.csv");
  const std::string nodes_file = cfg.get_string("nodes_file", "");
  const int max_nodes = cfg.get_int("max_nodes", 900);
  const int band = cfg.get_int("band", 20);
  const int ell_max = cfg.get_int("ell_max", band);
  const int m = cfg.get_int("m", 1 << 13);
  const double kappa = cfg.get_double("kappa", 1.0);
  const double eta_cfg = eta_from_config(cfg);
  const std::uint64_t seed = cfg.get_u64("seed", 1);
  const std::vector<double> s_grid = cfg.get_list("s_grid", {-1.0, 0.0, 2.5});
  const std::vector<double> epoch_grid = cfg.get_list("epochs_grid", {3500.0, 1200.0, 200.0});

  const QuadratureRule rule = [&]() {
    if (!nodes_file.empty()) {
      ctx.add_input(nodes_file);
      const int degree = cfg.get_int("degree", 20);
      return design_weights(subsample_stride(load_nodes_csv(nodes_file), max_nodes), degree);
    }
    ctx.add_input(rule_file);
    QuadratureRule r = load_rule_csv(rule_file);
    if (r.size() > max_nodes)
      throw ConfigError("fig3: rule has " + std::to_string(r.size()) +
                        " nodes, above max_nodes = " + std::to_string(max_nodes));
    return r;
  }();
  save_rule_csv(rule, ctx.path("rule.csv"));
  HarmonicExpansion target(3, band);
  for (int l = 2; l <= band; l += 2) target.coef(l, 1) = 1.0;
  const std::vector<HarmonicIndex> track = {{4, 1}, {10, 1}, {20, 1}};

  for (std::size_t si = 0; si < s_grid.size(); ++si) {
    const double s = s_grid[si];
    const int epochs =
        static_cast<int>(si < epoch_grid.size() ? epoch_grid[si] : epoch_grid.back());
    try {
      // The S^2 operator is the positive-semidefinite form the
      // discretization produces whenever dim Pi^3_{ell_max} < n.
      const bool spd_possible = harmonic_space_dim(3, ell_max) >= rule.size();
      const LossOperator ps = build_p_sobolev(rule, s, ell_max, spd_possible);
      const FrequencyRun run = train_s2_frequencies(rule, target, ps, m, epochs, eta_cfg, seed,
                                                    track, std::max(1, epochs / 400), kappa);
      {
        std::ostringstream key;
        key << "eta_used_s" << s;
        cfg.note_resolved(key.str(), format_full(run.eta));
      }
      CsvTable t;
      t.columns = {"epoch", "ell", "value"};
      for (std::size_t r = 0; r < run.epochs.size(); ++r)
        for (std::size_t k = 0; k < track.size(); ++k)
          t.rows.push_back({static_cast<double>(run.epochs[r]),
                            static_cast<double>(track[k].degree),
                            run.freq(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k))});
      std::ostringstream name;
      name << "freq_loss_s" << s << ".csv";
      save_table_csv(t, ctx.path(name.str()));

      std::ostringstream title;
      title << "S^2 frequency losses, s = " << s;
      SvgPlot plot(title.str(), "epoch", "loss");
      plot.set_log_y(true);
      Vector ep(static_cast<Eigen::Index>(run.epochs.size()));
      for (std::size_t i = 0; i < run.epochs.size(); ++i)
        ep(static_cast<Eigen::Index>(i)) = run.epochs[i];
      for (std::size_t k = 0; k < track.size(); ++k)
        plot.add_line(ep, run.freq.col(static_cast<Eigen::Index>(k)),
                      "ell=" + std::to_string(track[k].degree),
                      SvgPlot::rainbow_color(static_cast<int>(k), 3), 2.0);
      std::ostringstream sname;
      sname << "freq_loss_s" << s << ".svg";
      plot.write(ctx.path(sname.str()));
    } catch (const std::exception& e) {
      std::cerr << "fig3 s=" << s << " failed: " << e.what() << "\n";
    }
  }
  ctx.finish(cfg);
  return 0;
}

int cmd_image_demo(ExperimentConfig& cfg, const std::string& out_dir) {
  RunContext ctx(out_dir);
  const int epochs = cfg.get_int("epochs", 800);
  const int n_images = cfg.get_int("n_images", 32);
  const int size = cfg.get_int("image_size", 16);
  const double step = cfg.get_double("step", 0.1);
  const int seeds = cfg.get_int("seeds", 5);
  const std::uint64_t seed0 = cfg.get_u64("seed", 1);
  const std::vector<double> s_grid = cfg.get_list("s_grid", {-1.0, 0.0, 1.0});

  CsvTable t;
  t.columns = {"noise", "s", "seed", "clean_error"};
  for (int noise = 0; noise < 2; ++noise) {
    for (double s : s_grid) {
      for (int k = 0; k < seeds; ++k) {
        try {
          const double err =
              image_demo_clean_error(s, noise == 1, seed0 + k, epochs, n_images, size, step);
          t.rows.push_back({static_cast<double>(noise), s, static_cast<double>(k), err});
        } catch (const std::exception& e) {
          std::cerr << "image-demo noise=" << noise << " s=" << s << " failed: " << e.what()
                    << "\n";
        }
      }
    }
  }
  save_table_csv(t, ctx.path("denoise.csv"));

  // Dump one example image triple per noise kind for inspection.
  for (int noise = 0; noise < 2; ++noise) {
    Rng rng(seed0);
    const Matrix clean = blob_image(size, rng);
    const Matrix noisy = clean + band_noise(size, noise == 1, 0.25, rng);
    CsvTable ic, in;
    ic.columns.resize(static_cast<std::size_t>(size), "c");
    in.columns.resize(static_cast<std::size_t>(size), "c");
    for (int i = 0; i < size; ++i) {
      std::vector<double> rc(static_cast<std::size_t>(size)), rn(static_cast<std::size_t>(size));
      for (int j = 0; j < size; ++j) {
        rc[static_cast<std::size_t>(j)] = clean(i, j);
        rn[static_cast<std::size_t>(j)] = noisy(i, j);
      }
      ic.rows.push_back(rc);
      in.rows.push_back(rn);
    }
    const std::string tag = noise ? "high" : "low";
    save_table_csv(ic, ctx.path("sample_clean_" + tag + ".csv"));
    save_table_csv(in, ctx.path("sample_noisy_" + tag + ".csv"));
  }
  ctx.finish(cfg);
  return 0;
}

}  // namespace sbl
