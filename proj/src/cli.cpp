// Copyright 2026 The ddgan Authors
// SPDX-License-Identifier: Apache-2.0

#include "ddgan/cli.hpp"

#include "ddgan/attention.hpp"
#include "ddgan/errors.hpp"
#include "ddgan/trainer.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;

namespace ddgan {

// ---------------------------------------------------------------------------
// Configuration

FieldTable RunConfig::fields()
{
  FieldTable t = model_fields(model);
  t.add("transition.rho", &rho);
  t.add("mel.frame_ms", &mel.frame_ms);
  t.add("mel.hop_ms", &mel.hop_ms);
  t.add("mel.mel_bands", &mel.mel_bands);
  t.add("mel.coefficients", &mel.coefficients);
  t.add("mel.log_floor", &mel.log_floor);
  t.add("data.manifest", &manifest);
  t.add("data.model_rate", &model_rate);
  t.add("data.eeg_channels", &eeg_channels);
  t.add("data.bandpass", &bandpass);
  t.add("data.passband_lo", &passband_lo);
  t.add("data.passband_hi", &passband_hi);
  t.add("data.synth_pairs", &synth_pairs);
  t.add("data.synth_seed", &synth_seed);
  t.add("data.synth_samples", &synth_samples);
  t.add("train.steps", &steps);
  t.add("train.seed", &seed);
  t.add("train.checkpoint_every", &checkpoint_every);
  t.add("train.precision", &precision);
  t.add("sweep.proportions", &sweep_proportions);
  t.add("sweep.steps", &sweep_steps);
  t.add("attention.threshold", &attention_threshold);
  t.add("attention.observation_sec", &observation_sec);
  t.add("attention.welch_sec", &welch_sec);
  t.add("output.dir", &output_dir);
  return t;
}

double RunConfig::eeg_fraction() const { return parse_proportion(rho); }

namespace {

std::vector<std::string> split_list(std::string const &text)
{
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto const b = item.find_first_not_of(" \t");
    auto const e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

} // namespace

std::vector<std::string> RunConfig::channel_list() const { return split_list(eeg_channels); }

std::vector<double> RunConfig::proportion_list() const
{
  std::vector<double> out;
  for (auto const &p : split_list(sweep_proportions)) out.push_back(parse_proportion(p));
  return out;
}

std::vector<std::string> RunConfig::problems() const
{
  auto p = model.problems();
  auto m = mel.problems();
  p.insert(p.end(), m.begin(), m.end());
  try {
    TransitionSpec{eeg_fraction(), 1024}.validate();
  } catch (std::exception const &e) {
    p.push_back(std::string("transition.rho: ") + e.what());
  }
  if (!(model_rate > 0)) p.push_back("data.model_rate must be positive");
  if (!(passband_lo >= 0 && passband_hi > passband_lo)) p.push_back("data.passband_lo/hi must satisfy 0 <= lo < hi");
  if (bandpass && !(model_rate > 2 * passband_hi)) p.push_back("data.passband_hi must be below Nyquist");
  if (synth_pairs < 1) p.push_back("data.synth_pairs must be >= 1");
  if (synth_samples < 2) p.push_back("data.synth_samples must be >= 2");
  if (steps < 0) p.push_back("train.steps must be >= 0");
  if (checkpoint_every < 0) p.push_back("train.checkpoint_every must be >= 0");
  if (precision != "f64" && precision != "f32") p.push_back("train.precision must be f64 or f32");
  try {
    if (proportion_list().empty()) p.push_back("sweep.proportions is empty");
  } catch (std::exception const &e) {
    p.push_back(std::string("sweep.proportions: ") + e.what());
  }
  if (sweep_steps < 0) p.push_back("sweep.steps must be >= 0");
  if (!(observation_sec > 0) || !(welch_sec > 0) || welch_sec > observation_sec) {
    p.push_back("attention.welch_sec must be positive and no longer than attention.observation_sec");
  }
  if (output_dir.empty()) p.push_back("output.dir must not be empty");
  return p;
}

std::string RunConfig::render() const
{
  RunConfig copy = *this;
  return render_key_values(copy.fields().values());
}

void apply_config_file(RunConfig &cfg, fs::path const &path, std::vector<std::string> &problems)
{
  std::string text;
  try {
    text = read_text_file(path);
  } catch (DataError const &) {
    problems.push_back("cannot read config file " + path.string());
    return;
  }
  auto fields = cfg.fields();
  std::vector<std::string> local;
  for (auto const &[k, v] : parse_key_values(text, local)) {
    if (auto err = fields.set(k, v); !err.empty()) local.push_back(err);
  }
  for (auto const &p : local) problems.push_back(path.string() + ": " + p);
}

// ---------------------------------------------------------------------------
// Data

namespace {

bool has_extension(fs::path const &p, char const *ext)
{
  auto e = p.extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return e == ext;
}

SignalRecord ingest_eeg(fs::path const &path, RunConfig const &cfg)
{
  SignalRecord u = has_extension(path, ".wav") ? load_wav(path) : load_eeg_csv(path, cfg.channel_list());
  u.domain = Domain::u;
  u.passband_lo = cfg.passband_lo;
  u.passband_hi = cfg.passband_hi;
  if (cfg.bandpass) {
    if (!(u.sample_rate > 2 * cfg.passband_hi)) throw DataError(path.string() + ": passband above Nyquist");
    u.samples = bandpass(u.samples, u.sample_rate, cfg.passband_lo, cfg.passband_hi);
    u.bandpass_applied = true;
  }
  return u;
}

} // namespace

SignalRecord load_eeg_input(fs::path const &path, RunConfig const &cfg)
{
  return normalize(resample_to_rate(ingest_eeg(path, cfg), cfg.model_rate));
}

std::vector<PairedExample> load_pairs(fs::path const &manifest, RunConfig const &cfg)
{
  auto const entries = read_manifest(manifest);
  if (entries.empty()) throw DataError(manifest.string() + ": manifest lists no pairs");
  double const rho = cfg.eeg_fraction();
  std::vector<PairedExample> out;
  for (auto const &e : entries) {
    SignalRecord u = load_eeg_input(e.eeg_path, cfg);
    u.id = e.pair_id + "_u";
    SignalRecord v = load_wav(e.wav_path);
    v.domain = Domain::v;
    v.id = e.pair_id;
    v = normalize(resample_to_rate(std::move(v), cfg.model_rate));
    Index const len = std::max(u.size(), v.size());
    out.push_back(make_pair(pad_to_length(std::move(u), len), pad_to_length(std::move(v), len), rho, e.group_label));
  }
  return out;
}

std::vector<PairedExample> synthetic_pairs(RunConfig const &cfg)
{
  SynthConfig sc;
  sc.sample_rate = cfg.model_rate;
  sc.samples = cfg.synth_samples;
  sc.rho = cfg.eeg_fraction();
  return synthesize_dataset(static_cast<std::size_t>(cfg.synth_pairs), cfg.synth_seed, sc);
}

// ---------------------------------------------------------------------------
// Commands

namespace {

struct Context
{
  RunConfig cfg;
  std::vector<std::string> args;
  std::ostream &out;
  std::ostream &err;
};

std::string version_string() { return "ddgan 0.1.0"; }

std::string data_provenance(RunConfig const &cfg)
{
  if (!cfg.manifest.empty()) return hex64(hash_manifest(cfg.manifest));
  return "synthetic:pairs=" + std::to_string(cfg.synth_pairs) + ",seed=" + std::to_string(cfg.synth_seed) +
         ",samples=" + std::to_string(cfg.synth_samples);
}

void write_run_manifest(fs::path const &path, Context const &ctx, std::string const &command, KeyValues extra)
{
  std::string argv;
  for (auto const &a : ctx.args) argv += (argv.empty() ? "" : " ") + a;
  std::string const config_text = ctx.cfg.render();
  std::string text = "# ddgan run manifest\n";
  text += "command=" + command + "\n";
  text += "version=" + version_string() + "\n";
  text += "args=" + argv + "\n";
  text += "seed=" + std::to_string(ctx.cfg.seed) + "\n";
  text += "config_hash=" + hex64(fnv1a(config_text)) + "\n";
  for (auto const &[k, v] : extra) text += k + "=" + v + "\n";
  text += "\n# configuration\n" + config_text;
  write_file_atomic(path, text);
}

std::vector<PairedExample> dataset(RunConfig const &cfg)
{
  return cfg.manifest.empty() ? synthetic_pairs(cfg) : load_pairs(cfg.manifest, cfg);
}

KeyValues input_hashes(RunConfig const &cfg)
{
  KeyValues kv{{"data", data_provenance(cfg)}};
  if (!cfg.manifest.empty()) {
    kv.emplace_back("manifest", cfg.manifest);
    for (auto const &e : read_manifest(cfg.manifest)) {
      kv.emplace_back("input." + e.eeg_path.filename().string(), hex64(hash_file(e.eeg_path)));
      kv.emplace_back("input." + e.wav_path.filename().string(), hex64(hash_file(e.wav_path)));
    }
  }
  return kv;
}

int cmd_synth(Context &ctx)
{
  auto const &cfg = ctx.cfg;
  fs::path const dir = cfg.output_dir;
  fs::create_directories(dir);
  auto const pairs = synthetic_pairs(cfg);
  std::vector<ManifestEntry> entries;
  KeyValues hashes;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    auto const &p = pairs[i];
    char stem[32];
    std::snprintf(stem, sizeof stem, "pair_%03zu", i);
    fs::path const eeg = dir / (std::string(stem) + "_eeg.csv");
    fs::path const wav = dir / (std::string(stem) + "_speech.wav");
    Eigen::MatrixXd cols(p.u.size(), static_cast<Index>(p.u.channels.size()));
    for (Index c = 0; c < cols.cols(); ++c) cols.col(c) = p.u.samples;
    write_eeg_csv(eeg, p.u.channels, cols, p.u.sample_rate);
    // Readers normalize again, so a peak scale keeps pcm16 from clipping.
    double const peak = p.v.samples.cwiseAbs().maxCoeff();
    Eigen::VectorXd const speech = peak > 0.0 ? Eigen::VectorXd(p.v.samples * (0.99 / peak)) : p.v.samples;
    write_wav(wav, speech, p.v.sample_rate, WavEncoding::pcm16);
    entries.push_back({stem, eeg, wav, p.group_label});
    hashes.emplace_back("output." + eeg.filename().string(), hex64(hash_file(eeg)));
    hashes.emplace_back("output." + wav.filename().string(), hex64(hash_file(wav)));
  }
  write_manifest(dir / "manifest.tsv", entries);
  write_run_manifest(dir / "synth_manifest.txt", ctx, "synth", hashes);
  ctx.out << "wrote " << pairs.size() << " pairs to " << (dir / "manifest.tsv").string() << "\n";
  return exit_ok;
}

template <typename Scalar> int train_with(Context &ctx, std::string const &resume)
{
  auto &cfg = ctx.cfg;
  fs::path const dir = cfg.output_dir;
  fs::create_directories(dir);
  TrainState<Scalar> state =
      resume.empty() ? make_train_state<Scalar>(cfg.model, cfg.seed) : load_checkpoint<Scalar>(resume);
  if (!resume.empty()) cfg.model = state.model.config();
  for (auto const &w : state.model.config().warnings()) ctx.err << "warning: " << w << "\n";

  auto const pairs = dataset(cfg);
  auto const samples = prepare_samples<Scalar>(pairs, state.model.config().generator.depth);
  std::string const provenance = data_provenance(cfg);
  if (!resume.empty() && !state.manifest_hash.empty() && state.manifest_hash != provenance) {
    ctx.err << "warning: resuming on data that differs from the checkpoint's (" << state.manifest_hash << ")\n";
  }
  state.manifest_hash = provenance;
  state.info = {{"model_rate", format_double(cfg.model_rate)},
                {"rho", cfg.rho},
                {"eeg_channels", cfg.eeg_channels},
                {"bandpass", cfg.bandpass ? "true" : "false"},
                {"passband_lo", format_double(cfg.passband_lo)},
                {"passband_hi", format_double(cfg.passband_hi)}};

  Architecture const arch = state.model.architecture();
  fs::path const loss_path = dir / "loss.csv";
  write_file_atomic(loss_path, loss_csv(state.loss_history, arch));
  std::ofstream loss_log(loss_path, std::ios::app | std::ios::binary);

  auto observer = [&](TrainState<Scalar> const &s, StepLosses const &losses) {
    char buf[96];
    for (auto const &[name, value] : losses) {
      std::snprintf(buf, sizeof buf, "%lld,%s,%.17g\n", static_cast<long long>(s.step - 1), name.c_str(), value);
      loss_log << buf;
    }
    loss_log.flush();
    if (cfg.checkpoint_every > 0 && s.step % cfg.checkpoint_every == 0) {
      save_checkpoint(s, dir / ("checkpoint_" + std::to_string(s.step) + ".ddgn"));
    }
  };
  std::int64_t const start = state.step;
  train(state, samples, cfg.steps, observer);
  fs::path const final_ckpt = dir / "model.ddgn";
  save_checkpoint(state, final_ckpt);

  auto const recon = reconstruction_report(state.model, samples);
  KeyValues extra = input_hashes(cfg);
  extra.emplace_back("precision", cfg.precision);
  extra.emplace_back("resume", resume);
  extra.emplace_back("start_step", std::to_string(start));
  extra.emplace_back("end_step", std::to_string(state.step));
  extra.emplace_back("checkpoint", final_ckpt.string());
  extra.emplace_back("checkpoint_hash", hex64(hash_file(final_ckpt)));
  for (auto const &[k, v] : recon) extra.emplace_back("final." + k, format_double(v));
  write_run_manifest(dir / "train_manifest.txt", ctx, "train", extra);
  ctx.out << "trained steps " << start << ".." << state.step << "; checkpoint " << final_ckpt.string() << "\n";
  for (auto const &[k, v] : recon) ctx.out << "  " << k << " = " << v << "\n";
  return exit_ok;
}

/// Restores the data settings the checkpoint was trained with.
void adopt_checkpoint_info(RunConfig &cfg, KeyValues const &info)
{
  auto fields = cfg.fields();
  auto take = [&](char const *info_key, char const *cfg_key) {
    for (auto const &[k, v] : info)
      if (k == info_key) fields.set(cfg_key, v);
  };
  take("model_rate", "data.model_rate");
  take("rho", "transition.rho");
  take("eeg_channels", "data.eeg_channels");
  take("bandpass", "data.bandpass");
  take("passband_lo", "data.passband_lo");
  take("passband_hi", "data.passband_hi");
}

template <typename Scalar> int translate_with(Context &ctx, std::string const &ckpt, std::string const &eeg, std::string const &out_path)
{
  auto const state = load_checkpoint<Scalar>(ckpt);
  adopt_checkpoint_info(ctx.cfg, state.info);
  SignalRecord const u = load_eeg_input(eeg, ctx.cfg);
  int const depth = state.model.config().generator.depth;
  auto const view = reshape_to_matrix<Scalar>(u, depth);
  Sample<Scalar> sample;
  sample.u = view.matrix;
  sample.u_pad = view.pad_count;
  Eigen::VectorXd const v_hat = translate_signal(state.model, sample);
  write_wav(out_path, v_hat, ctx.cfg.model_rate, WavEncoding::float32);
  fs::path manifest = out_path;
  manifest += ".manifest.txt";
  write_run_manifest(manifest, ctx, "translate",
                     {{"checkpoint", ckpt},
                      {"checkpoint_hash", hex64(hash_file(ckpt))},
                      {"eeg", eeg},
                      {"eeg_hash", hex64(hash_file(eeg))},
                      {"output", out_path},
                      {"output_hash", hex64(hash_file(out_path))}});
  ctx.out << "wrote " << v_hat.size() << " samples at " << ctx.cfg.model_rate << " Hz to " << out_path << "\n";
  return exit_ok;
}

template <typename Scalar> int eval_with(Context &ctx, std::string const &ckpt)
{
  auto const state = load_checkpoint<Scalar>(ckpt);
  adopt_checkpoint_info(ctx.cfg, state.info);
  auto const &cfg = ctx.cfg;
  auto const pairs = dataset(cfg);
  auto const samples = prepare_samples<Scalar>(pairs, state.model.config().generator.depth);
  EvalReport report = translation_accuracy(state.model, samples, pairs, cfg.mel);
  report.seed = state.seed;
  report.config = "checkpoint=" + ckpt + "; data=" + data_provenance(cfg);
  fs::path const dir = cfg.output_dir;
  fs::create_directories(dir);
  write_file_atomic(dir / "report.csv", report.to_csv());
  write_file_atomic(dir / "summary.json", report.summary_json());
  KeyValues extra = input_hashes(cfg);
  extra.emplace_back("checkpoint", ckpt);
  extra.emplace_back("checkpoint_hash", hex64(hash_file(ckpt)));
  extra.emplace_back("accuracy", format_double(report.accuracy));
  write_run_manifest(dir / "eval_manifest.txt", ctx, "eval", extra);
  char line[160];
  std::snprintf(line, sizeof line, "accuracy %.4f (%lld/%zu)  mean PCC %.4f  mean MCD %.4f dB\n", report.accuracy,
                static_cast<long long>(report.hits), report.rows.size(), report.mean_pcc, report.mean_mcd);
  ctx.out << line;
  return exit_ok;
}

int cmd_sweep(Context &ctx)
{
  auto const &cfg = ctx.cfg;
  SweepOptions opts;
  opts.proportions = cfg.proportion_list();
  opts.steps = cfg.sweep_steps;
  opts.seed = cfg.seed;
  auto const rows = proportion_sweep(dataset(cfg), cfg.model, opts);
  std::string const csv = sweep_csv(rows);
  fs::path const dir = cfg.output_dir;
  fs::create_directories(dir);
  write_file_atomic(dir / "sweep.csv", csv);
  KeyValues extra = input_hashes(cfg);
  extra.emplace_back("sweep_hash", hex64(fnv1a(csv)));
  write_run_manifest(dir / "sweep_manifest.txt", ctx, "sweep", extra);
  ctx.out << csv;
  return exit_ok;
}

int cmd_attention(Context &ctx, std::string const &eeg, std::optional<double> rate)
{
  auto const &cfg = ctx.cfg;
  SignalRecord sig = has_extension(eeg, ".wav") ? load_wav(eeg) : load_eeg_csv(eeg, cfg.channel_list(), rate);
  auto const windows = scan_attention(sig, cfg.attention_threshold, cfg.observation_sec, cfg.welch_sec);
  Index admitted = 0;
  char line[128];
  for (auto const &w : windows) {
    bool const admit = w.decision == GateDecision::admit;
    admitted += admit;
    std::snprintf(line, sizeof line, "%.6g,%.9g,%s\n", w.t_start, w.report.attention, admit ? "admit" : "reject");
    ctx.out << line;
  }
  if (windows.empty()) ctx.err << "note: recording is shorter than one " << cfg.observation_sec << " s observation\n";
  fs::path const dir = cfg.output_dir;
  fs::create_directories(dir);
  write_run_manifest(dir / "attention_manifest.txt", ctx, "attention-check",
                     {{"eeg", eeg},
                      {"eeg_hash", hex64(hash_file(eeg))},
                      {"windows", std::to_string(windows.size())},
                      {"admitted", std::to_string(admitted)}});
  return exit_ok;
}

std::string checkpoint_precision(std::string const &ckpt)
{
  for (auto const &[k, v] : read_checkpoint_metadata(ckpt))
    if (k == "precision") return v;
  throw DataError(ckpt + ": checkpoint metadata lacks precision");
}

} // namespace

int run_cli(std::vector<std::string> const &args, std::ostream &out, std::ostream &err)
{
  CLI::App app{"Dual-loop adversarial EEG-to-speech translation toolkit", "ddgan"};
  app.require_subcommand(1);
  app.set_version_flag("--version", version_string());

  KeyValues overrides;
  std::string config_path;
  auto bind = [&](CLI::App *sub, std::string const &flag, std::string const &key, std::string const &help) {
    sub->add_option_function<std::string>(
        flag, [&overrides, key](std::string const &v) { overrides.emplace_back(key, v); }, help);
  };
  auto add_common = [&](CLI::App *sub) {
    sub->add_option("--config", config_path, "Configuration file (sectioned key = value)");
    sub->add_option_function<std::vector<std::string>>(
        "--set", [&overrides](std::vector<std::string> const &items) {
          for (auto const &kv : items) {
            auto const eq = kv.find('=');
            overrides.emplace_back(kv.substr(0, eq), eq == std::string::npos ? std::string() : kv.substr(eq + 1));
          }
        },
        "Override any configuration key, e.g. --set model.lambda_u=400");
  };

  auto *synth = app.add_subcommand("synth", "Write a synthetic paired corpus and its manifest");
  add_common(synth);
  bind(synth, "--pairs", "data.synth_pairs", "Number of pairs");
  bind(synth, "--seed", "data.synth_seed", "Corpus seed");
  bind(synth, "--samples", "data.synth_samples", "Samples per signal");
  bind(synth, "--out", "output.dir", "Output directory");

  std::string resume;
  auto *train_cmd = app.add_subcommand("train", "Train a model");
  add_common(train_cmd);
  bind(train_cmd, "--steps", "train.steps", "Outer training steps");
  bind(train_cmd, "--seed", "train.seed", "Training seed");
  bind(train_cmd, "--manifest", "data.manifest", "Dataset manifest (default: synthetic corpus)");
  bind(train_cmd, "--architecture", "model.architecture", "dual_dual or single");
  bind(train_cmd, "--precision", "train.precision", "f64 or f32");
  bind(train_cmd, "--out", "output.dir", "Output directory");
  train_cmd->add_option("--resume", resume, "Checkpoint to continue from");

  std::string ckpt, eeg, wav_out;
  auto *translate = app.add_subcommand("translate", "Translate one EEG recording to speech");
  add_common(translate);
  translate->add_option("--ckpt", ckpt, "Checkpoint")->required();
  translate->add_option("--eeg", eeg, "EEG CSV or WAV")->required();
  translate->add_option("--out", wav_out, "Output WAV")->required();
  bind(translate, "--channels", "data.eeg_channels", "EEG channels to average");

  auto *eval = app.add_subcommand("eval", "Score translations against a manifest");
  add_common(eval);
  eval->add_option("--ckpt", ckpt, "Checkpoint")->required();
  bind(eval, "--manifest", "data.manifest", "Test manifest (default: synthetic corpus)");
  bind(eval, "--report", "output.dir", "Report directory");

  auto *sweep = app.add_subcommand("sweep", "Train and score one model per cascade proportion");
  add_common(sweep);
  bind(sweep, "--manifest", "data.manifest", "Dataset manifest (default: synthetic corpus)");
  bind(sweep, "--proportions", "sweep.proportions", "Comma-separated list, e.g. 1:4,2:3,3:2,4:1");
  bind(sweep, "--steps", "sweep.steps", "Training steps per proportion");
  bind(sweep, "--seed", "train.seed", "Training seed");
  bind(sweep, "--out", "output.dir", "Output directory");

  std::optional<double> rate;
  auto *attention = app.add_subcommand("attention-check", "Gate an EEG recording window by window");
  add_common(attention);
  attention->add_option("--eeg", eeg, "EEG CSV or WAV")->required();
  attention->add_option("--rate", rate, "Sample rate when the CSV has no '# rate=' line");
  bind(attention, "--threshold", "attention.threshold", "Admit when the index exceeds this");
  bind(attention, "--channels", "data.eeg_channels", "EEG channels to average");
  bind(attention, "--out", "output.dir", "Directory for the run manifest");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (CLI::CallForHelp const &) {
    out << app.help();
    return exit_ok;
  } catch (CLI::CallForVersion const &) {
    out << version_string() << "\n";
    return exit_ok;
  } catch (CLI::ParseError const &e) {
    err << "error: " << e.what() << "\n";
    return exit_config;
  }

  Context ctx{RunConfig{}, args, out, err};
  try {
    std::vector<std::string> problems;
    if (!config_path.empty()) apply_config_file(ctx.cfg, config_path, problems);
    auto fields = ctx.cfg.fields();
    if (char const *env = std::getenv("DDGAN_OUTPUT_DIR"); env && *env) fields.set("output.dir", env);
    for (auto const &[k, v] : overrides) {
      if (auto e = fields.set(k, v); !e.empty()) problems.push_back("command line: " + e);
    }
    auto p = ctx.cfg.problems();
    problems.insert(problems.end(), p.begin(), p.end());
    if (!problems.empty()) throw ConfigError::from(problems);

    if (synth->parsed()) return cmd_synth(ctx);
    if (train_cmd->parsed()) {
      std::string precision = ctx.cfg.precision;
      if (!resume.empty()) precision = checkpoint_precision(resume);
      return precision == "f32" ? train_with<float>(ctx, resume) : train_with<double>(ctx, resume);
    }
    if (translate->parsed()) {
      return checkpoint_precision(ckpt) == "f32" ? translate_with<float>(ctx, ckpt, eeg, wav_out)
                                                 : translate_with<double>(ctx, ckpt, eeg, wav_out);
    }
    if (eval->parsed()) {
      return checkpoint_precision(ckpt) == "f32" ? eval_with<float>(ctx, ckpt) : eval_with<double>(ctx, ckpt);
    }
    if (sweep->parsed()) return cmd_sweep(ctx);
    if (attention->parsed()) return cmd_attention(ctx, eeg, rate);
  } catch (ConfigError const &e) {
    err << "configuration error: " << e.what() << "\n";
    return exit_config;
  } catch (NumericalError const &e) {
    err << "numerical failure: " << e.what() << "\n";
    return exit_numerical;
  } catch (DataError const &e) {
    err << "data error: " << e.what() << "\n";
    return exit_data;
  } catch (ShapeError const &e) {
    err << "data error: " << e.what() << "\n";
    return exit_data;
  } catch (std::filesystem::filesystem_error const &e) {
    err << "data error: " << e.what() << "\n";
    return exit_data;
  } catch (std::exception const &e) {
    err << "error: " << e.what() << "\n";
    return exit_data;
  }
  return exit_config;
}

} // namespace ddgan
