// Command-line surface for the coded-two-bucket toolkit. Subcommands cover
// the full pipeline: synthetic data generation, acquisition simulation,
// low-resolution inversion, training, reconstruction, evaluation, attention
// export, and the gradient-check suite.
//
// Exit codes: 0 success, 1 usage/config error, 2 data error (I/O, dims,
// values, degenerate codes), 3 numerical failure (singular system,
// non-finite loss, failed gradient check).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "c2b/checkpoint.hpp"
#include "c2b/code.hpp"
#include "c2b/config.hpp"
#include "c2b/dataset.hpp"
#include "c2b/gradcheck.hpp"
#include "c2b/image_io.hpp"
#include "c2b/imaging.hpp"
#include "c2b/lowres.hpp"
#include "c2b/metrics.hpp"
#include "c2b/synth.hpp"
#include "c2b/train.hpp"

namespace {

using namespace c2b;
using nlohmann::json;

namespace fs = std::filesystem;

void ensure_dir(const std::string& path) {
  std::error_code ec;
  fs::create_directories(path, ec);
  if (ec) throw IoError("cannot create directory: " + path);
}

ExposureCode load_code_or_default(const std::string& path, int n, int t) {
  if (path.empty()) return make_impulse_code(n, t);
  return read_code_file(path);
}

// A coded observation file carries only the values; the per-pixel activation
// counts are implied by the code.
CodedImage coded_from_file(const std::string& path, const TiledCode& code) {
  CodedImage out;
  out.values = read_image(path);
  if (out.values.height != code.height() || out.values.width != code.width()) {
    throw DimensionError("coded image is " + std::to_string(out.values.height) + "x" +
                         std::to_string(out.values.width) + " but the code covers " +
                         std::to_string(code.height()) + "x" + std::to_string(code.width()));
  }
  out.activation.resize(out.values.size());
  for (int y = 0; y < out.values.height; ++y) {
    for (int x = 0; x < out.values.width; ++x) {
      out.activation[static_cast<size_t>(y) * out.values.width + x] = code.activation(y, x);
    }
  }
  return out;
}

ExposureCode checkpoint_code(const TrainedState& state) {
  if (state.code_text.empty()) {
    return make_impulse_code(state.model.tile, state.model.frames);
  }
  std::istringstream in(state.code_text);
  return read_code_text(in);
}

void write_json(const json& doc, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << doc.dump(2) << "\n";
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// gen-data

struct GenDataArgs {
  std::string out;
  uint64_t seed = 1;
  SynthSpec spec;
  bool masks = false;
};

int run_gen_data(const GenDataArgs& a) {
  a.spec.validate();
  ensure_dir(a.out);
  const std::vector<VideoCube> clips = synth_dataset(a.spec, a.seed);
  for (size_t i = 0; i < clips.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "clip_%03zu", i);
    const std::string dir = a.out + "/" + name;
    ensure_dir(dir);
    write_frames(clips[i], dir);
  }
  if (a.masks) {
    const Image dynamic = dynamic_mask(a.spec);
    Image still(dynamic.height, dynamic.width);
    for (size_t i = 0; i < still.values.size(); ++i) {
      still.values[i] = 1.0 - dynamic.values[i];
    }
    write_pgm(dynamic, a.out + "/mask_dynamic.pgm");
    write_pgm(still, a.out + "/mask_static.pgm");
  }
  json manifest;
  manifest["tool"] = "gen-data";
  manifest["seed"] = a.seed;
  manifest["count"] = a.spec.count;
  manifest["height"] = a.spec.height;
  manifest["width"] = a.spec.width;
  manifest["frames"] = a.spec.frames;
  manifest["rect_h"] = a.spec.rect_h;
  manifest["rect_w"] = a.spec.rect_w;
  manifest["vx"] = a.spec.vx;
  manifest["vy"] = a.spec.vy;
  manifest["masks"] = a.masks;
  write_json(manifest, a.out + "/manifest.json");
  std::cout << "wrote " << clips.size() << " clips to " << a.out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  std::string frames;
  std::string code;
  std::string out;
  bool buckets = false;
};

int run_simulate(const SimulateArgs& a) {
  const ExposureCode code = load_code_or_default(a.code, 3, 9);
  const std::vector<Image> frames = load_frame_directory(a.frames);
  const std::vector<VideoCube> clips = window_clips(frames, code.length());
  const VideoCube& clip = clips.front();  // first window of the sequence
  const TiledCode tiled = tile_code(code, clip.height(), clip.width());

  ensure_dir(a.out);
  const CodedImage coded = encode_coded(clip, tiled);
  const FullyExposedImage blurred = encode_blurred(clip);
  write_pgm(coded.values, a.out + "/coded.pgm");
  write_pgm(blurred.values, a.out + "/blurred.pgm");

  json manifest;
  manifest["tool"] = "simulate";
  manifest["code"]["n"] = code.tile_size();
  manifest["code"]["t"] = code.length();
  manifest["code"]["source"] = a.code.empty() ? std::string("builtin-impulse") : a.code;
  manifest["input"]["frames"] = a.frames;
  manifest["input"]["frames_available"] = frames.size();
  manifest["input"]["frames_used"] = clip.length();
  manifest["outputs"] = json::array({"coded.pgm", "blurred.pgm"});
  if (a.buckets) {
    const BucketPair pair = encode_two_bucket(clip, tiled);
    write_pgm(pair.bucket1.values, a.out + "/bucket1.pgm");
    write_pgm(pair.bucket0.values, a.out + "/bucket0.pgm");
    manifest["outputs"].push_back("bucket1.pgm");
    manifest["outputs"].push_back("bucket0.pgm");
  }
  write_json(manifest, a.out + "/manifest.json");
  std::cout << "simulated " << clip.length() << "-frame clip from " << a.frames << " into "
            << a.out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// invert

struct InvertArgs {
  std::string coded;
  std::string code;
  std::string out;
};

int run_invert(const InvertArgs& a) {
  const ExposureCode code = load_code_or_default(a.code, 3, 9);
  const Image observed = read_image(a.coded);
  const TiledCode tiled = tile_code(code, observed.height, observed.width);
  const CodedImage coded = coded_from_file(a.coded, tiled);
  const LowResVideo video = recover_lowres_coded(coded, tiled);
  ensure_dir(a.out);
  write_frames(video, a.out);
  std::cout << "recovered " << video.length() << " low-res frames ("
            << video.height() << "x" << video.width() << ") into " << a.out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// train

struct TrainArgs {
  std::string config;
  std::string code;
  std::string out = ".";
  ConfigMap overrides;
};

int run_train(const TrainArgs& a) {
  ConfigMap values = a.config.empty() ? ConfigMap{} : read_config_file(a.config);
  apply_overrides(values, a.overrides);
  if (values.find("data.frames") == values.end()) {
    require_key(values, "data.frames");  // throws, naming the key
  }
  const TrainConfig cfg = make_train_config(values);
  const ExposureCode code = load_code_or_default(a.code, cfg.code_n, cfg.code_t);

  const std::vector<VideoCube> clips = load_clip_directory(cfg.frames_dir, cfg.code_t);
  const TrainResult result = train_model(cfg, code, clips);

  ensure_dir(a.out);
  const std::string ckpt_path = a.out + "/checkpoint.c2bv";
  save_checkpoint(ckpt_path, result.state);

  const std::string loss_path = a.out + "/loss.csv";
  std::ofstream loss(loss_path, std::ios::binary | std::ios::trunc);
  if (!loss) throw IoError("cannot open for writing: " + loss_path);
  loss << "step,total,data,smooth\n";
  for (const StepLoss& h : result.history) {
    loss << h.step << "," << format_double(h.total) << "," << format_double(h.data_term) << ","
         << format_double(h.smooth_term) << "\n";
  }
  std::cout << "trained " << result.history.size() << " steps on " << clips.size()
            << " clips; wrote " << ckpt_path << " and " << loss_path << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// reconstruct

struct ReconstructArgs {
  std::string checkpoint;
  std::string coded;
  std::string blurred;
  std::string out;
};

int run_reconstruct(const ReconstructArgs& a) {
  const TrainedState state = load_checkpoint(a.checkpoint);
  const bool needs_coded = state.model.variant != ModelVariant::kBlurred;
  const bool needs_blurred = state.model.variant != ModelVariant::kCoded;
  const std::string name = variant_name(state.model.variant);
  if (needs_coded && a.coded.empty()) {
    throw UsageError(name + " checkpoint needs --coded");
  }
  if (needs_blurred && a.blurred.empty()) {
    throw UsageError(name + " checkpoint needs --blurred");
  }
  if (!needs_coded && !a.coded.empty()) {
    throw UsageError(name + " checkpoint does not take --coded");
  }
  if (!needs_blurred && !a.blurred.empty()) {
    throw UsageError(name + " checkpoint does not take --blurred");
  }

  const FusionModel model = state.make_model();
  const ExposureCode code = checkpoint_code(state);

  LowResVideo xc;
  LowResVideo xf;
  if (needs_coded) {
    const Image observed = read_image(a.coded);
    const TiledCode tiled = tile_code(code, observed.height, observed.width);
    xc = recover_lowres_coded(coded_from_file(a.coded, tiled), tiled);
  }
  if (needs_blurred) {
    FullyExposedImage blurred;
    blurred.values = read_image(a.blurred);
    xf = pixel_shuffle_image(blurred, code.tile_size());
  }

  VideoCube prediction = state.model.variant == ModelVariant::kPair ? model.predict_pair(xc, xf)
                         : state.model.variant == ModelVariant::kCoded
                             ? model.predict_single(xc)
                             : model.predict_single(xf);
  ensure_dir(a.out);
  write_frames(prediction, a.out);
  std::cout << "reconstructed " << prediction.length() << " frames ("
            << prediction.height() << "x" << prediction.width() << ") into " << a.out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// eval

struct EvalArgs {
  std::string pred;
  std::string truth;
  std::string out;
};

int run_eval(const EvalArgs& a) {
  const VideoCube pred(load_frame_directory(a.pred));
  const VideoCube truth(load_frame_directory(a.truth));
  const MetricReport report = video_report(pred, truth);
  const double direction = direction_score(pred, truth);
  const std::string id = fs::path(a.pred).filename().string();

  std::ostringstream csv;
  csv << "sequence,frame,psnr,ssim\n";
  for (size_t i = 0; i < report.psnr_per_frame.size(); ++i) {
    csv << id << "," << (i + 1) << "," << format_double(report.psnr_per_frame[i]) << ","
        << format_double(report.ssim_per_frame[i]) << "\n";
  }
  csv << id << ",mean," << format_double(report.psnr_mean) << ","
      << format_double(report.ssim_mean) << "\n";
  csv << id << ",direction," << format_double(direction) << ",\n";

  std::cout << csv.str();
  if (!a.out.empty()) {
    std::ofstream out(a.out, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + a.out);
    out << csv.str();
  }
  return 0;
}

// ---------------------------------------------------------------------------
// attention

struct AttentionArgs {
  std::string checkpoint;
  std::string coded;
  std::string blurred;
  std::string out;
};

int run_attention(const AttentionArgs& a) {
  const TrainedState state = load_checkpoint(a.checkpoint);
  const FusionModel model = state.make_model();  // attention_image rejects non-pair variants
  const ExposureCode code = checkpoint_code(state);

  const Image observed = read_image(a.coded);
  const TiledCode tiled = tile_code(code, observed.height, observed.width);
  const LowResVideo xc = recover_lowres_coded(coded_from_file(a.coded, tiled), tiled);
  FullyExposedImage blurred;
  blurred.values = read_image(a.blurred);
  const LowResVideo xf = pixel_shuffle_image(blurred, code.tile_size());

  const Image attention = model.attention_image(xc, xf);
  write_pgm(attention, a.out);
  std::cout << "wrote " << attention.height << "x" << attention.width << " attention map to "
            << a.out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// gradcheck

int run_gradcheck(uint64_t seed) {
  const std::vector<GradCheckResult> results = run_gradient_checks(seed, true);
  std::cout << format_gradcheck_report(results);
  return all_behaved(results) ? 0 : 3;
}

// ---------------------------------------------------------------------------

int dispatch(int argc, char** argv) {
  CLI::App app{"Coded-two-bucket camera simulation and video reconstruction"};
  app.require_subcommand(1);

  GenDataArgs gen;
  CLI::App* gen_cmd = app.add_subcommand("gen-data", "Write synthetic moving-rectangle clips");
  gen_cmd->add_option("--out", gen.out, "Output directory")->required();
  gen_cmd->add_option("--seed", gen.seed, "Synthesis seed");
  gen_cmd->add_option("--count", gen.spec.count, "Number of clips");
  gen_cmd->add_option("--height", gen.spec.height, "Frame height");
  gen_cmd->add_option("--width", gen.spec.width, "Frame width");
  gen_cmd->add_option("--length", gen.spec.frames, "Frames per clip");
  gen_cmd->add_option("--rect-h", gen.spec.rect_h, "Rectangle height");
  gen_cmd->add_option("--rect-w", gen.spec.rect_w, "Rectangle width");
  gen_cmd->add_option("--vx", gen.spec.vx, "Horizontal velocity, pixels per frame");
  gen_cmd->add_option("--vy", gen.spec.vy, "Vertical velocity, pixels per frame");
  gen_cmd->add_flag("--masks", gen.masks, "Also write dynamic/static region masks");

  SimulateArgs sim;
  CLI::App* sim_cmd = app.add_subcommand("simulate", "Encode a clip into coded/blurred images");
  sim_cmd->add_option("--frames", sim.frames, "Directory of clip frames")->required();
  sim_cmd->add_option("--code", sim.code, "Exposure code file (default: impulse 3x3x9)");
  sim_cmd->add_option("--out", sim.out, "Output directory")->required();
  sim_cmd->add_flag("--buckets", sim.buckets, "Also write the two-bucket pair");

  InvertArgs inv;
  CLI::App* inv_cmd = app.add_subcommand("invert", "Recover the low-res video from a coded image");
  inv_cmd->add_option("--coded", inv.coded, "Coded observation image")->required();
  inv_cmd->add_option("--code", inv.code, "Exposure code file (default: impulse 3x3x9)");
  inv_cmd->add_option("--out", inv.out, "Output directory")->required();

  TrainArgs trn;
  std::string trn_seed, trn_variant, trn_frames, trn_lr, trn_lambda, trn_epochs, trn_batch,
      trn_patch, trn_max_steps, trn_widths, trn_bottleneck, trn_code_n, trn_code_t;
  CLI::App* trn_cmd = app.add_subcommand("train", "Train a reconstruction model");
  trn_cmd->add_option("--config", trn.config, "INI-style config file");
  trn_cmd->add_option("--code", trn.code, "Exposure code file (default: impulse from code.n/t)");
  trn_cmd->add_option("--out", trn.out, "Output directory (checkpoint.c2bv, loss.csv)");
  CLI::Option* o_seed = trn_cmd->add_option("--seed", trn_seed, "Overrides seed");
  CLI::Option* o_variant =
      trn_cmd->add_option("--variant", trn_variant, "Overrides model.variant");
  CLI::Option* o_frames = trn_cmd->add_option("--frames", trn_frames, "Overrides data.frames");
  CLI::Option* o_lr = trn_cmd->add_option("--lr", trn_lr, "Overrides train.lr");
  CLI::Option* o_lambda = trn_cmd->add_option("--lambda", trn_lambda, "Overrides train.lambda");
  CLI::Option* o_epochs = trn_cmd->add_option("--epochs", trn_epochs, "Overrides train.epochs");
  CLI::Option* o_batch = trn_cmd->add_option("--batch", trn_batch, "Overrides train.batch");
  CLI::Option* o_patch = trn_cmd->add_option("--patch", trn_patch, "Overrides data.patch");
  CLI::Option* o_max_steps =
      trn_cmd->add_option("--max-steps", trn_max_steps, "Overrides train.max_steps");
  CLI::Option* o_widths = trn_cmd->add_option("--widths", trn_widths, "Overrides model.widths");
  CLI::Option* o_bottleneck =
      trn_cmd->add_option("--bottleneck", trn_bottleneck, "Overrides model.bottleneck");
  CLI::Option* o_code_n = trn_cmd->add_option("--code-n", trn_code_n, "Overrides code.n");
  CLI::Option* o_code_t = trn_cmd->add_option("--code-t", trn_code_t, "Overrides code.t");

  ReconstructArgs rec;
  CLI::App* rec_cmd = app.add_subcommand("reconstruct", "Run a checkpoint on observations");
  rec_cmd->add_option("--checkpoint", rec.checkpoint, "Trained checkpoint")->required();
  rec_cmd->add_option("--coded", rec.coded, "Coded observation image");
  rec_cmd->add_option("--blurred", rec.blurred, "Fully exposed observation image");
  rec_cmd->add_option("--out", rec.out, "Output directory for frames")->required();

  EvalArgs evl;
  CLI::App* evl_cmd = app.add_subcommand("eval", "Compare predicted frames against ground truth");
  evl_cmd->add_option("--pred", evl.pred, "Directory of predicted frames")->required();
  evl_cmd->add_option("--truth", evl.truth, "Directory of ground-truth frames")->required();
  evl_cmd->add_option("--out", evl.out, "Also write the CSV table to this file");

  AttentionArgs att;
  CLI::App* att_cmd = app.add_subcommand("attention", "Export the fusion attention map");
  att_cmd->add_option("--checkpoint", att.checkpoint, "Pair-variant checkpoint")->required();
  att_cmd->add_option("--coded", att.coded, "Coded observation image")->required();
  att_cmd->add_option("--blurred", att.blurred, "Fully exposed observation image")->required();
  att_cmd->add_option("--out", att.out, "Output PGM path")->required();

  uint64_t gc_seed = 1;
  CLI::App* gc_cmd = app.add_subcommand("gradcheck", "Run the finite-difference check suite");
  gc_cmd->add_option("--seed", gc_seed, "Sampling seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (gen_cmd->parsed()) return run_gen_data(gen);
  if (sim_cmd->parsed()) return run_simulate(sim);
  if (inv_cmd->parsed()) return run_invert(inv);
  if (trn_cmd->parsed()) {
    if (o_seed->count()) trn.overrides["seed"] = trn_seed;
    if (o_variant->count()) trn.overrides["model.variant"] = trn_variant;
    if (o_frames->count()) trn.overrides["data.frames"] = trn_frames;
    if (o_lr->count()) trn.overrides["train.lr"] = trn_lr;
    if (o_lambda->count()) trn.overrides["train.lambda"] = trn_lambda;
    if (o_epochs->count()) trn.overrides["train.epochs"] = trn_epochs;
    if (o_batch->count()) trn.overrides["train.batch"] = trn_batch;
    if (o_patch->count()) trn.overrides["data.patch"] = trn_patch;
    if (o_max_steps->count()) trn.overrides["train.max_steps"] = trn_max_steps;
    if (o_widths->count()) trn.overrides["model.widths"] = trn_widths;
    if (o_bottleneck->count()) trn.overrides["model.bottleneck"] = trn_bottleneck;
    if (o_code_n->count()) trn.overrides["code.n"] = trn_code_n;
    if (o_code_t->count()) trn.overrides["code.t"] = trn_code_t;
    return run_train(trn);
  }
  if (rec_cmd->parsed()) return run_reconstruct(rec);
  if (evl_cmd->parsed()) return run_eval(evl);
  if (att_cmd->parsed()) return run_attention(att);
  if (gc_cmd->parsed()) return run_gradcheck(gc_seed);
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const SingularSystemError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
