// Copyright 2026 The ropdl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ropdl_cli/cli.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ropdl/baselines.hpp"
#include "ropdl/error.hpp"
#include "ropdl/experiments.hpp"
#include "ropdl/image_io.hpp"
#include "ropdl/matcsv.hpp"
#include "ropdl/parallel.hpp"
#include "ropdl/rop_admm.hpp"
#include "ropdl/superres.hpp"

namespace ropdl::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

// ROPDL_ + flag name, upper-cased with '-' -> '_'.
std::string env_name(const std::string& flag) {
  std::string env = "ROPDL_";
  for (char c : flag) {
    env.push_back(c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  return env;
}

template <typename T>
CLI::Option* option(CLI::App* app, const std::string& flag, T& value,
                    const std::string& help) {
  return app->add_option("--" + flag, value, help)
      ->capture_default_str()
      ->envname(env_name(flag));
}

CLI::Option* toggle(CLI::App* app, const std::string& flag, bool& value,
                    const std::string& help) {
  return app->add_flag("--" + flag, value, help)->envname(env_name(flag));
}

PenaltyScaling parse_scaling(const std::string& s) {
  if (s == "relative") return PenaltyScaling::kRelative;
  if (s == "absolute") return PenaltyScaling::kAbsolute;
  throw InvalidArgument("unknown penalty scaling '" + s + "' (valid: relative, absolute)");
}

PUpdateMode parse_p_update(const std::string& s) {
  if (s == "closed_form") return PUpdateMode::kClosedForm;
  if (s == "cg") return PUpdateMode::kCg;
  throw InvalidArgument("unknown P-update mode '" + s + "' (valid: closed_form, cg)");
}

// Flags shared by every command that runs the ROP solver.
struct RopFlags {
  double rho = 1.0;
  int max_iter = 500;
  double tol = 1e-6;
  std::string penalty_scaling = "relative";
  std::string p_update = "closed_form";
  int warmup_iters = 100;
  double warmup_factor = 2.0;

  void add(CLI::App* app) {
    option(app, "rho", rho, "ADMM penalty (dimensionless under relative scaling)");
    option(app, "max-iter", max_iter, "iteration cap for ROP");
    option(app, "tol", tol, "relative primal residual tolerance for ROP");
    option(app, "penalty-scaling", penalty_scaling, "relative or absolute");
    option(app, "p-update", p_update, "closed_form or cg");
    option(app, "warmup-iters", warmup_iters, "iterations of penalty warm-up (0 disables)");
    option(app, "warmup-factor", warmup_factor, "initial penalty multiple during warm-up");
  }

  RopOptions options() const {
    RopOptions o;
    o.rho = rho;
    o.max_iter = max_iter;
    o.primal_tol = tol;
    o.penalty_scaling = parse_scaling(penalty_scaling);
    o.p_update_mode = parse_p_update(p_update);
    o.warmup_iters = warmup_iters;
    o.warmup_factor = warmup_factor;
    return o;
  }

  void echo(json& cfg) const {
    cfg["rho"] = rho;
    cfg["max_iter"] = max_iter;
    cfg["tol"] = tol;
    cfg["penalty_scaling"] = penalty_scaling;
    cfg["p_update"] = p_update;
    cfg["warmup_iters"] = warmup_iters;
    cfg["warmup_factor"] = warmup_factor;
  }
};

fs::path make_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
  return fs::path(dir);
}

std::ofstream open_text(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

void write_json(const fs::path& path, const json& value) {
  auto out = open_text(path);
  out << value.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

void write_flags(const fs::path& path, const std::vector<bool>& flags) {
  Mat m(static_cast<Eigen::Index>(flags.size()), 1);
  for (std::size_t i = 0; i < flags.size(); ++i) {
    m(static_cast<Eigen::Index>(i), 0) = flags[i] ? 1.0 : 0.0;
  }
  write_matcsv(path, m);
}

bool is_pgm(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".pgm";
}

std::vector<int> parse_int_list(const std::string& list, const std::string& what) {
  std::vector<int> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw InvalidArgument(what + ": '" + item + "' is not an integer");
    }
  }
  if (out.empty()) throw InvalidArgument(what + ": empty list");
  return out;
}

// One PGM image, or the listed images of an IDX file.
std::vector<GrayImage> load_images(const std::string& path, const std::vector<int>& indices) {
  if (is_pgm(path)) return {read_pgm(fs::path(path))};
  const std::vector<GrayImage> all = read_idx_images(fs::path(path));
  std::vector<GrayImage> picked;
  for (int i : indices) {
    if (i < 0 || static_cast<std::size_t>(i) >= all.size()) {
      throw InvalidArgument("image index " + std::to_string(i) + " out of range for '" +
                            path + "' (" + std::to_string(all.size()) + " images)");
    }
    picked.push_back(all[static_cast<std::size_t>(i)]);
  }
  return picked;
}

GrayImage load_image(const std::string& path, int index) {
  return load_images(path, {index}).front();
}

std::string format_dims(const GrayImage& img) {
  return std::to_string(img.height()) + "x" + std::to_string(img.width());
}

// ---- synth-bench ----------------------------------------------------------

struct SynthBench {
  SynthConfig config;
  std::string methods = "rop,ksvd,mod";
  RopFlags rop;
  std::string out = "synth-bench-out";

  void add(CLI::App* app) {
    option(app, "M", config.M, "signal dimension");
    option(app, "K", config.K, "number of atoms");
    option(app, "S", config.S, "nonzeros per coefficient column");
    option(app, "N", config.N, "number of training samples");
    option(app, "trials", config.trials, "independent trials");
    option(app, "seed", config.seed, "master seed");
    option(app, "methods", methods, "comma-separated subset of rop,ksvd,mod");
    rop.add(app);
    option(app, "baseline-max-iter", config.baseline_max_iter,
           "outer iterations for MOD and K-SVD");
    toggle(app, "record-timing", config.record_timing,
           "store wall-clock seconds (makes results.jsonl non-reproducible)");
    option(app, "out", out, "output directory");
  }

  int run(std::ostream& log) {
    config.methods = parse_methods(methods);
    config.rop = rop.options();
    validate(config);
    const fs::path dir = make_out_dir(out);

    json cfg = json::parse(config_json(config));
    cfg["warmup_iters"] = rop.warmup_iters;
    cfg["warmup_factor"] = rop.warmup_factor;
    cfg["record_timing"] = config.record_timing;
    json echo{{"command", "synth-bench"}};
    echo.update(cfg);
    write_json(dir / "config.json", echo);

    const BenchmarkReport report = run_benchmark(config);
    {
      auto f = open_text(dir / "results.jsonl");
      write_results_jsonl(f, config, report);
    }
    {
      auto f = open_text(dir / "summary.csv");
      write_summary_csv(f, config, report);
    }
    for (const auto& s : report.summary) {
      log << to_string(s.method) << " mean_error " << format_real(s.mean_error) << " over "
          << s.trials << " trials\n";
    }
    return kOk;
  }
};

// ---- train ----------------------------------------------------------------

struct Train {
  std::string input;
  std::string method = "rop";
  int K = 32;
  int S = 3;
  std::uint64_t seed = 0;
  RopFlags rop;
  int baseline_max_iter = 500;
  bool record_trace = false;
  std::string out = "train-out";

  void add(CLI::App* app) {
    option(app, "input", input, "training matrix Y in matcsv format")->required();
    option(app, "method", method, "rop, mod or ksvd");
    option(app, "K", K, "number of atoms");
    option(app, "S", S, "sparsity for mod and ksvd");
    option(app, "seed", seed, "solver seed");
    rop.add(app);
    option(app, "baseline-max-iter", baseline_max_iter, "outer iterations for mod and ksvd");
    toggle(app, "record-trace", record_trace, "write per-iteration residuals to trace.csv");
    option(app, "out", out, "output directory");
  }

  int run(std::ostream& log) {
    const Method m = parse_method(method);
    RopOptions ropts = rop.options();
    ropts.atoms = K;
    ropts.seed = seed;
    ropts.record_trace = record_trace;
    validate(ropts);
    const Mat y = read_matcsv(fs::path(input));
    const fs::path dir = make_out_dir(out);

    json cfg{{"command", "train"}, {"input", input}, {"method", method}, {"K", K}};
    if (m == Method::kRop) {
      rop.echo(cfg);
    } else {
      cfg["S"] = S;
      cfg["baseline_max_iter"] = baseline_max_iter;
    }
    cfg["seed"] = seed;
    cfg["record_trace"] = record_trace;
    write_json(dir / "config.json", cfg);

    DictionaryModel model;
    Vec sigma;
    if (m == Method::kRop) {
      RopResult r = run_rop(y, ropts);
      log << "rop: " << r.iterations_run << " iterations, max primal residual "
          << format_real(r.residuals.max_primal())
          << (r.converged ? " (converged)" : " (iteration cap reached)") << '\n';
      if (record_trace) {
        auto f = open_text(dir / "trace.csv");
        write_trace(f, r.trace);
      }
      sigma.resize(static_cast<Eigen::Index>(r.atoms.size()));
      for (std::size_t k = 0; k < r.atoms.size(); ++k) {
        sigma(static_cast<Eigen::Index>(k)) = r.atoms[k].sigma;
      }
      model = std::move(r.model);
    } else {
      TwoStageOptions t;
      t.atoms = K;
      t.sparsity = S;
      t.max_outer_iter = baseline_max_iter;
      t.seed = seed;
      t.method = m == Method::kMod ? DictionaryUpdate::kMod : DictionaryUpdate::kKsvd;
      TwoStageResult r = run_two_stage(y, t);
      log << method << ": " << r.trace.size() << " iterations, ||Y - DX||_F "
          << format_real(r.trace.back()) << '\n';
      if (record_trace) {
        auto f = open_text(dir / "trace.csv");
        for (std::size_t i = 0; i < r.trace.size(); ++i) {
          f << (i + 1) << ',' << format_real(r.trace[i]) << '\n';
        }
      }
      sigma = r.model.X.rowwise().norm();
      model = std::move(r.model);
    }

    write_matcsv(dir / "D.csv", model.D);
    write_matcsv(dir / "X.csv", model.X);
    // One row per atom: sigma (coefficient-row norm), dead flag.
    Mat atoms(model.D.cols(), 2);
    for (Eigen::Index k = 0; k < atoms.rows(); ++k) {
      atoms(k, 0) = sigma(k);
      atoms(k, 1) = model.dead[static_cast<std::size_t>(k)] ? 1.0 : 0.0;
    }
    write_matcsv(dir / "atoms.csv", atoms);
    return kOk;
  }
};

// ---- sr-train ---------------------------------------------------------------

struct SrTrain {
  std::vector<std::string> train;
  std::string indices = "0";
  int digit = 5;
  std::uint64_t render_seed = 1;
  std::string method = "rop";
  int K = 128;
  int S = 3;
  int patch = 3;
  std::uint64_t seed = 0;
  RopFlags rop;
  int baseline_max_iter = 500;
  std::string out = "sr-train-out";

  void add(CLI::App* app) {
    option(app, "train", train,
           "high-resolution training images (PGM, or IDX with --indices); "
           "when absent a digit is rendered");
    option(app, "indices", indices, "comma-separated image indices used from IDX files");
    option(app, "digit", digit, "digit to render when no --train is given");
    option(app, "render-seed", render_seed, "seed of the rendered training digit");
    option(app, "method", method, "rop, mod or ksvd");
    option(app, "K", K, "number of atoms");
    option(app, "S", S, "training sparsity for mod and ksvd");
    option(app, "patch", patch, "low-resolution patch size p (high patches are 2p)");
    option(app, "seed", seed, "solver seed");
    rop.add(app);
    option(app, "baseline-max-iter", baseline_max_iter, "outer iterations for mod and ksvd");
    option(app, "out", out, "output directory");
  }

  int run(std::ostream& log) {
    const Method m = parse_method(method);
    SrTrainOptions opts;
    opts.atoms = K;
    opts.sparsity = S;
    opts.low_patch_size = patch;
    opts.seed = seed;
    opts.rop = rop.options();
    opts.baseline_max_iter = baseline_max_iter;

    std::vector<GrayImage> images;
    if (train.empty()) {
      images.push_back(render_digit(digit, render_seed));
    } else {
      const std::vector<int> idx = parse_int_list(indices, "--indices");
      for (const auto& path : train) {
        for (auto& img : load_images(path, idx)) images.push_back(std::move(img));
      }
    }
    const Mat y = build_training_matrix(images, patch);
    const fs::path dir = make_out_dir(out);

    json cfg{{"command", "sr-train"}};
    if (train.empty()) {
      cfg["digit"] = digit;
      cfg["render_seed"] = render_seed;
    } else {
      cfg["train"] = train;
      cfg["indices"] = indices;
    }
    cfg["method"] = method;
    cfg["K"] = K;
    cfg["patch"] = patch;
    if (m == Method::kRop) {
      rop.echo(cfg);
    } else {
      cfg["S"] = S;
      cfg["baseline_max_iter"] = baseline_max_iter;
    }
    cfg["seed"] = seed;
    cfg["training_matrix"] = {y.rows(), y.cols()};
    write_json(dir / "config.json", cfg);

    const CoupledDictionary dict = train_joint_dictionary(y, m, opts);
    write_matcsv(dir / "dictionary.csv", dict.stacked());
    write_flags(dir / "dead.csv", dict.dead);
    if (train.empty()) write_pgm(dir / "train.pgm", images.front());
    log << method << ": training matrix " << y.rows() << "x" << y.cols() << ", D_L "
        << dict.low.rows() << "x" << dict.low.cols() << ", D_H " << dict.high.rows() << "x"
        << dict.high.cols() << '\n';
    return kOk;
  }
};

CoupledDictionary load_dictionary(const fs::path& dir, int patch) {
  const Mat stacked = read_matcsv(dir / "dictionary.csv");
  std::vector<bool> dead;
  if (fs::exists(dir / "dead.csv")) {
    const Mat flags = read_matcsv(dir / "dead.csv");
    for (Eigen::Index k = 0; k < flags.rows(); ++k) dead.push_back(flags(k, 0) != 0.0);
  }
  return CoupledDictionary::from_stacked(stacked, patch, std::move(dead));
}

// ---- sr-reconstruct -----------------------------------------------------------

struct SrReconstruct {
  std::string dict;
  int patch = 3;
  std::string input;
  int index = 0;
  bool from_high = false;
  std::string truth;
  int digit = 5;
  std::uint64_t render_seed = 2;
  int s_test = 3;
  std::string out = "sr-reconstruct-out";

  void add(CLI::App* app) {
    option(app, "dict", dict, "directory written by sr-train")->required();
    option(app, "patch", patch, "low-resolution patch size the dictionary was trained with");
    option(app, "input", input,
           "low-resolution image (PGM or IDX); when absent a digit is rendered, "
           "downsampled and used as ground truth");
    option(app, "index", index, "image index inside an IDX input");
    toggle(app, "from-high", from_high,
           "treat --input as high resolution: downsample it and score against it");
    option(app, "truth", truth, "high-resolution ground truth for scoring");
    option(app, "digit", digit, "digit to render when no --input is given");
    option(app, "render-seed", render_seed, "seed of the rendered test digit");
    option(app, "S-test", s_test, "OMP sparsity when coding low-resolution patches");
    option(app, "out", out, "output directory");
  }

  int run(std::ostream& log) {
    const CoupledDictionary d = load_dictionary(fs::path(dict), patch);

    GrayImage low;
    std::optional<GrayImage> reference;
    if (input.empty()) {
      reference = render_digit(digit, render_seed);
      low = downsample_2x2(*reference);
    } else if (from_high) {
      reference = load_image(input, index);
      low = downsample_2x2(*reference);
    } else {
      low = load_image(input, index);
    }
    if (!truth.empty()) reference = load_image(truth, 0);
    if (reference && (reference->height() != 2 * low.height() ||
                      reference->width() != 2 * low.width())) {
      throw InvalidArgument("ground truth is " + format_dims(*reference) +
                            " but the low-resolution input is " + format_dims(low) +
                            "; expected exactly twice its size");
    }

    const GrayImage estimate = reconstruct_high_res(low, d, s_test);
    const GrayImage nearest = upsample_nearest_2x(low);
    const fs::path dir = make_out_dir(out);

    json cfg{{"command", "sr-reconstruct"}, {"dict", dict}, {"patch", patch}};
    if (input.empty()) {
      cfg["digit"] = digit;
      cfg["render_seed"] = render_seed;
    } else {
      cfg["input"] = input;
      cfg["index"] = index;
      cfg["from_high"] = from_high;
    }
    if (!truth.empty()) cfg["truth"] = truth;
    cfg["S_test"] = s_test;
    write_json(dir / "config.json", cfg);

    write_pgm(dir / "reconstruction.pgm", estimate);
    write_pgm(dir / "nearest.pgm", nearest);
    write_pgm(dir / "low.pgm", low);
    if (reference) {
      write_pgm(dir / "truth.pgm", *reference);
      const double err = sr_error(estimate, *reference);
      const double nn = sr_error(nearest, *reference);
      write_json(dir / "metrics.json", json{{"sr_error", err}, {"nearest_sr_error", nn}});
      log << "sr_error " << format_real(err) << " (nearest-neighbour " << format_real(nn)
          << ")\n";
    }
    log << "wrote " << estimate.height() << "x" << estimate.width() << " reconstruction\n";
    return kOk;
  }
};

// ---- eval ---------------------------------------------------------------------

struct Eval {
  std::string estimate;
  std::string truth;
  int index = 0;
  std::string out;

  void add(CLI::App* app) {
    option(app, "estimate", estimate, "reconstructed image (PGM or IDX)")->required();
    option(app, "truth", truth, "ground-truth image (PGM or IDX)")->required();
    option(app, "index", index, "image index inside IDX inputs");
    option(app, "out", out, "optional directory for eval.json");
  }

  int run(std::ostream& log) {
    const GrayImage a = load_image(estimate, index);
    const GrayImage b = load_image(truth, index);
    const double err = sr_error(a, b);
    log << format_real(err) << '\n';
    if (!out.empty()) {
      const fs::path dir = make_out_dir(out);
      write_json(dir / "config.json",
                 json{{"command", "eval"}, {"estimate", estimate}, {"truth", truth},
                      {"index", index}});
      write_json(dir / "eval.json", json{{"sr_error", err}});
    }
    return kOk;
  }
};

// ---- make-digits --------------------------------------------------------------

struct MakeDigits {
  std::string digits = "0,1,2,3,4,5,6,7,8,9";
  std::uint64_t render_seed = 1;
  std::string out = "digits";

  void add(CLI::App* app) {
    option(app, "digits", digits, "comma-separated digits to render");
    option(app, "render-seed", render_seed, "rendering seed");
    option(app, "out", out, "output directory");
  }

  int run(std::ostream& log) {
    const std::vector<int> list = parse_int_list(digits, "--digits");
    std::vector<GrayImage> images;
    for (int d : list) images.push_back(render_digit(d, render_seed));
    const fs::path dir = make_out_dir(out);
    write_json(dir / "config.json", json{{"command", "make-digits"},
                                         {"digits", digits},
                                         {"render_seed", render_seed}});
    for (std::size_t i = 0; i < list.size(); ++i) {
      write_pgm(dir / ("digit_" + std::to_string(list[i]) + ".pgm"), images[i]);
    }
    write_idx_images(dir / "digits.idx", images);
    log << "rendered " << images.size() << " digits\n";
    return kOk;
  }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rank-one projection dictionary learning and baselines", "ropdl"};
  app.require_subcommand(1);
  app.fallthrough();
  app.get_formatter()->column_width(44);

  int threads = 1;
  option(&app, "threads", threads, "worker threads; outputs do not depend on it")
      ->check(CLI::PositiveNumber);

  SynthBench synth;
  Train train;
  SrTrain sr_train;
  SrReconstruct sr_reconstruct;
  Eval eval;
  MakeDigits make_digits;
  std::function<int(std::ostream&)> action;

  auto* c_synth = app.add_subcommand("synth-bench", "synthetic dictionary-recovery benchmark");
  synth.add(c_synth);
  c_synth->callback([&] { action = [&](std::ostream& o) { return synth.run(o); }; });

  auto* c_train = app.add_subcommand("train", "learn a dictionary from a matcsv matrix");
  train.add(c_train);
  c_train->callback([&] { action = [&](std::ostream& o) { return train.run(o); }; });

  auto* c_srt = app.add_subcommand("sr-train", "learn a coupled super-resolution dictionary");
  sr_train.add(c_srt);
  c_srt->callback([&] { action = [&](std::ostream& o) { return sr_train.run(o); }; });

  auto* c_srr = app.add_subcommand("sr-reconstruct", "2x reconstruction with a coupled dictionary");
  sr_reconstruct.add(c_srr);
  c_srr->callback([&] { action = [&](std::ostream& o) { return sr_reconstruct.run(o); }; });

  auto* c_eval = app.add_subcommand("eval", "normalized squared Frobenius error of two images");
  eval.add(c_eval);
  c_eval->callback([&] { action = [&](std::ostream& o) { return eval.run(o); }; });

  auto* c_digits = app.add_subcommand("make-digits", "render synthetic 28x28 digits");
  make_digits.add(c_digits);
  c_digits->callback([&] { action = [&](std::ostream& o) { return make_digits.run(o); }; });

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();  // program name
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    set_thread_count(threads);
    return action(out);
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  }
}

}  // namespace ropdl::cli
