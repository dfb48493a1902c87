// Copyright 2026 The packsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "packsim/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "packsim/benchmark.hpp"
#include "packsim/executive.hpp"
#include "packsim/imaging.hpp"
#include "packsim/perception.hpp"

namespace packsim::cli {

namespace fs = std::filesystem;

namespace {

std::uint64_t env_seed() {
  const char* s = std::getenv("ABATRE_SEED");
  if (s == nullptr || *s == '\0') return 0;
  return std::stoull(s);
}

std::ofstream open_out(const fs::path& p, std::ios::openmode mode = std::ios::out) {
  std::ofstream f(p, mode);
  if (!f) throw std::runtime_error("cannot write '" + p.string() + "'");
  return f;
}

std::vector<std::string> condition_names() {
  std::vector<std::string> out;
  for (auto c : {imaging::Condition::Deformation, imaging::Condition::Contamination,
                 imaging::Condition::Dust, imaging::Condition::Scratches}) {
    out.emplace_back(imaging::condition_name(c));
  }
  return out;
}

struct RunArgs {
  std::string scene = "benchmark";
  std::uint64_t seed = 0;
  std::string out = "packsim_out";
  planner::PlannerParams planner;
  int max_replans = 5;
  std::string detector = "oracle";
  std::map<std::string, double> score_overrides;
  std::string condition;
  bool snapshots = false;
  bool trajectories = false;
};

int cmd_run(const RunArgs& a, std::ostream& out) {
  const scene::SceneWorld world = a.scene == "benchmark" ? benchmark_scene() : scene::load_scene(a.scene);
  const fs::path dir(a.out);
  fs::create_directories(dir);

  perception::ScoreModel scores = perception::ScoreModel::defaults();
  for (const auto& [key, value] : a.score_overrides) {
    const auto us = key.rfind('_');
    const auto cat = scene::parse_category(key.substr(0, us));
    auto& p = scores.by_category[*cat];
    (key.substr(us + 1) == "mean" ? p.mean : p.sigma) = value;
  }
  perception::OracleDetector detector(scores);

  executive::RunOptions opt = benchmark_options(a.seed);
  opt.planner = a.planner;
  opt.max_replans = a.max_replans;
  opt.keep_trajectories = a.trajectories;

  std::optional<imaging::Condition> condition;
  if (!a.condition.empty()) condition = imaging::parse_condition(a.condition);
  auto snapshot = [&](const scene::SceneWorld& w, const std::string& name) {
    RasterImage img = perception::render_color(w, w.camera);
    if (condition) {
      imaging::Rng rng(a.seed);
      img = imaging::apply_condition(img, *condition, rng);
    }
    imaging::write_png(dir / name, img);
  };
  if (a.snapshots) snapshot(world, "before.png");

  const auto result = executive::run_disassembly(world, executive::benchmark_arm(), detector, opt);

  {
    auto f = open_out(dir / "metrics.csv");
    executive::write_metrics_csv(f, result.records);
  }
  {
    auto f = open_out(dir / "summary.json");
    executive::write_summary_json(f, result);
  }
  if (a.snapshots) snapshot(result.final_world, "after.png");
  if (a.trajectories) {
    const fs::path tdir = dir / "trajectories";
    fs::create_directories(tdir);
    for (std::size_t i = 0; i < result.trajectories.size(); ++i) {
      const auto& t = result.trajectories[i];
      char name[128];
      std::snprintf(name, sizeof name, "%03zu_%s_%s.csv", i, t.target.c_str(), t.phase.c_str());
      auto f = open_out(tdir / name);
      planner::write_trajectory_csv(f, t.trajectory);
    }
  }

  std::size_t ok = 0;
  for (const auto& r : result.records) ok += r.success ? 1 : 0;
  out << ok << '/' << result.records.size() << " tasks succeeded, simulated time "
      << result.sim_time << " s\n";
  return ok == result.records.size() ? kExitOk : kExitFailure;
}

int cmd_augment(const std::string& in_dir, const std::string& out_dir, int variants,
                std::uint64_t seed, std::ostream& out) {
  const fs::path in(in_dir);
  const fs::path dst(out_dir);
  const auto entries = imaging::read_manifest(in / "manifest.json");
  fs::create_directories(dst);
  imaging::Rng master(seed);
  std::vector<imaging::ManifestEntry> written;
  for (const auto& e : entries) {
    imaging::LabeledImage li;
    li.image = imaging::read_image(in / e.image);
    li.labels = imaging::read_labels_csv(in / e.labels);
    if (!imaging::labels_valid(li)) {
      throw std::runtime_error("labels of '" + e.image + "' do not fit the image");
    }
    imaging::Rng rng(master());
    const auto outs = imaging::expand_dataset(li, variants, rng);
    const std::string stem = fs::path(e.image).stem().string();
    for (std::size_t k = 0; k < outs.size(); ++k) {
      const std::string base = stem + "_v" + std::to_string(k);
      imaging::write_png(dst / (base + ".png"), outs[k].image);
      imaging::write_labels_csv(dst / (base + ".csv"), outs[k].labels);
      written.push_back({base + ".png", base + ".csv"});
    }
  }
  imaging::write_manifest(dst / "manifest.json", written);
  out << written.size() << " labeled images written to " << dst.string() << '\n';
  return kExitOk;
}

int cmd_condition(const std::string& input, const std::string& name, std::uint64_t seed,
                  std::string out_path, std::ostream& out) {
  const auto condition = imaging::parse_condition(name);
  const RasterImage img = imaging::read_image(input);
  imaging::Rng rng(seed);
  const RasterImage res = imaging::apply_condition(img, *condition, rng);
  if (out_path.empty()) out_path = fs::path(input).stem().string() + "_" + name + ".png";
  const fs::path p(out_path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  imaging::write_image(p, res);
  out << "wrote " << p.string() << '\n';
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Headless EV battery pack disassembly simulator", "packsim"};
  app.require_subcommand(1);

  const std::uint64_t default_seed = env_seed();

  RunArgs ra;
  ra.seed = default_seed;
  auto* run = app.add_subcommand("run", "Run the stage-gated disassembly of a scene");
  run->add_option("--scene", ra.scene, "Scene JSON path, or 'benchmark'")->capture_default_str();
  run->add_option("--seed", ra.seed, "Master seed (falls back to $ABATRE_SEED, then 0)")
      ->capture_default_str();
  run->add_option("--out", ra.out, "Output directory")->capture_default_str();
  run->add_option("--planner.i_max", ra.planner.i_max, "Iteration budget per plan")
      ->capture_default_str()->check(CLI::NonNegativeNumber);
  run->add_option("--planner.goal_bias", ra.planner.goal_bias, "Goal sampling probability")
      ->capture_default_str()->check(CLI::Range(0.0, 1.0));
  run->add_option("--planner.steer_min", ra.planner.steer_min, "Minimum extension (rad)")
      ->capture_default_str();
  run->add_option("--planner.steer_max", ra.planner.steer_max, "Maximum extension (rad)")
      ->capture_default_str();
  run->add_option("--planner.neighbor_radius", ra.planner.neighbor_radius, "Rewire radius (rad)")
      ->capture_default_str();
  run->add_option("--planner.edge_resolution", ra.planner.edge_resolution,
                  "Edge collision-check spacing (rad)")
      ->capture_default_str();
  run->add_option("--planner.max_replans", ra.max_replans, "Fresh-seed retries per move")
      ->capture_default_str()->check(CLI::NonNegativeNumber);
  run->add_option("--detector", ra.detector, "Detector implementation")
      ->capture_default_str()->check(CLI::IsMember({"oracle"}));
  for (const char* cat : {"bolt", "cable", "module"}) {
    for (const char* field : {"mean", "sigma"}) {
      const std::string key = std::string(cat) + "_" + field;
      run->add_option_function<double>(
          "--detector." + key, [&ra, key](double v) { ra.score_overrides[key] = v; },
          std::string("Detection score ") + field + " for " + cat);
    }
  }
  run->add_option("--condition", ra.condition, "Condition filter applied to snapshots")
      ->check(CLI::IsMember(condition_names()));
  run->add_flag("--snapshots", ra.snapshots, "Write before/after PNG snapshots");
  run->add_flag("--trajectories", ra.trajectories, "Dump every timed trajectory as CSV");

  std::string aug_in, aug_out = "augmented";
  int variants = imaging::kDefaultVariants;
  std::uint64_t aug_seed = default_seed;
  auto* augment = app.add_subcommand("augment", "Expand a labeled image set");
  augment->add_option("--in", aug_in, "Directory holding manifest.json")->required();
  augment->add_option("--out", aug_out, "Output directory")->capture_default_str();
  augment->add_option("--variants", variants, "Variants per input")
      ->capture_default_str()->check(CLI::Range(1, 1000000));
  augment->add_option("--seed", aug_seed, "Master seed")->capture_default_str();

  std::string cond_in, cond_name, cond_out;
  std::uint64_t cond_seed = default_seed;
  auto* condition = app.add_subcommand("condition", "Apply a pack-condition filter to an image");
  condition->add_option("image", cond_in, "Input PNG or PPM")->required();
  condition->add_option("condition", cond_name, "Condition name")
      ->required()->check(CLI::IsMember(condition_names()));
  condition->add_option("--seed", cond_seed, "Filter seed")->capture_default_str();
  condition->add_option("--out", cond_out, "Output image path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*run) {
      ra.planner.rng_seed = 0;
      planner::validate_params(ra.planner);
      return cmd_run(ra, out);
    }
    if (*augment) return cmd_augment(aug_in, aug_out, variants, aug_seed, out);
    if (*condition) return cmd_condition(cond_in, cond_name, cond_seed, cond_out, out);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace packsim::cli
