#include "chairsynth/config.hpp"
#include "chairsynth/demo_motions.hpp"
#include "chairsynth/eval_server.hpp"
#include "chairsynth/evalsvc.hpp"
#include "chairsynth/metrics.hpp"
#include "chairsynth/pipeline.hpp"
#include "chairsynth/simd/kernels.hpp"
#include "chairsynth/stats.hpp"

#include "CLI11.hpp"

#include <csignal>
#include <cstdio>
#include <iostream>

using namespace chairsynth;
using nlohmann::json;

namespace {

GeneratorConfig config_or_default(const std::string& path) {
  return path.empty() ? default_generator_config() : load_generator_config(path);
}

int cmd_generate(const std::string& config_path, const GenerateOptions& opts, bool as_json) {
  const GeneratorConfig config = config_or_default(config_path);
  const GenerateSummary s = generate_dataset(config, opts);
  if (as_json) {
    std::cout << json{{"frames", s.frames},
                      {"annotations", s.annotations},
                      {"motions", s.motions},
                      {"motions_removed", s.motions_removed},
                      {"seconds", s.seconds},
                      {"frames_per_second", s.frames_per_second()},
                      {"out", opts.out.string()}}
                     .dump()
              << '\n';
  } else {
    std::printf("generated %zu frames, %zu annotations from %zu motions (%zu filtered out)\n",
                s.frames, s.annotations, s.motions, s.motions_removed);
    std::printf("%.2f s, %.1f frames/s -> %s\n", s.seconds, s.frames_per_second(),
                opts.out.string().c_str());
  }
  return 0;
}

int cmd_analyze(const std::string& dataset, const std::string& compare, const std::string& out,
                bool as_json) {
  const DatasetStats a = analyze_dataset(dataset);
  std::optional<DatasetStats> b;
  if (!compare.empty()) {
    b = analyze_dataset(compare);
  }
  if (!out.empty()) {
    write_stats_report(a, out);
    if (b) {
      write_stats_report(*b, std::filesystem::path(out) / "compare");
    }
  }
  if (as_json) {
    json j = {{"dataset", stats_to_json(a)}};
    if (b) {
      j["compare"] = stats_to_json(*b);
    }
    std::cout << j.dump() << '\n';
  } else {
    std::cout << stats_table(a, b ? &*b : nullptr);
  }
  return 0;
}

int cmd_evaluate(const std::string& gt_path, const std::string& pred_path, const std::string& out,
                 bool as_json) {
  const CocoDataset gt = read_coco_dataset(gt_path);
  const std::vector<Detection> preds = read_detections(pred_path);
  const auto bad = unknown_image_ids(preds, gt);
  if (!bad.empty()) {
    std::string ids;
    for (std::size_t i = 0; i < bad.size() && i < 20; ++i) {
      ids += (i ? ", " : "") + std::to_string(bad[i]);
    }
    throw InvalidArgument("predictions reference image ids missing from the ground truth: " + ids +
                          (bad.size() > 20 ? ", ..." : ""));
  }
  const MetricReport r = evaluate(preds, gt);
  if (!out.empty()) {
    write_text_file(out, report_to_json(r).dump(2) + "\n");
  }
  if (as_json) {
    std::cout << report_to_json(r).dump() << '\n';
  } else {
    std::cout << report_table(r);
  }
  return 0;
}

int cmd_filter(const std::string& responses, double fraction, const std::string& out,
               const std::string& score, const std::string& motions, bool as_json) {
  ScoreOptions so;
  so.mode = parse_score_mode(score);
  const EvalAnalysis a = analyze_responses(load_responses(responses), {}, so);
  std::optional<std::vector<std::string>> catalogue;
  if (!motions.empty()) {
    catalogue.emplace();
    for (const auto& f : list_motion_files(motions)) {
      catalogue->push_back(f.stem().string());
    }
  }
  const FilterManifest m = filter_bottom_fraction(a, fraction, catalogue ? &*catalogue : nullptr);
  save_manifest(m, out);
  if (as_json) {
    std::cout << json{{"manifest", manifest_to_json(m)}, {"analysis", analysis_to_json(a)}}.dump()
              << '\n';
  } else {
    const auto& g = a.groups.front();
    std::printf("%zu motions rated by %zu participants; removed %zu, kept %zu -> %s\n",
                a.motions.size(), a.participants, m.removed.size(), m.kept.size(), out.c_str());
    std::printf("mean ease %.3f, mean frequency %.3f, pearson r %s\n", g.mean_ease,
                g.mean_frequency, g.pearson_r ? std::to_string(*g.pearson_r).c_str() : "undefined");
  }
  return 0;
}

int cmd_serve(const std::string& motions, const std::string& store, int port,
              const std::string& host, const std::string& static_dir) {
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);
  EvalService service(motions, store);
  EvalServer server(service, static_dir);
  const int bound = server.bind(host, port);
  server.start();
  std::printf("listening on http://%s:%d (%zu motions)\n", host.c_str(), bound,
              service.motion_ids().size());
  std::fflush(stdout);
  int sig = 0;
  sigwait(&set, &sig);
  server.stop();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"chairsynth: synthetic wheelchair-user pose datasets"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string isa = "auto";
  bool as_json = false;
  app.add_option("--isa", isa, "Kernel variant: auto, scalar or avx2");
  app.add_flag("--json", as_json, "Machine-readable output");

  auto* gen = app.add_subcommand("generate", "Generate an annotated dataset");
  std::string config_path;
  GenerateOptions gopts;
  std::string motions_dir;
  std::string filter_path;
  std::string out_dir;
  gen->add_option("--config", config_path, "Generator config file (defaults when omitted)");
  gen->add_option("--seed", gopts.seed, "Generation seed")->required();
  gen->add_option("--count", gopts.count, "Number of frames")->required();
  gen->add_option("--motions", motions_dir, "Directory of motion files")->required();
  gen->add_option("--filter", filter_path, "Filter manifest of motions to exclude");
  gen->add_option("--out", out_dir, "Output directory")->required();
  gen->add_option("--workers", gopts.workers, "Worker threads")->check(CLI::PositiveNumber);

  auto* ana = app.add_subcommand("analyze", "Dataset statistics");
  std::string dataset;
  std::string compare;
  std::string stats_out;
  ana->add_option("--dataset", dataset, "Dataset directory or annotation file")->required();
  ana->add_option("--compare", compare, "Second dataset for a side-by-side table");
  ana->add_option("--out", stats_out, "Directory for stats.json and heatmap CSVs");

  auto* ev = app.add_subcommand("evaluate", "Score predictions against ground truth");
  std::string gt;
  std::string pred;
  std::string report_out;
  ev->add_option("--gt", gt, "Ground-truth annotation file")->required();
  ev->add_option("--pred", pred, "Detection results file")->required();
  ev->add_option("--out", report_out, "Write the report JSON here");

  auto* fil = app.add_subcommand("filter-motions", "Bottom-fraction motion filter");
  std::string responses;
  double fraction = 0.10;
  std::string manifest_out;
  std::string score = "mean";
  std::string catalogue;
  fil->add_option("--responses", responses, "Response log")->required();
  fil->add_option("--fraction", fraction, "Fraction of motions to remove")
      ->check(CLI::Range(0.0, 1.0));
  fil->add_option("--out", manifest_out, "Manifest output path")->required();
  fil->add_option("--score", score, "Total score from per-motion means or raw sums")
      ->check(CLI::IsMember({"mean", "sum"}));
  fil->add_option("--motions", catalogue, "Motion directory; every motion must be rated");

  auto* srv = app.add_subcommand("serve-eval", "Run the human-evaluation service");
  std::string serve_motions;
  std::string store;
  int port = 8080;
  std::string host = "127.0.0.1";
  std::string static_dir;
  srv->add_option("--motions", serve_motions, "Directory of motion files")->required();
  srv->add_option("--store", store, "Response log path")->required();
  srv->add_option("--port", port, "TCP port (0 picks a free one)");
  srv->add_option("--host", host, "Bind address");
  srv->add_option("--static", static_dir, "Directory served at /");

  auto* demo = app.add_subcommand("make-demo-motions", "Write procedural demo motion clips");
  std::string demo_out;
  std::size_t demo_count = 20;
  std::uint64_t demo_seed = 0;
  demo->add_option("--out", demo_out, "Output directory")->required();
  demo->add_option("--count", demo_count, "Number of clips");
  demo->add_option("--seed", demo_seed, "Seed");

  auto* dump = app.add_subcommand("print-config", "Print the default generator config");

  CLI11_PARSE(app, argc, argv);

  try {
    if (isa != "auto") {
      const auto which = simd::parse_isa(isa);
      if (!which) {
        throw InvalidArgument("unknown --isa '" + isa + "'");
      }
      if (!simd::isa_available(*which)) {
        throw InvalidArgument("--isa " + isa + " is not supported on this CPU");
      }
      simd::set_isa(*which);
    }
    if (*gen) {
      gopts.motions = motions_dir;
      gopts.out = out_dir;
      if (!filter_path.empty()) {
        gopts.filter = filter_path;
      }
      return cmd_generate(config_path, gopts, as_json);
    }
    if (*ana) {
      return cmd_analyze(dataset, compare, stats_out, as_json);
    }
    if (*ev) {
      return cmd_evaluate(gt, pred, report_out, as_json);
    }
    if (*fil) {
      return cmd_filter(responses, fraction, manifest_out, score, catalogue, as_json);
    }
    if (*srv) {
      return cmd_serve(serve_motions, store, port, host, static_dir);
    }
    if (*demo) {
      const auto files = write_demo_motions(demo_out, demo_count, demo_seed, default_skeleton());
      std::printf("wrote %zu motions to %s\n", files.size(), demo_out.c_str());
      return 0;
    }
    if (*dump) {
      std::cout << generator_config_to_json(default_generator_config()).dump(2) << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
