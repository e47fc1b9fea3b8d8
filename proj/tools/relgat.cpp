// Copyright (c) 2026, The relgat Authors
// SPDX-License-Identifier: Apache-2.0
//
// relgat command-line tool.
//
// Exit codes: 0 success, 1 gradient check failed, 2 usage or validation error.

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "relgat/relgat.hpp"

namespace {

using relgat::json;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

class UsageError : public relgat::Error {
 public:
  using Error::Error;
};

std::uint64_t default_seed() {
  if (const char* env = std::getenv("RELGAT_SEED")) {
    try {
      std::size_t used = 0;
      const auto value = std::stoull(env, &used);
      if (used == std::string(env).size()) return value;
    } catch (const std::exception&) {
    }
    throw UsageError(std::string("RELGAT_SEED is not an unsigned integer: '") +
                     env + "'");
  }
  return 0;
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw relgat::InputError("cannot write '" + path + "'");
  out << text;
}

std::vector<double> load_distribution(const std::string& path) {
  const json doc = relgat::load_json_file(path);
  relgat::check_format_version(doc, path);
  try {
    if (doc.is_array()) return doc.get<std::vector<double>>();
    return doc.at("probs").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw relgat::InputError(path + ": expected an array or {\"probs\": [...]}: " +
                             e.what());
  }
}

// ---------------------------------------------------------------------------

struct RelationsArgs {
  std::string input;
  std::string mode = "spatial";
  std::string weights;
  double threshold = relgat::kDefaultSemanticThreshold;
  double overlap_iou = 0.5;
  double distance_ratio = 0.5;
  std::string out;
};

int cmd_relations(const RelationsArgs& args) {
  const auto variant = relgat::parse_variant(args.mode);
  if (variant == relgat::GraphVariant::implicit) {
    throw UsageError("relations --mode must be spatial or semantic");
  }
  if (variant == relgat::GraphVariant::semantic && args.weights.empty()) {
    throw UsageError("semantic mode requires --weights");
  }
  const auto file = relgat::load_detection_file(args.input);
  std::optional<relgat::ParameterFile> params;
  if (!args.weights.empty()) params = relgat::load_parameter_file(args.weights);

  relgat::PipelineOptions opt;
  opt.spatial_rules = {args.overlap_iou, args.distance_ratio};
  opt.semantic_threshold = args.threshold;

  std::vector<relgat::EdgePrediction> predictions;
  relgat::RelationGraph graph = [&] {
    if (variant == relgat::GraphVariant::semantic) {
      if (!params->classifier) {
        throw relgat::ConfigError(args.weights + " has no classifier parameters");
      }
      predictions = relgat::predict_semantic_edges(file, *params->classifier);
      return relgat::build_semantic(file.size(), predictions, opt.semantic_threshold);
    }
    return relgat::build_graph(variant, file, nullptr, opt);
  }();

  json edges = json::array();
  for (const auto& e : graph.relation_edges()) {
    json j;
    j["src"] = e.src;
    j["dst"] = e.dst;
    j["label_name"] = relgat::label_name(e.label);
    j["label_id"] = e.label.id;
    if (variant == relgat::GraphVariant::semantic) {
      for (const auto& p : predictions) {
        if (p.src == e.src && p.dst == e.dst) {
          j["score"] = p.probs[static_cast<std::size_t>(e.label.id)];
        }
      }
    }
    edges.push_back(std::move(j));
  }
  json doc;
  doc["format_version"] = relgat::kFormatVersion;
  doc["image_id"] = file.image_id;
  doc["mode"] = relgat::variant_name(variant);
  doc["edges"] = std::move(edges);
  emit(relgat::dump_json(doc), args.out);
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct EncodeArgs {
  std::string input;
  std::string params;
  std::vector<std::string> graphs{"imp", "spa", "sem"};
  double threshold = relgat::kDefaultSemanticThreshold;
  std::string out;
};

int cmd_encode(const EncodeArgs& args) {
  const auto file = relgat::load_detection_file(args.input);
  const auto params = relgat::load_parameter_file(args.params);
  relgat::PipelineOptions opt;
  opt.semantic_threshold = args.threshold;

  json graphs = json::object();
  for (const auto& name : args.graphs) {
    const auto variant = relgat::parse_variant(name);
    const auto graph = relgat::build_graph(variant, file, &params, opt);
    const auto result = relgat::run_encoder(variant, file, graph, params);
    json entry;
    entry["refined"] =
        relgat::matrix_to_json(relgat::refine(file.features(), result.v_star));
    entry["attention"] = relgat::attention_to_json(result.attention);
    graphs[relgat::short_name(variant)] = std::move(entry);
  }
  json doc;
  doc["format_version"] = relgat::kFormatVersion;
  doc["image_id"] = file.image_id;
  doc["graphs"] = std::move(graphs);
  emit(relgat::dump_json(doc), args.out);
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct AttnArgs {
  std::string input;
  std::string params;
  std::string graph = "imp";
  std::size_t top_k = relgat::kDefaultTopK;
  std::string svg;
  std::size_t node = 0;
  double threshold = relgat::kDefaultSemanticThreshold;
  std::string out;
};

int cmd_attn(const AttnArgs& args) {
  if (args.top_k == 0) throw UsageError("--top-k must be at least 1");
  const auto file = relgat::load_detection_file(args.input);
  const auto params = relgat::load_parameter_file(args.params);
  const auto variant = relgat::parse_variant(args.graph);
  relgat::PipelineOptions opt;
  opt.semantic_threshold = args.threshold;
  const auto graph = relgat::build_graph(variant, file, &params, opt);
  const auto result = relgat::run_encoder(variant, file, graph, params);

  std::size_t k = args.top_k;
  if (k > file.size() - 1) {
    std::cerr << "warning: --top-k " << k << " exceeds n-1 = " << file.size() - 1
              << "; clamping\n";
    k = file.size() - 1;
  }
  emit(relgat::dump_json(relgat::top_k_to_json(file, variant, result.attention, graph, k)),
       args.out);
  if (!args.svg.empty()) {
    emit(relgat::render_attention_svg(file, result.attention, graph, args.node, k),
         args.svg);
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct FuseArgs {
  std::string spa, sem, imp;
  double alpha = relgat::kDefaultAlpha;
  double beta = relgat::kDefaultBeta;
  std::string out;
};

int cmd_fuse(const FuseArgs& args) {
  const relgat::FusionWeights w{args.alpha, args.beta};
  const auto fused = relgat::fuse(load_distribution(args.spa), load_distribution(args.sem),
                                  load_distribution(args.imp), w);
  json doc;
  doc["format_version"] = relgat::kFormatVersion;
  doc["alpha"] = w.alpha;
  doc["beta"] = w.beta;
  doc["implicit_weight"] = w.implicit_weight();
  doc["probs"] = fused;
  emit(relgat::dump_json(doc), args.out);
  return kExitOk;
}

// ---------------------------------------------------------------------------

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Runs `command alpha beta` and parses its standard output as one number.
double run_external_scorer(const std::string& command, const relgat::FusionWeights& w) {
  const std::string line = command + " " + format_real(w.alpha) + " " + format_real(w.beta);
  std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(line.c_str(), "r"), pclose);
  if (!pipe) throw relgat::Error("cannot start scorer command");
  std::string output;
  char buf[256];
  while (std::fgets(buf, sizeof buf, pipe.get())) output += buf;
  const int status = pclose(pipe.release());
  if (status != 0) {
    throw relgat::Error("scorer exited with status " + std::to_string(status));
  }
  std::istringstream in(output);
  double score = 0.0;
  if (!(in >> score) || !std::isfinite(score)) {
    throw relgat::Error("scorer printed no finite number");
  }
  return score;
}

/// Mean log-likelihood of target words under the fused distribution, for a
/// seeded synthetic caption. Each stream only knows the target on a random
/// subset of steps, so mixing them pays off.
std::function<double(const relgat::FusionWeights&)> synthetic_loglik_scorer(
    std::uint64_t seed) {
  constexpr std::size_t kVocab = 32;
  constexpr std::size_t kSteps = 200;
  struct Step {
    std::size_t target;
    std::array<std::vector<double>, 3> streams;  // spa, sem, imp
  };
  auto steps = std::make_shared<std::vector<Step>>();
  relgat::Rng rng(seed);
  const std::array<double, 3> informed_rate{0.55, 0.55, 0.65};
  for (std::size_t t = 0; t < kSteps; ++t) {
    Step step;
    step.target = static_cast<std::size_t>(rng.below(kVocab));
    for (std::size_t s = 0; s < 3; ++s) {
      std::vector<double> logits(kVocab);
      for (double& l : logits) l = rng.normal();
      if (rng.uniform() < informed_rate[s]) logits[step.target] += 5.0;
      step.streams[s] = relgat::stable_softmax(logits);
    }
    steps->push_back(std::move(step));
  }
  return [steps](const relgat::FusionWeights& w) {
    double total = 0.0;
    for (const auto& step : *steps) {
      const auto fused = relgat::fuse(step.streams[0], step.streams[1], step.streams[2], w);
      total += std::log(fused[step.target]);
    }
    return total / static_cast<double>(steps->size());
  };
}

struct SweepArgs {
  double step = 0.1;
  std::string scorer = "loglik";
  std::string scorer_cmd;
  std::optional<std::uint64_t> seed;
  std::string out;
};

int cmd_sweep(const SweepArgs& args) {
  std::function<double(const relgat::FusionWeights&)> scorer;
  if (!args.scorer_cmd.empty()) {
    scorer = [cmd = args.scorer_cmd](const relgat::FusionWeights& w) {
      return run_external_scorer(cmd, w);
    };
  } else if (args.scorer == "constant") {
    scorer = [](const relgat::FusionWeights&) { return 1.0; };
  } else if (args.scorer == "peak") {
    scorer = [](const relgat::FusionWeights& w) {
      return 1.0 - ((w.alpha - 0.3) * (w.alpha - 0.3) + (w.beta - 0.3) * (w.beta - 0.3));
    };
  } else if (args.scorer == "loglik") {
    scorer = synthetic_loglik_scorer(args.seed.value_or(default_seed()));
  } else {
    throw UsageError("unknown scorer '" + args.scorer +
                     "' (expected constant, peak or loglik)");
  }
  const auto grid = relgat::sweep(scorer, args.step);
  std::cerr << relgat::render_sweep_table(grid);
  emit(relgat::dump_json(relgat::sweep_to_json(grid)), args.out);
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct GradcheckArgs {
  std::string graph = "imp";
  std::optional<std::uint64_t> seed;
  std::size_t n = 5;
  std::size_t d = 16;
  std::size_t d_g = 16;
  std::string out;
};

int cmd_gradcheck(const GradcheckArgs& args) {
  if (args.n == 0 || args.d == 0) throw UsageError("--n and --d must be positive");
  relgat::GradcheckOptions opt;
  opt.variant = relgat::parse_variant(args.graph);
  opt.seed = args.seed.value_or(default_seed());
  opt.n = args.n;
  opt.d = args.d;
  opt.d_g = args.d_g;
  const auto result = relgat::run_gradcheck(opt);

  json reports = json::array();
  for (const auto& r : result.reports) {
    json j;
    j["parameter"] = r.parameter_name;
    j["max_relative_error"] = r.max_relative_error;
    j["worst_index"] = {r.worst_row, r.worst_col};
    j["valid"] = r.valid;
    reports.push_back(std::move(j));
    std::fprintf(stderr, "%-34s %.3e %s\n", r.parameter_name.c_str(),
                 r.max_relative_error,
                 r.valid && r.max_relative_error < relgat::kGradcheckTolerance ? "ok"
                                                                               : "FAIL");
  }
  json doc;
  doc["format_version"] = relgat::kFormatVersion;
  doc["graph"] = relgat::short_name(opt.variant);
  doc["seed"] = opt.seed;
  doc["n"] = opt.n;
  doc["d"] = opt.d;
  doc["d_g"] = opt.d_g;
  doc["step"] = opt.step;
  doc["tolerance"] = relgat::kGradcheckTolerance;
  doc["passed"] = result.passed;
  doc["max_relative_error"] = result.worst_error;
  doc["reports"] = std::move(reports);
  emit(relgat::dump_json(doc), args.out);
  std::fprintf(stderr, "%s: %zu parameters, worst relative error %.3e (tolerance %.0e)\n",
               result.passed ? "PASS" : "FAIL", result.reports.size(), result.worst_error,
               relgat::kGradcheckTolerance);
  return result.passed ? kExitOk : kExitCheckFailed;
}

// ---------------------------------------------------------------------------

struct InitArgs {
  std::optional<std::uint64_t> seed;
  std::size_t d = 1024;
  std::size_t d_g = relgat::kDefaultEmbedWidth;
  std::size_t d_model = relgat::kDefaultModelWidth;
  std::size_t heads = relgat::kDefaultHeads;
  std::size_t ff = 0;
  std::vector<std::string> labels;
  std::string out;
};

int cmd_init_params(const InitArgs& args) {
  if (args.d == 0 || args.d_model == 0) {
    throw UsageError("--d and --d-model must be positive");
  }
  relgat::InitOptions opt;
  opt.seed = args.seed.value_or(default_seed());
  opt.d = args.d;
  opt.d_g = args.d_g;
  opt.model_width = args.d_model;
  opt.heads = args.heads;
  opt.ff_width = args.ff;
  for (const auto& name : args.labels) {
    bool known = false;
    for (auto v : {relgat::GraphVariant::spatial, relgat::GraphVariant::semantic}) {
      for (const auto& label : relgat::labels_for(v)) {
        known = known || relgat::label_name(label) == name;
      }
    }
    if (!known) throw UsageError("unknown edge label '" + name + "'");
    opt.labels.insert(name);
  }
  emit(relgat::dump_json(relgat::to_json(relgat::init_parameter_file(opt))), args.out);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Relationship graphs and graph-attention encoders for detected regions"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "relgat 1.0.0");

  RelationsArgs rel;
  auto* relations = app.add_subcommand("relations", "Extract spatial or semantic relation edges");
  relations->add_option("-i,--input", rel.input, "Detection file")->required();
  relations->add_option("-m,--mode", rel.mode, "spatial or semantic")
      ->check(CLI::IsMember({"spatial", "semantic", "spa", "sem"}));
  relations->add_option("-w,--weights", rel.weights, "Parameter file (semantic mode)");
  relations->add_option("--threshold", rel.threshold, "Semantic acceptance probability");
  relations->add_option("--overlap-iou", rel.overlap_iou, "IoU at or above which boxes overlap");
  relations->add_option("--distance-ratio", rel.distance_ratio,
                        "Max center distance as a fraction of the image diagonal");
  relations->add_option("-o,--out", rel.out, "Output path (default stdout)");

  EncodeArgs enc;
  auto* encode = app.add_subcommand("encode", "Refine region features with graph attention");
  encode->add_option("-i,--input", enc.input, "Detection file")->required();
  encode->add_option("-p,--params", enc.params, "Parameter file")->required();
  encode->add_option("-g,--graphs", enc.graphs, "Subset of imp,spa,sem")->delimiter(',');
  encode->add_option("--threshold", enc.threshold, "Semantic acceptance probability");
  encode->add_option("-o,--out", enc.out, "Output path (default stdout)");

  AttnArgs att;
  auto* attn = app.add_subcommand("attn", "Export the top-k attention weights per region");
  attn->add_option("-i,--input", att.input, "Detection file")->required();
  attn->add_option("-p,--params", att.params, "Parameter file")->required();
  attn->add_option("-g,--graph", att.graph, "imp, spa or sem");
  attn->add_option("-k,--top-k", att.top_k, "Weights kept per region");
  attn->add_option("--svg", att.svg, "Write an SVG overlay for --node");
  attn->add_option("--node", att.node, "Query region for the SVG overlay");
  attn->add_option("--threshold", att.threshold, "Semantic acceptance probability");
  attn->add_option("-o,--out", att.out, "Output path (default stdout)");

  FuseArgs fus;
  auto* fuse = app.add_subcommand("fuse", "Fuse spatial, semantic and implicit word distributions");
  fuse->add_option("--spa", fus.spa, "Spatial-stream distribution")->required();
  fuse->add_option("--sem", fus.sem, "Semantic-stream distribution")->required();
  fuse->add_option("--imp", fus.imp, "Implicit-stream distribution")->required();
  fuse->add_option("--alpha", fus.alpha, "Spatial weight");
  fuse->add_option("--beta", fus.beta, "Semantic weight");
  fuse->add_option("-o,--out", fus.out, "Output path (default stdout)");

  SweepArgs swp;
  auto* sweep = app.add_subcommand("sweep", "Grid-sweep the fusion weights");
  sweep->add_option("--step", swp.step, "Grid spacing");
  sweep->add_option("--scorer", swp.scorer, "Builtin scorer: constant, peak, loglik");
  sweep->add_option("--scorer-cmd", swp.scorer_cmd,
                    "External scorer, invoked as '<cmd> <alpha> <beta>'");
  sweep->add_option("--seed", swp.seed, "Seed for the loglik scorer");
  sweep->add_option("-o,--out", swp.out, "JSON output path (default stdout)");

  GradcheckArgs gc;
  auto* gradcheck = app.add_subcommand("gradcheck", "Check analytic gradients against finite differences");
  gradcheck->add_option("-g,--graph", gc.graph, "imp, spa or sem");
  gradcheck->add_option("--seed", gc.seed, "Scene and parameter seed");
  gradcheck->add_option("--n", gc.n, "Region count");
  gradcheck->add_option("--d", gc.d, "Feature dimension");
  gradcheck->add_option("--d-g", gc.d_g, "Geometry embedding width");
  gradcheck->add_option("-o,--out", gc.out, "JSON output path (default stdout)");

  InitArgs ini;
  auto* init = app.add_subcommand("init-params", "Write a seeded parameter file");
  init->add_option("--seed", ini.seed, "Initialization seed");
  init->add_option("--d", ini.d, "Region feature dimension");
  init->add_option("--d-g", ini.d_g, "Geometry embedding width");
  init->add_option("--d-model", ini.d_model, "Classifier model width");
  init->add_option("--heads", ini.heads, "Classifier attention heads");
  init->add_option("--ff", ini.ff, "Classifier feed-forward width (0 = 4 * d-model)");
  init->add_option("--labels", ini.labels, "Edge labels given b_lab/c_lab entries")
      ->delimiter(',');
  init->add_option("-o,--out", ini.out, "Output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*relations) return cmd_relations(rel);
    if (*encode) return cmd_encode(enc);
    if (*attn) return cmd_attn(att);
    if (*fuse) return cmd_fuse(fus);
    if (*sweep) return cmd_sweep(swp);
    if (*gradcheck) return cmd_gradcheck(gc);
    if (*init) return cmd_init_params(ini);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
