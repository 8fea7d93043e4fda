// Copyright 2026 The Active Annotation Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: ingest, simulate, compare, serve, synth.
//
// Exit codes: 0 success, 1 validation or usage error, 2 I/O error.

#include <csignal>
#include <filesystem>
#include <iostream>
#include <optional>
#include <thread>

#include <pthread.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "al/embed_spec.hpp"
#include "al/error.hpp"
#include "al/io.hpp"
#include "al/service.hpp"
#include "al/session.hpp"
#include "al/synthetic.hpp"

namespace {

using nlohmann::json;

constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

struct SimulationFlags {
  std::string corpus;
  std::optional<std::string> embed;
  std::string strategy = "margin";
  long seed_size = 160;
  long batch = 40;
  long rounds = 10;
  std::uint64_t rng = 0;
  double test_fraction = 0.2;
  std::optional<double> threshold;
  std::string out;
};

void add_session_flags(CLI::App* cmd, SimulationFlags& f) {
  cmd->add_option("--corpus", f.corpus, "Corpus JSONL file")->required();
  cmd->add_option("--embed", f.embed, "Embed documents lacking vectors: hash:<dim> or backend:<url>");
  cmd->add_option("--seed-size", f.seed_size, "Seed set size")->capture_default_str();
  cmd->add_option("--batch", f.batch, "Query batch size")->capture_default_str();
  cmd->add_option("--rounds", f.rounds, "Query rounds after the seed round")->capture_default_str();
  cmd->add_option("--rng", f.rng, "Generator seed")->capture_default_str();
  cmd->add_option("--test-fraction", f.test_fraction, "Held-out fraction")->capture_default_str();
}

std::shared_ptr<const al::Corpus> load_corpus(const std::string& path,
                                              const std::optional<std::string>& embed) {
  al::Corpus corpus = al::ingest_corpus_file(path);
  if (embed) corpus = al::resolve_embeddings(corpus, al::parse_embed_spec(*embed));
  return std::make_shared<const al::Corpus>(std::move(corpus));
}

al::SessionConfig session_config(const SimulationFlags& f) {
  al::SessionConfig c;
  c.n_seed = f.seed_size;
  c.batch_size = f.batch;
  c.max_rounds = f.rounds;
  c.rng_seed = f.rng;
  c.test_fraction = f.test_fraction;
  c.strategy = al::parse_strategy(f.strategy);
  c.stop_f1_threshold = f.threshold;
  return c;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

int run_ingest(const std::string& path, const std::optional<std::string>& embed,
               const std::optional<std::string>& out) {
  const auto corpus = load_corpus(path, embed);
  if (out) al::write_file_atomic(*out, al::corpus_to_jsonl(*corpus));
  const auto stats = al::corpus_stats(*corpus);
  json classes = json::array();
  for (const auto& c : stats.classes) {
    classes.push_back({{"label", c.label}, {"count", c.count}, {"fraction", c.fraction}});
  }
  json summary = {{"n_docs", corpus->size()},
                  {"dim", corpus->dim()},
                  {"fully_embedded", corpus->fully_embedded()},
                  {"label_set", corpus->label_set()},
                  {"n_gold", stats.total},
                  {"classes", classes}};
  std::cout << summary.dump(2) << "\n";
  return 0;
}

int run_simulate(const SimulationFlags& f) {
  const auto corpus = load_corpus(f.corpus, f.embed);
  const auto config = session_config(f);
  const auto history = al::run_simulation(corpus, config);
  al::write_file_atomic(f.out, al::export_history(history, corpus->label_set()));
  const auto& last = history.back();
  std::cout << "rounds: " << history.size() << ", labels: " << last.n_labeled
            << ", final macro_f1: " << fixed(last.metrics ? last.metrics->macro_f1 : 0.0, 6)
            << "\n";
  return 0;
}

int run_compare(const SimulationFlags& f, double target_gap, std::optional<double> target,
                const std::string& out_dir) {
  const auto corpus = load_corpus(f.corpus, f.embed);
  al::SessionConfig config = session_config(f);
  std::filesystem::create_directories(out_dir);

  const double reference = al::full_pool_reference(*corpus, config).macro_f1;
  const double goal = target ? *target : reference - target_gap;

  json learners = json::object();
  std::optional<long> needed[2];
  const al::QueryStrategy strategies[] = {al::QueryStrategy::Margin, al::QueryStrategy::Random};
  for (int i = 0; i < 2; ++i) {
    config.strategy = strategies[i];
    const auto history = al::run_simulation(corpus, config);
    const std::string name(al::to_string(strategies[i]));
    al::write_file_atomic((std::filesystem::path(out_dir) / (name + ".csv")).string(),
                          al::export_history(history, corpus->label_set()));
    needed[i] = al::labels_to_reach(history, goal);
    double best = 0.0;
    for (const auto& r : history) {
      if (r.metrics) best = std::max(best, r.metrics->macro_f1);
    }
    learners[name] = {{"labels_to_target", needed[i] ? json(*needed[i]) : json(nullptr)},
                      {"best_macro_f1", fixed(best, 6)},
                      {"final_n_labeled", history.back().n_labeled}};
  }
  json summary = {{"full_pool_macro_f1", fixed(reference, 6)},
                  {"target_macro_f1", fixed(goal, 6)},
                  {"learners", learners},
                  {"label_reduction_vs_random", nullptr}};
  if (needed[0] && needed[1]) {
    summary["label_reduction_vs_random"] =
        fixed(1.0 - static_cast<double>(*needed[0]) / static_cast<double>(*needed[1]), 6);
  }
  const std::string text = summary.dump(2) + "\n";
  al::write_file_atomic((std::filesystem::path(out_dir) / "summary.json").string(), text);
  std::cout << text;
  return 0;
}

int run_serve(const std::string& config_path) {
  const al::ServiceConfig config = al::load_service_config(config_path);

  // Signals are taken synchronously by this thread; the server runs on another.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  al::Service service(config);
  const int port = service.bind();
  std::cout << "listening on " << config.host << ":" << port << std::endl;
  std::thread server([&service] { service.listen(); });
  int received = 0;
  sigwait(&signals, &received);
  std::cout << "shutting down" << std::endl;
  service.stop();
  server.join();
  service.persist_all();
  return 0;
}

int run_synth(const al::SyntheticSpec& spec, const std::string& out) {
  al::write_file_atomic(out, al::corpus_to_jsonl(al::make_synthetic_corpus(spec)));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Active-learning annotation engine"};
  app.require_subcommand(1);

  std::string ingest_path;
  std::optional<std::string> ingest_embed;
  std::optional<std::string> ingest_out;
  auto* ingest = app.add_subcommand("ingest", "Validate a corpus and print class statistics");
  ingest->add_option("corpus", ingest_path, "Corpus JSONL file")->required();
  ingest->add_option("--embed", ingest_embed, "hash:<dim> or backend:<url>");
  ingest->add_option("--out", ingest_out, "Write the embedded corpus here");

  SimulationFlags sim;
  auto* simulate = app.add_subcommand("simulate", "Run an oracle simulation, write the learning curve");
  add_session_flags(simulate, sim);
  simulate->add_option("--strategy", sim.strategy, "margin|random|entropy|leastconf")
      ->check(CLI::IsMember({"margin", "random", "entropy", "leastconf"}))
      ->capture_default_str();
  simulate->add_option("--threshold", sim.threshold, "Stop once macro-F1 reaches this value");
  simulate->add_option("--out", sim.out, "CSV output path")->required();

  SimulationFlags cmp;
  double target_gap = 0.02;
  std::optional<double> target;
  std::string cmp_out;
  auto* compare = app.add_subcommand("compare", "Run margin and random learners with identical seeds");
  add_session_flags(compare, cmp);
  compare->add_option("--target-gap", target_gap, "Target = full-pool macro-F1 minus this")
      ->capture_default_str();
  compare->add_option("--target", target, "Absolute macro-F1 target (overrides --target-gap)");
  compare->add_option("--out", cmp_out, "Output directory")->required();

  std::string serve_config;
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--config", serve_config, "Service config JSON")->required();

  al::SyntheticSpec synth_spec;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "Write a seeded Gaussian-blob corpus");
  synth->add_option("--out", synth_out, "Output JSONL")->required();
  synth->add_option("--seed", synth_spec.seed, "Generator seed")->capture_default_str();
  synth->add_option("--separation", synth_spec.separation, "Class-mean offset")->capture_default_str();
  synth->add_option("--n", synth_spec.n_docs, "Number of documents")->capture_default_str();
  synth->add_option("--dim", synth_spec.dim, "Embedding dimension")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitValidation;
  }

  try {
    if (*ingest) return run_ingest(ingest_path, ingest_embed, ingest_out);
    if (*simulate) return run_simulate(sim);
    if (*compare) {
      cmp.strategy = "margin";
      return run_compare(cmp, target_gap, target, cmp_out);
    }
    if (*serve) return run_serve(serve_config);
    if (*synth) return run_synth(synth_spec, synth_out);
  } catch (const al::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const al::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitValidation;
}
