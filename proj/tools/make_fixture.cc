// Writes a synthetic corpus and its sidecar annotations.
//
//   make_fixture --out DIR [--debates N] [--sentences N] [--dim D]
//                [--topics K] [--seed S] [--identical-labels]

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "cwrank/annotations.h"
#include "cwrank/corpus.h"
#include "cwrank/synthetic.h"

int main(int argc, char** argv) {
  CLI::App app{"Synthetic fixture generator"};
  cwrank::SyntheticConfig cfg;
  std::string out_dir, prefix = "synthetic";
  app.add_option("--out", out_dir, "Output directory")->required();
  app.add_option("--prefix", prefix, "File name prefix");
  app.add_option("--debates", cfg.debates, "Number of debates");
  app.add_option("--sentences", cfg.sentences_per_debate, "Sentences per debate");
  app.add_option("--dim", cfg.embedding_dim, "Embedding dimension");
  app.add_option("--topics", cfg.topic_count, "Topic count");
  app.add_option("--seed", cfg.seed, "Generator seed");
  app.add_flag("--identical-labels", cfg.identical_labels, "Copy one label to all sources");
  CLI11_PARSE(app, argc, argv);

  const auto data = cwrank::make_synthetic(cfg);
  std::filesystem::create_directories(out_dir);
  std::ofstream corpus(std::filesystem::path(out_dir) / (prefix + ".jsonl"));
  cwrank::write_corpus(data.corpus, corpus);
  std::ofstream sidecar(std::filesystem::path(out_dir) / (prefix + ".sidecar.jsonl"));
  sidecar << "# synthetic fixture: seed=" << cfg.seed << " K=" << cfg.topic_count
          << " D=" << cfg.embedding_dim << " discourse=random\n";
  for (std::size_t r = 0; r < data.corpus.num_sentences(); ++r)
    sidecar << cwrank::annotation_record_json(data.corpus.row(r), data.annotations.row(r))
            << '\n';
  if (!corpus || !sidecar) {
    std::cerr << "write failed\n";
    return 3;
  }
  std::cout << "wrote " << data.corpus.num_sentences() << " sentences to " << out_dir << '\n';
  return 0;
}
