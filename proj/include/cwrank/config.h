#ifndef CWRANK_CONFIG_H_
#define CWRANK_CONFIG_H_

#include <filesystem>
#include <optional>
#include <string>

#include "cwrank/experiment.h"

namespace cwrank {

// Experiment config file (INI sections):
//
//   [paths]       corpus, annotations, lexicons, output
//   [experiment]  name, variant, target (source or ALL), groups (all or a
//                 comma list), exclude_groups, remove_source
//   [train]       epochs, learning_rate, momentum, batch_size,
//                 shared_hidden, task_hidden, positive_weight, min_df
//   [seeds]       master, reruns
//   [run]         jobs, resume
//
// Relative paths are resolved against the config file's directory.
struct RunConfig {
  std::filesystem::path corpus;
  std::filesystem::path annotations;
  std::filesystem::path lexicons;
  std::filesystem::path output_root = "out";
  ExperimentSpec spec;
  VocabConfig vocab;

  // <output_root>/<experiment name>
  std::filesystem::path output_dir() const { return output_root / spec.name; }
};

// Throws ConfigError naming the file (missing file, unknown key/section,
// bad value).
RunConfig load_run_config(const std::filesystem::path& path);
RunConfig parse_run_config(const std::string& text,
                           const std::filesystem::path& base_dir,
                           const std::string& origin = "<config>");

GroupSet parse_group_list(const std::string& list);  // "all" or comma list
std::optional<Source> parse_target(const std::string& name);  // ALL -> nullopt

}  // namespace cwrank

#endif  // CWRANK_CONFIG_H_
