#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>

namespace nasa {

struct StepRow {
  std::int64_t step = 0;
  double r_ext = 0;
  double r_novel = 0;
  double r_surprise = 0;
  double ae_loss = 0;
  double critic_loss = 0;
  double actor_loss = 0;
  double predictor_loss = 0;
};

struct EvalRow {
  std::int64_t step = 0;
  double mean_return = 0;
  double return_stddev = 0;
};

inline constexpr const char* kStepHeader =
    "step,r_ext,r_novel,r_surprise,ae_loss,critic_loss,actor_loss,predictor_loss";
inline constexpr const char* kEvalHeader = "step,mean_return,return_stddev";
inline constexpr const char* kStepCsvName = "metrics_steps.csv";
inline constexpr const char* kEvalCsvName = "metrics_eval.csv";

std::string format_row(const StepRow& r);
std::string format_row(const EvalRow& r);

// Appends rows to the two metrics files, flushing after every row so a crash
// leaves every completed row on disk.
class MetricsWriter {
 public:
  explicit MetricsWriter(const std::filesystem::path& dir);
  void write(const StepRow& r);
  void write(const EvalRow& r);

 private:
  void append(std::ofstream& os, const std::string& line, const std::filesystem::path& path);
  std::filesystem::path step_path_, eval_path_;
  std::ofstream steps_, evals_;
};

}  // namespace nasa
