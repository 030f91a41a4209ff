#include "nasa/harness/metrics.hpp"

#include <cstdio>
#include <stdexcept>

namespace nasa {
namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace

std::string format_row(const StepRow& r) {
  return std::to_string(r.step) + ',' + num(r.r_ext) + ',' + num(r.r_novel) + ',' + num(r.r_surprise) + ',' +
         num(r.ae_loss) + ',' + num(r.critic_loss) + ',' + num(r.actor_loss) + ',' + num(r.predictor_loss);
}

std::string format_row(const EvalRow& r) {
  return std::to_string(r.step) + ',' + num(r.mean_return) + ',' + num(r.return_stddev);
}

MetricsWriter::MetricsWriter(const std::filesystem::path& dir)
    : step_path_(dir / kStepCsvName), eval_path_(dir / kEvalCsvName) {
  std::filesystem::create_directories(dir);
  steps_.open(step_path_, std::ios::trunc);
  evals_.open(eval_path_, std::ios::trunc);
  if (!steps_ || !evals_) throw std::runtime_error("cannot create metrics files in " + dir.string());
  append(steps_, kStepHeader, step_path_);
  append(evals_, kEvalHeader, eval_path_);
}

void MetricsWriter::append(std::ofstream& os, const std::string& line, const std::filesystem::path& path) {
  os << line << '\n';
  os.flush();
  if (!os) throw std::runtime_error("write failed for " + path.string());
}

void MetricsWriter::write(const StepRow& r) { append(steps_, format_row(r), step_path_); }
void MetricsWriter::write(const EvalRow& r) { append(evals_, format_row(r), eval_path_); }

}  // namespace nasa
