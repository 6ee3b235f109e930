// Line-delimited interchange formats for groups, samples and PIP tables,
// plus CSV matrices, detection files and simulation configs.
#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "blip/blip.hpp"
#include "blip/core.hpp"
#include "blip/pips.hpp"
#include "blip/sim.hpp"

namespace blip::io {

/// Groups: one JSON object per line with id, kind and region fields.
void write_groups(std::ostream& os, const std::vector<CandidateGroup>& groups);
std::vector<CandidateGroup> read_groups(std::istream& is);

/// Samples: one draw per line, {"chain":c,"signals":[..]} or
/// {"chain":c,"points":[[..],..]}. Continuous files start with a
/// {"format":"samples","dim":d} header. An empty stream reads as an empty
/// discrete sample set.
void write_samples(std::ostream& os, const SampleSet& samples);
SampleSet read_samples(std::istream& is);

/// PIPs: {"id":..,"pip":..} lines, then {"location":..,"marginal":..} lines.
void write_pips(std::ostream& os, const PipTable& table);
PipTable read_pips(std::istream& is);

/// Plain numeric CSV; a leading non-numeric row is treated as a header.
Eigen::MatrixXd read_matrix_csv(std::istream& is);
void write_matrix_csv(std::ostream& os, const Eigen::MatrixXd& M,
                      const std::vector<std::string>& header = {});

/// L x p SuSiE alpha matrix in CSV form.
SusieAlphas read_susie_csv(std::istream& is);

/// Regression data: the last CSV column is the response.
struct DataSet {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
};
DataSet read_data_csv(std::istream& is);
void write_data_csv(std::ostream& os, const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

void write_detection(std::ostream& os, const DetectionSet& det,
                     const std::optional<Certificate>& cert = std::nullopt);
DetectionSet read_detection(std::istream& is);

/// {"signals":[..]} or {"dim":d,"points":[[..],..]}.
void write_truth(std::ostream& os, const Truth& truth);
Truth read_truth(std::istream& is);

struct SimConfig {
  std::uint64_t seed = 0;
  std::vector<Scenario> scenarios;
};
SimConfig read_sim_config(std::istream& is);

/// CSV with columns scenario,replicate,method,power,normalized_power,fdp,
/// n_discoveries,runtime_ms. Without `timing` the runtime column holds NA.
void write_sim_rows(std::ostream& os, const std::vector<SimRow>& rows, bool timing);

/// Fixed 17-significant-digit rendering used by every CSV writer.
std::string format_double(double x);

}  // namespace blip::io
