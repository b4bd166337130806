#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "aqc/optimizer.hpp"

namespace aqc {

/// Context stamped into every artifact.
struct ArtifactInfo {
    std::string version;
    std::string config_hash;
};

/// Deterministic columns only: iteration, cost, weight, grad_norm and, when
/// the record carries it, fidelity. Wall times live in the JSON-lines trace,
/// which keeps the CSV byte-identical across reruns of the same seed.
void write_record_csv(std::ostream& os, const RunRecord& record, const ArtifactInfo& info);

void write_record_row_csv(std::ostream& os, const RunRow& row, bool with_fidelity);
std::string record_csv_header(const RunRecord& record, const ArtifactInfo& info);

/// One JSON object per iteration, wall_ms included.
void write_record_jsonl(std::ostream& os, const RunRecord& record, const ArtifactInfo& info);

/// Summary object: best/final cost, fidelity, stall and surrogate events.
std::string record_summary_json(const RunRecord& record, const ArtifactInfo& info);

/// Merges two records on the iteration column for side-by-side convergence
/// plots (missing iterations leave fields empty).
void write_comparison_csv(std::ostream& os, const RunRecord& a, const std::string& label_a,
                          const RunRecord& b, const std::string& label_b,
                          const ArtifactInfo& info);

/// Writes <stem>.csv and <stem>.json under `dir`.
void emit_convergence(const RunRecord& record, const std::string& dir,
                      const std::string& stem, const ArtifactInfo& info);

std::string format_double(double v);

}  // namespace aqc
